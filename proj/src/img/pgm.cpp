#include "vstain/img/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "vstain/error.hpp"

namespace vstain::img {

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, std::size_t start)
      : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }

  void skip_whitespace_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_uint(const char* what) {
    skip_whitespace_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFUL) throw ParseError(std::string(what) + " is too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("expected ") + what, start);
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void read_single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("expected single whitespace after maxval", pos_);
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

}  // namespace

std::uint32_t quantize(double v, std::uint32_t maxval) noexcept {
  const double scaled = std::floor(v * static_cast<double>(maxval) + 0.5);
  if (!(scaled > 0.0)) return 0;
  if (scaled >= static_cast<double>(maxval)) return maxval;
  return static_cast<std::uint32_t>(scaled);
}

ImageGrid load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 3 || bytes[0] != 'P' || bytes[1] != '5' || !std::isspace(bytes[2])) {
    throw ParseError("not a binary PGM (magic must be P5)", 0);
  }
  HeaderReader reader(bytes, 2);
  const auto width = reader.read_uint("width");
  const auto height = reader.read_uint("height");
  reader.skip_whitespace_and_comments();
  const std::size_t maxval_offset = reader.pos();
  const auto maxval = reader.read_uint("maxval");
  if (width == 0 || height == 0) {
    throw ParseError("zero image dimension", 2);
  }
  if (maxval != 255 && maxval != 65535) {
    throw ParseError("unsupported maxval " + std::to_string(maxval) + " (need 255 or 65535)",
                     maxval_offset);
  }
  reader.read_single_whitespace();

  const std::size_t offset = reader.pos();
  const std::size_t bytes_per_sample = maxval == 255 ? 1 : 2;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  const std::size_t needed = count * bytes_per_sample;
  if (bytes.size() - offset < needed) {
    throw ParseError("truncated payload: need " + std::to_string(needed) + " bytes, have " +
                         std::to_string(bytes.size() - offset),
                     bytes.size());
  }

  std::vector<double> values(count);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t sample = 0;
    if (bytes_per_sample == 1) {
      sample = bytes[offset + i];
    } else {
      sample = (static_cast<std::uint32_t>(bytes[offset + 2 * i]) << 8) |
               bytes[offset + 2 * i + 1];
      if (sample > maxval) throw ParseError("sample exceeds maxval", offset + 2 * i);
    }
    values[i] = static_cast<double>(sample) * scale;
  }
  return ImageGrid(static_cast<int>(width), static_cast<int>(height), std::move(values),
                   maxval == 255 ? 8 : 16);
}

std::vector<std::uint8_t> save_pgm(const ImageGrid& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw InvariantError("PGM bit depth must be 8 or 16");
  }
  const std::uint32_t maxval = bit_depth == 8 ? 255 : 65535;
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" + std::to_string(maxval) +
                             "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + image.size() * (bit_depth / 8));
  for (double v : image.values()) {
    const std::uint32_t q = quantize(v, maxval);
    if (bit_depth == 8) {
      out.push_back(static_cast<std::uint8_t>(q));
    } else {
      out.push_back(static_cast<std::uint8_t>(q >> 8));
      out.push_back(static_cast<std::uint8_t>(q & 0xFF));
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

ImageGrid read_pgm_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return load_pgm(bytes);
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_pgm_file(const std::filesystem::path& path, const ImageGrid& image, int bit_depth) {
  write_file_bytes(path, save_pgm(image, bit_depth));
}

void write_ppm_file(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw DimensionError("PPM payload size does not match dimensions");
  }
  const std::string header =
      "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), rgb.begin(), rgb.end());
  write_file_bytes(path, out);
}

}  // namespace vstain::img
