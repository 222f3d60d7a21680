#include "vstain/img/image.hpp"

#include <algorithm>
#include <cmath>

#include "vstain/error.hpp"

namespace vstain::img {

namespace {

void check_geometry(int width, int height) {
  if (width < 1 || height < 1) {
    throw DimensionError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

void check_bit_depth(int bits) {
  if (bits != 8 && bits != 16) {
    throw InvariantError("source bit depth must be 8 or 16, got " + std::to_string(bits));
  }
}

}  // namespace

ImageGrid::ImageGrid(int width, int height, int source_bit_depth)
    : width_(width), height_(height), bit_depth_(source_bit_depth) {
  check_geometry(width, height);
  check_bit_depth(source_bit_depth);
  values_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

ImageGrid::ImageGrid(int width, int height, std::vector<double> values, int source_bit_depth)
    : width_(width), height_(height), bit_depth_(source_bit_depth), values_(std::move(values)) {
  check_geometry(width, height);
  check_bit_depth(source_bit_depth);
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("image value count " + std::to_string(values_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvariantError("image value at index " + std::to_string(i) +
                           " outside [0,1]: " + std::to_string(v));
    }
  }
}

ImageGrid ImageGrid::clamped(int width, int height, std::vector<double> values,
                             int source_bit_depth) {
  for (double& v : values) {
    if (!std::isnan(v)) v = std::clamp(v, 0.0, 1.0);
  }
  return ImageGrid(width, height, std::move(values), source_bit_depth);
}

void ImageGrid::set_source_bit_depth(int bits) {
  check_bit_depth(bits);
  bit_depth_ = bits;
}

void ImageGrid::set(int row, int col, double v) {
  if (row < 0 || row >= height_ || col < 0 || col >= width_) {
    throw DimensionError("pixel (" + std::to_string(row) + "," + std::to_string(col) +
                         ") outside image");
  }
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw InvariantError("pixel value outside [0,1]: " + std::to_string(v));
  }
  values_[index(row, col)] = v;
}

void FieldOfView::add(std::string name, ImageGrid image) {
  if (name.empty()) throw InvariantError("channel name must be non-empty");
  if (contains(name)) throw InvariantError("duplicate channel name '" + name + "'");
  if (!channels_.empty() && !channels_.front().second.same_shape(image)) {
    throw DimensionError("channel '" + name + "' is " + std::to_string(image.width()) + "x" +
                         std::to_string(image.height()) + " but field of view is " +
                         std::to_string(width()) + "x" + std::to_string(height()));
  }
  channels_.emplace_back(std::move(name), std::move(image));
}

bool FieldOfView::contains(const std::string& name) const noexcept {
  return std::any_of(channels_.begin(), channels_.end(),
                     [&](const auto& c) { return c.first == name; });
}

const ImageGrid& FieldOfView::channel(const std::string& name) const {
  for (const auto& c : channels_) {
    if (c.first == name) return c.second;
  }
  throw DimensionError("field of view has no channel '" + name + "'");
}

std::vector<std::string> FieldOfView::names() const {
  std::vector<std::string> out;
  out.reserve(channels_.size());
  for (const auto& c : channels_) out.push_back(c.first);
  return out;
}

std::vector<double> normalize(const ImageGrid& image) {
  std::vector<double> out(image.values().begin(), image.values().end());
  for (double& v : out) v = 2.0 * v - 1.0;
  return out;
}

ImageGrid denormalize(std::span<const double> values, int width, int height,
                      int source_bit_depth) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] + 1.0) * 0.5;
  }
  return ImageGrid::clamped(width, height, std::move(out), source_bit_depth);
}

}  // namespace vstain::img
