#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::img {

// Binary Netpbm P5 reader. maxval must be 255 or 65535; 16-bit samples are
// big-endian. Comments in the header are accepted. Throws ParseError.
ImageGrid load_pgm(std::span<const std::uint8_t> bytes);

// Canonical P5 writer: "P5\n<w> <h>\n<maxval>\n" followed by samples
// quantized with round-half-up of v * maxval.
std::vector<std::uint8_t> save_pgm(const ImageGrid& image, int bit_depth);

std::uint32_t quantize(double v, std::uint32_t maxval) noexcept;

ImageGrid read_pgm_file(const std::filesystem::path& path);
void write_pgm_file(const std::filesystem::path& path, const ImageGrid& image, int bit_depth);

// Binary P6 writer, 8 bits per sample, interleaved RGB.
void write_ppm_file(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint8_t> rgb);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace vstain::img
