#pragma once

#include <array>
#include <cstdint>

#include "vstain/img/image.hpp"

namespace vstain::img {

// 256-bin histogram of round-half-up 8-bit quantized values.
std::array<std::uint64_t, 256> histogram8(const ImageGrid& image);

// Each pixel maps to the cumulative fraction of pixels whose 8-bit level is
// at or below its own. Output is real-valued in (0, 1].
ImageGrid histogram_equalize(const ImageGrid& image);

// Otsu threshold on the 8-bit histogram. Foreground is level > threshold.
int otsu_threshold8(const ImageGrid& image);

}  // namespace vstain::img
