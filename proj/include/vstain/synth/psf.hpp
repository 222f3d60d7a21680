#pragma once

#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::synth {

// Isotropic Gaussian defocus: sigma(z) = sigma0 + slope * |z| (pixels,
// z in micrometres). Kernels are truncated at radius ceil(3 sigma).
struct PsfModel {
  double sigma0 = 0.5;
  double slope = 0.5;

  void validate() const;
  double sigma(double z_um) const noexcept;
};

int kernel_radius(double sigma) noexcept;

// Normalized 1-D Gaussian taps, length 2 * radius + 1. sigma == 0 gives {1}.
std::vector<double> gaussian_taps(double sigma);

// Normalized 2-D kernel (outer product of the 1-D taps), row-major.
std::vector<double> render_kernel(double sigma);

// Reflect-101 index folding: ... 2 1 | 0 1 2 ... n-1 | n-2 ...
int reflect_index(int i, int n) noexcept;

// Separable Gaussian convolution with reflect-101 borders.
img::ImageGrid gaussian_blur(const img::ImageGrid& image, double sigma);

img::ImageGrid defocus(const img::ImageGrid& image, double z_um, const PsfModel& psf);

}  // namespace vstain::synth
