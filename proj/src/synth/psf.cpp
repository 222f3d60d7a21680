#include "vstain/synth/psf.hpp"

#include <cmath>

#include "vstain/error.hpp"

namespace vstain::synth {

void PsfModel::validate() const {
  if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) throw ConfigError("psf sigma0 must be >= 0");
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ConfigError("psf slope must be > 0");
}

double PsfModel::sigma(double z_um) const noexcept { return sigma0 + slope * std::abs(z_um); }

int kernel_radius(double sigma) noexcept {
  return sigma <= 0.0 ? 0 : static_cast<int>(std::ceil(3.0 * sigma));
}

std::vector<double> gaussian_taps(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvariantError("gaussian sigma must be >= 0");
  const int radius = kernel_radius(sigma);
  if (radius == 0) return {1.0};
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

std::vector<double> render_kernel(double sigma) {
  const auto taps = gaussian_taps(sigma);
  std::vector<double> kernel(taps.size() * taps.size());
  for (std::size_t r = 0; r < taps.size(); ++r) {
    for (std::size_t c = 0; c < taps.size(); ++c) kernel[r * taps.size() + c] = taps[r] * taps[c];
  }
  return kernel;
}

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

img::ImageGrid gaussian_blur(const img::ImageGrid& image, double sigma) {
  const auto taps = gaussian_taps(sigma);
  if (taps.size() == 1) return image;
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = image.width();
  const int h = image.height();
  const auto in = image.values();

  std::vector<double> rows(in.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * in[static_cast<std::size_t>(r) * w + reflect_index(c + k, w)];
      }
      rows[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }
  std::vector<double> out(in.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * rows[static_cast<std::size_t>(reflect_index(r + k, h)) * w + c];
      }
      out[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }
  return img::ImageGrid::clamped(w, h, std::move(out), image.source_bit_depth());
}

img::ImageGrid defocus(const img::ImageGrid& image, double z_um, const PsfModel& psf) {
  if (!std::isfinite(z_um)) throw InvariantError("defocus distance must be finite");
  psf.validate();
  return gaussian_blur(image, psf.sigma(z_um));
}

}  // namespace vstain::synth
