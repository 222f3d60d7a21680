#include "vstain/img/histogram.hpp"

#include "vstain/img/pgm.hpp"

namespace vstain::img {

std::array<std::uint64_t, 256> histogram8(const ImageGrid& image) {
  std::array<std::uint64_t, 256> hist{};
  for (double v : image.values()) ++hist[quantize(v, 255)];
  return hist;
}

ImageGrid histogram_equalize(const ImageGrid& image) {
  const auto hist = histogram8(image);
  std::array<double, 256> cdf{};
  std::uint64_t running = 0;
  const double total = static_cast<double>(image.size());
  for (int k = 0; k < 256; ++k) {
    running += hist[k];
    cdf[k] = static_cast<double>(running) / total;
  }
  std::vector<double> out(image.size());
  const auto in = image.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = cdf[quantize(in[i], 255)];
  return ImageGrid::clamped(image.width(), image.height(), std::move(out),
                            image.source_bit_depth());
}

int otsu_threshold8(const ImageGrid& image) {
  const auto hist = histogram8(image);
  const double total = static_cast<double>(image.size());
  double sum_all = 0.0;
  for (int k = 0; k < 256; ++k) sum_all += k * static_cast<double>(hist[k]);

  double weight_bg = 0.0;
  double sum_bg = 0.0;
  double best_var = -1.0;
  int best = 0;
  for (int t = 0; t < 256; ++t) {
    weight_bg += static_cast<double>(hist[t]);
    if (weight_bg == 0.0) continue;
    const double weight_fg = total - weight_bg;
    if (weight_fg == 0.0) break;
    sum_bg += t * static_cast<double>(hist[t]);
    const double mean_bg = sum_bg / weight_bg;
    const double mean_fg = (sum_all - sum_bg) / weight_fg;
    const double between = weight_bg * weight_fg * (mean_bg - mean_fg) * (mean_bg - mean_fg);
    if (between > best_var) {
      best_var = between;
      best = t;
    }
  }
  if (best_var < 0.0) {
    // Single occupied level: everything is background.
    for (int k = 255; k >= 0; --k) {
      if (hist[k] != 0) return k;
    }
  }
  return best;
}

}  // namespace vstain::img
