#include "vstain/metrics/error_index.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>

#include "vstain/error.hpp"
#include "vstain/img/histogram.hpp"
#include "vstain/img/pgm.hpp"

namespace vstain::metrics {

std::vector<int> abs_error8(const img::ImageGrid& pred, const img::ImageGrid& gt) {
  if (!pred.same_shape(gt)) throw DimensionError("error index needs images of equal size");
  std::vector<int> e(pred.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const int p = static_cast<int>(img::quantize(pred.values()[i], 255));
    const int g = static_cast<int>(img::quantize(gt.values()[i], 255));
    e[i] = std::abs(p - g);
  }
  return e;
}

ErrorIndexCurve error_index(const img::ImageGrid& pred, const img::ImageGrid& gt,
                            const ErrorIndexOptions& options) {
  if (!(options.beta1 >= 0.0) || !(options.beta2 >= 0.0)) {
    throw InvariantError("error index weights must be non-negative");
  }
  const auto e = abs_error8(pred, gt);
  const double n = static_cast<double>(e.size());

  std::array<std::uint64_t, 256> count{};
  for (int v : e) ++count[v];

  double ie_denominator = n * 255.0;
  if (options.ie_scale == IeScale::kGroundTruthMean) {
    std::uint64_t level_sum = 0;
    for (double v : gt.values()) level_sum += img::quantize(v, 255);
    if (level_sum == 0) {
      throw UndefinedError("ground truth is black; cannot normalize by its mean intensity");
    }
    ie_denominator = static_cast<double>(level_sum);
  }

  double se_scale = 1.0;
  if (options.mode == SeMode::kSignalNormalized) {
    const int t = img::otsu_threshold8(gt);
    std::uint64_t fg = 0;
    for (double v : gt.values()) fg += img::quantize(v, 255) > static_cast<std::uint32_t>(t);
    if (fg == 0) {
      throw UndefinedError("ground truth has an empty Otsu foreground (threshold " +
                           std::to_string(t) + "); signal-normalized SE is undefined");
    }
    se_scale = n / static_cast<double>(fg);
  }

  ErrorIndexCurve curve;
  curve.beta1 = options.beta1;
  curve.beta2 = options.beta2;
  curve.mode = options.mode;
  std::uint64_t error_mass = 0;  // sum of e over e <= i
  std::uint64_t at_or_below = 0;
  for (int i = 0; i <= kMaxThreshold; ++i) {
    error_mass += static_cast<std::uint64_t>(i) * count[i];
    at_or_below += count[i];
    const double ie = static_cast<double>(error_mass) / ie_denominator;
    double se = static_cast<double>(e.size() - at_or_below) / n;
    if (options.mode == SeMode::kSignalNormalized) se *= se_scale;
    const double total = options.beta1 * ie + options.beta2 * se;
    curve.thresholds.push_back(i);
    curve.ie.push_back(ie);
    curve.se.push_back(se);
    curve.total.push_back(total);
    if (i == 0 || total < curve.tl) {
      curve.tl = total;
      curve.argmin_threshold = i;
    }
  }
  return curve;
}

std::string mode_name(SeMode mode) {
  return mode == SeMode::kPlain ? "plain" : "signal_normalized";
}

SeMode parse_mode(const std::string& name) {
  if (name == "plain") return SeMode::kPlain;
  if (name == "signal_normalized") return SeMode::kSignalNormalized;
  throw ConfigError("unknown error index mode '" + name + "' (plain|signal_normalized)");
}

std::string curve_csv(const ErrorIndexCurve& curve) {
  std::string out = "threshold,ie,se,total\n";
  char buf[160];
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", curve.thresholds[k], curve.ie[k],
                  curve.se[k], curve.total[k]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "# tl=%.12g argmin=%d beta1=%.12g beta2=%.12g mode=%s\n",
                curve.tl, curve.argmin_threshold, curve.beta1, curve.beta2,
                mode_name(curve.mode).c_str());
  out += buf;
  return out;
}

std::size_t ErrorMask::count() const noexcept {
  std::size_t n = 0;
  for (auto b : bits) n += b;
  return n;
}

ErrorMask error_mask(const img::ImageGrid& pred, const img::ImageGrid& gt, int threshold8) {
  if (threshold8 < 0 || threshold8 > 255) {
    throw InvariantError("mask threshold must be in 0..255");
  }
  const auto e = abs_error8(pred, gt);
  ErrorMask mask{pred.width(), pred.height(), std::vector<std::uint8_t>(e.size())};
  for (std::size_t i = 0; i < e.size(); ++i) mask.bits[i] = e[i] > threshold8 ? 1 : 0;
  return mask;
}

img::ImageGrid mask_image(const ErrorMask& mask) {
  std::vector<double> values(mask.bits.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = mask.bits[i] ? 1.0 : 0.0;
  return img::ImageGrid(mask.width, mask.height, std::move(values), 8);
}

std::vector<std::uint8_t> mask_overlay_rgb(const ErrorMask& mask, const img::ImageGrid& pred) {
  if (mask.width != pred.width() || mask.height != pred.height()) {
    throw DimensionError("mask and prediction sizes differ");
  }
  std::vector<std::uint8_t> rgb(mask.bits.size() * 3);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const auto g = static_cast<std::uint8_t>(img::quantize(pred.values()[i], 255));
    if (mask.bits[i]) {
      rgb[3 * i] = 0;
      rgb[3 * i + 1] = 255;
      rgb[3 * i + 2] = 0;
    } else {
      rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = g;
    }
  }
  return rgb;
}

}  // namespace vstain::metrics
