#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::metrics {

// Thresholds run over the integers 0 .. floor(0.99 * 255).
inline constexpr int kMaxThreshold = 252;

enum class SeMode { kPlain, kSignalNormalized };

// Normalizer of the intensity error: the 8-bit full scale, or the mean
// 8-bit ground-truth intensity.
enum class IeScale { kBitDepth, kGroundTruthMean };

struct ErrorIndexOptions {
  double beta1 = 1.0;
  double beta2 = 1.0;
  SeMode mode = SeMode::kPlain;
  IeScale ie_scale = IeScale::kBitDepth;
};

struct ErrorIndexCurve {
  std::vector<int> thresholds;
  std::vector<double> ie;
  std::vector<double> se;
  std::vector<double> total;
  double tl = 0.0;
  int argmin_threshold = 0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  SeMode mode = SeMode::kPlain;
};

// Absolute 8-bit error |q(pred) - q(gt)| with round-half-up quantization.
std::vector<int> abs_error8(const img::ImageGrid& pred, const img::ImageGrid& gt);

// For each threshold i:
//   IE(i) = sum_{e_p <= i} e_p / (N * 255)
//   SE(i) = #{p : e_p > i} / N   (divided by the Otsu foreground fraction of
//                                  gt in signal-normalized mode)
//   total = beta1 * IE + beta2 * SE
// The tolerance level is the minimum total; ties go to the smallest threshold.
ErrorIndexCurve error_index(const img::ImageGrid& pred, const img::ImageGrid& gt,
                            const ErrorIndexOptions& options = {});

std::string mode_name(SeMode mode);
SeMode parse_mode(const std::string& name);

// CSV with header "threshold,ie,se,total" and a trailing
// "# tl=... argmin=... beta1=... beta2=... mode=..." line.
std::string curve_csv(const ErrorIndexCurve& curve);

struct ErrorMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 1 where the 8-bit error exceeds the threshold

  std::size_t count() const noexcept;
};

ErrorMask error_mask(const img::ImageGrid& pred, const img::ImageGrid& gt, int threshold8);

// 0/255 mask image.
img::ImageGrid mask_image(const ErrorMask& mask);

// Interleaved RGB: grayscale prediction with masked pixels painted green.
std::vector<std::uint8_t> mask_overlay_rgb(const ErrorMask& mask, const img::ImageGrid& pred);

}  // namespace vstain::metrics
