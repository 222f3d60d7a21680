#pragma once

#include <optional>
#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::metrics {

// Mean absolute difference on the unit-interval scale.
double mae(const img::ImageGrid& a, const img::ImageGrid& b);

double mse(const img::ImageGrid& a, const img::ImageGrid& b);

// 10 log10(peak^2 / MSE) in dB; +infinity when the images are identical.
double psnr(const img::ImageGrid& a, const img::ImageGrid& b, double peak = 1.0);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean of the local SSIM map over every position where the Gaussian window
// fits entirely inside the image. Throws DimensionError for images smaller
// than the window.
double ssim(const img::ImageGrid& a, const img::ImageGrid& b, const SsimOptions& options = {});

struct MetricReport {
  double mae = 0.0;
  double psnr = 0.0;            // +inf when identical
  std::optional<double> ssim;   // empty when the image is smaller than the window
};

MetricReport evaluate(const img::ImageGrid& pred, const img::ImageGrid& gt);

struct PairEvaluation {
  std::vector<MetricReport> reports;
  double mean_mae = 0.0;
  double mean_psnr = 0.0;  // over finite entries; NaN if there are none
  double mean_ssim = 0.0;  // over defined entries; NaN if there are none
  int infinite_psnr_count = 0;
  int undefined_ssim_count = 0;
};

PairEvaluation evaluate_pairs(const std::vector<img::ImageGrid>& preds,
                              const std::vector<img::ImageGrid>& gts);

}  // namespace vstain::metrics
