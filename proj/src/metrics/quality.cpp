#include "vstain/metrics/quality.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vstain/error.hpp"

namespace vstain::metrics {

namespace {

void require_same_shape(const img::ImageGrid& a, const img::ImageGrid& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("image sizes differ: " + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                         std::to_string(b.height()));
  }
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(size);
  const double center = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable "valid" filtering: output is (h - k + 1) x (w - k + 1).
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                 const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int ow = w - k + 1;
  const int oh = h - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += taps[t] * in[static_cast<std::size_t>(r) * w + c + t];
      rows[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += taps[t] * rows[static_cast<std::size_t>(r + t) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double mae(const img::ImageGrid& a, const img::ImageGrid& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) acc += std::abs(va[i] - vb[i]);
  return acc / static_cast<double>(va.size());
}

double mse(const img::ImageGrid& a, const img::ImageGrid& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(va.size());
}

double psnr(const img::ImageGrid& a, const img::ImageGrid& b, double peak) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

double ssim(const img::ImageGrid& a, const img::ImageGrid& b, const SsimOptions& options) {
  require_same_shape(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < options.window || h < options.window) {
    throw DimensionError("SSIM needs images of at least " + std::to_string(options.window) + "x" +
                         std::to_string(options.window) + ", got " + std::to_string(w) + "x" +
                         std::to_string(h));
  }
  const auto taps = gaussian_window(options.window, options.sigma);
  const std::vector<double> x(a.values().begin(), a.values().end());
  const std::vector<double> y(b.values().begin(), b.values().end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, w, h, taps);
  const auto mu_y = filter_valid(y, w, h, taps);
  const auto e_xx = filter_valid(xx, w, h, taps);
  const auto e_yy = filter_valid(yy, w, h, taps);
  const auto e_xy = filter_valid(xy, w, h, taps);

  const double c1 = (options.k1 * options.dynamic_range) * (options.k1 * options.dynamic_range);
  const double c2 = (options.k2 * options.dynamic_range) * (options.k2 * options.dynamic_range);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
           ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return acc / static_cast<double>(mu_x.size());
}

MetricReport evaluate(const img::ImageGrid& pred, const img::ImageGrid& gt) {
  MetricReport r;
  r.mae = mae(pred, gt);
  r.psnr = psnr(pred, gt);
  const SsimOptions defaults;
  if (pred.width() >= defaults.window && pred.height() >= defaults.window) {
    r.ssim = ssim(pred, gt, defaults);
  }
  return r;
}

PairEvaluation evaluate_pairs(const std::vector<img::ImageGrid>& preds,
                              const std::vector<img::ImageGrid>& gts) {
  if (preds.size() != gts.size()) {
    throw DimensionError("prediction/ground-truth list lengths differ: " +
                         std::to_string(preds.size()) + " vs " + std::to_string(gts.size()));
  }
  if (preds.empty()) throw DimensionError("no image pairs to evaluate");
  PairEvaluation out;
  double mae_sum = 0.0, psnr_sum = 0.0, ssim_sum = 0.0;
  int finite_psnr = 0, defined_ssim = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const MetricReport r = evaluate(preds[i], gts[i]);
    mae_sum += r.mae;
    if (std::isinf(r.psnr)) {
      ++out.infinite_psnr_count;
    } else {
      psnr_sum += r.psnr;
      ++finite_psnr;
    }
    if (r.ssim) {
      ssim_sum += *r.ssim;
      ++defined_ssim;
    } else {
      ++out.undefined_ssim_count;
    }
    out.reports.push_back(r);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.mean_mae = mae_sum / static_cast<double>(preds.size());
  out.mean_psnr = finite_psnr ? psnr_sum / finite_psnr : nan;
  out.mean_ssim = defined_ssim ? ssim_sum / defined_ssim : nan;
  return out;
}

}  // namespace vstain::metrics
