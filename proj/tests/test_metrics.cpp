#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "vstain/error.hpp"
#include "vstain/img/histogram.hpp"
#include "vstain/img/pgm.hpp"
#include "vstain/metrics/correlation.hpp"
#include "vstain/metrics/error_index.hpp"
#include "vstain/metrics/quality.hpp"

using namespace vstain;
using namespace vstain::metrics;
using img::ImageGrid;
using vstain::testing::Lcg;

namespace {

ImageGrid levels(int w, int h, const std::vector<int>& q) {
  std::vector<double> v(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) v[i] = q[i] / 255.0;
  return ImageGrid(w, h, v);
}

struct OracleRow {
  double ie, se, total;
};

// Per-threshold loop straight from the definitions.
std::vector<OracleRow> brute_force(const std::vector<int>& p, const std::vector<int>& g,
                                   double b1, double b2) {
  std::vector<OracleRow> rows;
  const double n = static_cast<double>(p.size());
  for (int i = 0; i <= 252; ++i) {
    long long mass = 0;
    long long above = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const int e = std::abs(p[k] - g[k]);
      if (e <= i) mass += e;
      else ++above;
    }
    const double ie = static_cast<double>(mass) / (n * 255.0);
    const double se = static_cast<double>(above) / n;
    rows.push_back({ie, se, b1 * ie + b2 * se});
  }
  return rows;
}

std::vector<int> random_levels(Lcg& rng, int n) {
  std::vector<int> q(n);
  for (auto& v : q) v = rng.below(256);
  return q;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("mae examples") {
  const ImageGrid a(2, 1, std::vector<double>{0.0, 0.5});
  const ImageGrid b(2, 1, std::vector<double>{0.1, 0.1});
  CHECK(mae(a, b) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mae(a, a) == 0.0);
  CHECK(mae(vstain::testing::constant_image(3, 3, 0.0), vstain::testing::constant_image(3, 3, 1.0)) == 1.0);
  CHECK_THROWS_AS(mae(a, ImageGrid(1, 2)), DimensionError);
}

TEST_CASE("psnr examples") {
  Lcg rng(1);
  const ImageGrid a = vstain::testing::random_image(rng, 8, 8);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0);
  const ImageGrid z = vstain::testing::constant_image(4, 4, 0.0);
  const ImageGrid d = vstain::testing::constant_image(4, 4, 1.0 / 255.0);
  CHECK(psnr(z, d) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
  CHECK(psnr(z, d) == doctest::Approx(48.1308).epsilon(1e-6));
  CHECK(psnr(z, vstain::testing::constant_image(4, 4, 1.0)) == 0.0);
  CHECK_THROWS_AS(psnr(z, ImageGrid(3, 4)), DimensionError);
}

TEST_CASE("ssim examples") {
  Lcg rng(2);
  const ImageGrid a = vstain::testing::random_image(rng, 16, 16);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  const double c = 0.3, d = 0.7;
  const double c1 = 0.01 * 0.01;
  const double expected = (2 * c * d + c1) / (c * c + d * d + c1);
  CHECK(ssim(vstain::testing::constant_image(12, 12, c), vstain::testing::constant_image(12, 12, d)) ==
        doctest::Approx(expected).epsilon(1e-12));
  for (int t = 0; t < 20; ++t) {
    const ImageGrid x = vstain::testing::random_image(rng, 11 + rng.below(10), 11 + rng.below(10));
    const ImageGrid y = vstain::testing::random_image(rng, x.width(), x.height());
    const double s = ssim(x, y);
    CHECK(s == doctest::Approx(ssim(y, x)).epsilon(1e-12));
    CHECK((s >= -1.0 && s <= 1.0));
  }
  CHECK_THROWS_AS(ssim(ImageGrid(10, 12), ImageGrid(10, 12)), DimensionError);
}

TEST_CASE("ssim drops as noise grows") {
  Lcg rng(3);
  const ImageGrid a = vstain::testing::random_image(rng, 32, 32);
  double prev = 1.0;
  for (double amp : {0.05, 0.1, 0.2, 0.4}) {
    std::vector<double> v(a.values().begin(), a.values().end());
    for (auto& x : v) x = std::clamp(x + amp * (rng.uniform() - 0.5), 0.0, 1.0);
    const double s = ssim(a, ImageGrid(32, 32, v));
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("evaluate_pairs aggregates") {
  Lcg rng(4);
  std::vector<ImageGrid> a, b;
  for (int i = 0; i < 3; ++i) a.push_back(vstain::testing::random_image(rng, 12, 12));
  const auto same = evaluate_pairs(a, a);
  CHECK(same.mean_mae == 0.0);
  CHECK(same.mean_ssim == doctest::Approx(1.0));
  CHECK(same.infinite_psnr_count == 3);
  CHECK(std::isnan(same.mean_psnr));

  const ImageGrid z = vstain::testing::constant_image(12, 12, 0.0);
  const auto two = evaluate_pairs({z, z}, {vstain::testing::constant_image(12, 12, 0.1),
                                           vstain::testing::constant_image(12, 12, 0.3)});
  CHECK(two.mean_mae == doctest::Approx(0.2).epsilon(1e-12));

  const auto mixed = evaluate_pairs({z, z, z}, {z, vstain::testing::constant_image(12, 12, 0.1),
                                                vstain::testing::constant_image(12, 12, 1.0)});
  CHECK(mixed.infinite_psnr_count == 1);
  CHECK(mixed.mean_psnr == doctest::Approx((20.0 + 0.0) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate_pairs({z}, {z, z}), DimensionError);
  CHECK_THROWS(evaluate_pairs({}, {}));

  const auto small = evaluate_pairs({ImageGrid(4, 4)}, {ImageGrid(4, 4)});
  CHECK(small.undefined_ssim_count == 1);
  CHECK(!small.reports[0].ssim.has_value());
}

TEST_CASE("error index: 2x2 example") {
  const ImageGrid gt = levels(2, 2, {0, 0, 0, 0});
  const ImageGrid pred = levels(2, 2, {0, 10, 60, 255});
  CHECK(abs_error8(pred, gt) == std::vector<int>{0, 10, 60, 255});
  const ErrorIndexCurve c = error_index(pred, gt);
  REQUIRE(c.thresholds.size() == 253);
  CHECK(c.ie[50] == doctest::Approx(10.0 / (4 * 255)).epsilon(1e-15));
  CHECK(c.ie[50] == doctest::Approx(0.009804).epsilon(1e-4));
  CHECK(c.se[50] == 0.5);
  CHECK(c.total[50] == doctest::Approx(0.509804).epsilon(1e-6));
  const auto oracle = brute_force({0, 10, 60, 255}, {0, 0, 0, 0}, 1, 1);
  for (int i = 0; i <= 252; ++i) {
    CHECK(c.ie[i] == oracle[i].ie);
    CHECK(c.se[i] == oracle[i].se);
    CHECK(c.total[i] == oracle[i].total);
  }
  CHECK(c.argmin_threshold == 60);
}

TEST_CASE("error index: golden CSV") {
  const ImageGrid gt = levels(2, 2, {0, 0, 0, 0});
  const ImageGrid pred = levels(2, 2, {0, 10, 60, 255});
  CHECK(curve_csv(error_index(pred, gt)) ==
        read_text(VSTAIN_GOLDEN_DIR "/eval2x2/sample_target.csv"));
}

TEST_CASE("error index: identical images") {
  Lcg rng(5);
  const ImageGrid a = vstain::testing::random_image(rng, 7, 9);
  const ErrorIndexCurve c = error_index(a, a);
  for (int i = 0; i <= 252; ++i) {
    CHECK(c.ie[i] == 0.0);
    CHECK(c.se[i] == 0.0);
  }
  CHECK(c.tl == 0.0);
  CHECK(c.argmin_threshold == 0);
}

TEST_CASE("error index: degenerate weights") {
  Lcg rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_levels(rng, 64), g = random_levels(rng, 64);
    ErrorIndexOptions ie_only;
    ie_only.beta2 = 0.0;
    const ErrorIndexCurve a = error_index(levels(8, 8, p), levels(8, 8, g), ie_only);
    CHECK(a.tl == a.ie[0]);
    CHECK(a.argmin_threshold == 0);

    ErrorIndexOptions se_only;
    se_only.beta1 = 0.0;
    const ErrorIndexCurve b = error_index(levels(8, 8, p), levels(8, 8, g), se_only);
    CHECK(b.tl == b.se[252]);
    int first = 252;
    while (first > 0 && b.se[first - 1] == b.se[252]) --first;
    CHECK(b.argmin_threshold == first);
  }
}

TEST_CASE("error index: IE(252) reconstructs the 8-bit MAE") {
  Lcg rng(7);
  for (int t = 0; t < 50; ++t) {
    auto p = random_levels(rng, 36), g = random_levels(rng, 36);
    if (t % 2 == 0) {
      p[0] = 255;
      g[0] = 0;
    }
    const ErrorIndexCurve c = error_index(levels(6, 6, p), levels(6, 6, g));
    double full = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const int e = std::abs(p[k] - g[k]);
      full += e / 255.0;
      if (e > 252) tail += e / 255.0;
    }
    CHECK(c.ie[252] == doctest::Approx((full - tail) / 36.0).epsilon(1e-12));
  }
}

TEST_CASE("error index: curve invariants and mask agreement") {
  Lcg rng(8);
  for (int t = 0; t < 100; ++t) {
    const int w = 2 + rng.below(10), h = 2 + rng.below(10);
    const ImageGrid a = levels(w, h, random_levels(rng, w * h));
    const ImageGrid b = levels(w, h, random_levels(rng, w * h));
    ErrorIndexOptions opt;
    opt.beta1 = rng.uniform() * 2;
    opt.beta2 = rng.uniform() * 2;
    const ErrorIndexCurve c = error_index(a, b, opt);
    for (int i = 0; i <= 252; ++i) {
      if (i > 0) {
        CHECK(c.ie[i] >= c.ie[i - 1]);
        CHECK(c.se[i] <= c.se[i - 1]);
      }
      CHECK(c.tl <= c.total[i]);
      CHECK(error_mask(a, b, i).count() ==
            static_cast<std::size_t>(std::llround(c.se[i] * w * h)));
    }
    CHECK(c.tl == c.total[c.argmin_threshold]);
    for (int i = 0; i < c.argmin_threshold; ++i) CHECK(c.total[i] > c.tl);
  }
}

TEST_CASE("error index: signal-normalized mode and GT-mean scale") {
  std::vector<int> g(16, 10), p(16, 10);
  for (int i = 0; i < 4; ++i) g[i] = p[i] = 200;
  p[0] = 100;
  p[15] = 90;
  ErrorIndexOptions opt;
  opt.mode = SeMode::kSignalNormalized;
  const ErrorIndexCurve c = error_index(levels(4, 4, p), levels(4, 4, g), opt);
  // Otsu foreground is the four bright pixels: SE is scaled by 16 / 4.
  CHECK(c.se[0] == doctest::Approx(2.0 / 16.0 * 4.0).epsilon(1e-15));
  CHECK(c.mode == SeMode::kSignalNormalized);

  CHECK_THROWS_AS(error_index(levels(2, 2, {1, 2, 3, 4}), levels(2, 2, {0, 0, 0, 0}), opt),
                  UndefinedError);

  ErrorIndexOptions gtmean;
  gtmean.ie_scale = IeScale::kGroundTruthMean;
  const ErrorIndexCurve m = error_index(levels(4, 4, p), levels(4, 4, g), gtmean);
  const double sum_gt = 4 * 200 + 12 * 10;
  CHECK(m.ie[252] == doctest::Approx((100 + 80) / sum_gt).epsilon(1e-15));
  CHECK(parse_mode("plain") == SeMode::kPlain);
  CHECK(parse_mode(mode_name(SeMode::kSignalNormalized)) == SeMode::kSignalNormalized);
  CHECK_THROWS_AS(parse_mode("other"), ConfigError);
}

TEST_CASE("error mask examples") {
  const ImageGrid gt = levels(2, 2, {0, 0, 0, 0});
  const ImageGrid pred = levels(2, 2, {0, 10, 60, 255});
  CHECK(error_mask(pred, gt, 50).count() == 2);
  CHECK(error_mask(pred, gt, 255).count() == 0);
  CHECK(error_mask(pred, pred, 0).count() == 0);
  const auto mask = error_mask(pred, gt, 50);
  const ImageGrid m = mask_image(mask);
  CHECK(m.values()[2] == 1.0);
  CHECK(m.values()[1] == 0.0);
  const auto rgb = mask_overlay_rgb(mask, pred);
  CHECK(rgb.size() == 12);
  CHECK((rgb[3] == 10 && rgb[4] == 10 && rgb[5] == 10));
  CHECK((rgb[6] == 0 && rgb[7] == 255 && rgb[8] == 0));
  CHECK_THROWS_AS(error_mask(pred, ImageGrid(3, 3), 50), DimensionError);
}

TEST_CASE("pearson") {
  const std::vector<double> x{0.5, 1.0, 3.0, -2.0, 7.5};
  std::vector<double> y(x.size()), z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 2.0 * x[i] + 1.0;
    z[i] = -x[i];
  }
  CHECK(pearson(x, y) == 1.0);
  CHECK(pearson(x, z) == -1.0);
  const std::vector<double> c(5, 0.1);
  CHECK_THROWS_AS(pearson(c, x), UndefinedError);
  CHECK_THROWS_AS(pearson(x, c), UndefinedError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}), DimensionError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1.0, 2.0}), DimensionError);

  const std::vector<double> a{1, 2, 3, 4}, b{2, 1, 4, 3};
  CHECK(pearson(a, b) == doctest::Approx(0.6).epsilon(1e-12));
}
