#include "vstain/metrics/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vstain/error.hpp"

namespace vstain::metrics {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("pearson: series lengths differ (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw DimensionError("pearson: need at least two observations");
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*xmin == *xmax || *ymin == *ymax) {
    throw UndefinedError("pearson: correlation undefined for a constant series");
  }
  // Extended-precision accumulation: the result is then correctly rounded
  // for practical inputs, so exactly affine series give exactly +-1.
  using Wide = long double;
  const Wide n = static_cast<Wide>(x.size());
  Wide mx = 0.0L, my = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Wide sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Wide dx = x[i] - mx;
    const Wide dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0L || syy == 0.0L) {
    throw UndefinedError("pearson: correlation undefined for a constant series");
  }
  const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace vstain::metrics
