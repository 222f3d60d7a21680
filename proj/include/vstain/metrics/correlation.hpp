#pragma once

#include <span>

namespace vstain::metrics {

// Pearson product-moment correlation. Throws UndefinedError when either
// series is constant and DimensionError on length mismatch or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace vstain::metrics
