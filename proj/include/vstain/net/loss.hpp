#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vstain/error.hpp"
#include "vstain/net/layers.hpp"

namespace vstain::net {

struct LossWeights {
  double lambda1 = 0.99;   // pixel term
  double lambda2 = 0.01;   // adversarial term
  double lambda3 = 0.001;  // L1 penalty on generator parameters

  void validate() const;
};

// kMagnitude compares |target| with |pred| in normalized space; kDifference
// is the ordinary mean of |target - pred|.
enum class MaeForm { kMagnitude, kDifference };

std::string mae_form_name(MaeForm form);
MaeForm parse_mae_form(const std::string& text);

inline constexpr double kLossEps = 1e-12;

inline double clamp_score(double s) noexcept { return std::clamp(s, kLossEps, 1.0 - kLossEps); }

struct GeneratorLossTerms {
  double mae = 0.0;
  double adversarial = 0.0;
  double theta = 0.0;
  double total = 0.0;
};

inline double weighted_total(const LossWeights& w, double mae, double adversarial, double theta) {
  return w.lambda1 * mae + w.lambda2 * adversarial + w.lambda3 * theta;
}

// Mean over every element (batch items have one channel each, so this is the
// batch mean of the per-image mean).
template <typename T>
double pixel_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target, MaeForm form) {
  if (!pred.same_shape(target)) {
    throw DimensionError("prediction " + pred.shape_string() + " and target " +
                         target.shape_string() + " differ");
  }
  if (pred.size() == 0) throw DimensionError("empty prediction");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred.data()[i];
    const double t = target.data()[i];
    sum += form == MaeForm::kMagnitude ? std::abs(std::abs(t) - std::abs(p)) : std::abs(t - p);
  }
  return sum / static_cast<double>(pred.size());
}

// Subgradient of pixel_loss with respect to pred, scaled by `scale`; zero at
// kinks.
template <typename T>
BasicTensor<T> pixel_loss_grad(const BasicTensor<T>& pred, const BasicTensor<T>& target,
                               MaeForm form, double scale) {
  BasicTensor<T> g(pred.n(), pred.c(), pred.h(), pred.w());
  const double k = scale / static_cast<double>(pred.size());
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred.data()[i];
    const double t = target.data()[i];
    const double d = form == MaeForm::kMagnitude ? sign(std::abs(p) - std::abs(t)) * sign(p)
                                                 : sign(p - t);
    g.data()[i] = static_cast<T>(k * d);
  }
  return g;
}

// Mean of -log(score) over the batch.
template <typename T>
double adversarial_loss(std::span<const T> scores) {
  if (scores.empty()) throw DimensionError("empty score batch");
  double sum = 0.0;
  for (T s : scores) sum -= std::log(clamp_score(s));
  return sum / static_cast<double>(scores.size());
}

// d adversarial_loss / d logit, scaled.
template <typename T>
std::vector<T> adversarial_logit_grad(std::span<const T> scores, double scale) {
  std::vector<T> g(scores.size());
  const double n = static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    g[i] = static_cast<T>(-scale * (1.0 - static_cast<double>(scores[i])) / n);
  }
  return g;
}

template <typename T>
double l1_norm(const std::vector<Param<T>*>& params) {
  double sum = 0.0;
  for (const auto* p : params) {
    for (T v : p->value) sum += std::abs(static_cast<double>(v));
  }
  return sum;
}

// Adds scale * sign(theta) to each gradient (zero where theta is zero).
template <typename T>
void add_l1_grad(const std::vector<Param<T>*>& params, double scale) {
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const T v = p->value[i];
      if (v > T{}) p->grad[i] += static_cast<T>(scale);
      else if (v < T{}) p->grad[i] -= static_cast<T>(scale);
    }
  }
}

// Composite generator objective. `scores` are discriminator outputs on the
// prediction; pass an empty span to drop the adversarial term.
template <typename T>
GeneratorLossTerms generator_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target,
                                  std::span<const T> scores, const std::vector<Param<T>*>& theta,
                                  const LossWeights& w, MaeForm form) {
  GeneratorLossTerms out;
  out.mae = pixel_loss(pred, target, form);
  out.adversarial = scores.empty() ? 0.0 : adversarial_loss(scores);
  out.theta = l1_norm(theta);
  out.total = weighted_total(w, out.mae, out.adversarial, out.theta);
  return out;
}

// -[log d_real + log(1 - d_fake)], averaged over the batch.
template <typename T>
double discriminator_loss(std::span<const T> real, std::span<const T> fake) {
  if (real.size() != fake.size() || real.empty()) {
    throw DimensionError("discriminator score batches must be non-empty and equal in size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    sum -= std::log(clamp_score(real[i])) + std::log(1.0 - clamp_score(fake[i]));
  }
  return sum / static_cast<double>(real.size());
}

template <typename T>
std::vector<T> discriminator_real_logit_grad(std::span<const T> real) {
  return adversarial_logit_grad(real, 1.0);
}

template <typename T>
std::vector<T> discriminator_fake_logit_grad(std::span<const T> fake) {
  std::vector<T> g(fake.size());
  const double n = static_cast<double>(fake.size());
  for (std::size_t i = 0; i < fake.size(); ++i) g[i] = static_cast<T>(fake[i] / n);
  return g;
}

}  // namespace vstain::net
