#include "vstain/net/adam.hpp"
#include "vstain/net/loss.hpp"

namespace vstain::net {

void LossWeights::validate() const {
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0)) {
    throw ConfigError("loss weights must be non-negative");
  }
}

std::string mae_form_name(MaeForm form) {
  return form == MaeForm::kMagnitude ? "magnitude" : "difference";
}

MaeForm parse_mae_form(const std::string& text) {
  if (text == "magnitude") return MaeForm::kMagnitude;
  if (text == "difference") return MaeForm::kDifference;
  throw ConfigError("unknown mae_form '" + text + "' (expected magnitude or difference)");
}

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam_beta1 must be in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam_beta2 must be in [0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
}

}  // namespace vstain::net
