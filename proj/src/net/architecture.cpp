#include "vstain/net/architecture.hpp"

#include "vstain/error.hpp"

namespace vstain::net {

void GeneratorConfig::validate() const {
  if (in_channels < 1) throw ConfigError("generator.in_channels must be >= 1");
  if (out_channels != 1) throw ConfigError("generator.out_channels must be 1");
  if (depth < 1 || depth > 8) throw ConfigError("generator.depth must be in 1..8");
  if (base_width < 1) throw ConfigError("generator.base_width must be >= 1");
  if (kernel != 3) throw ConfigError("generator.kernel must be 3");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw ConfigError("generator.leaky_slope must be in (0,1)");
  }
}

void GeneratorConfig::check_input_side(int side) const {
  if (side < side_multiple() || side % side_multiple() != 0) {
    throw ConfigError("input side " + std::to_string(side) + " is not a positive multiple of " +
                      std::to_string(side_multiple()) + " required by depth " +
                      std::to_string(depth));
  }
}

void DiscriminatorConfig::validate() const {
  if (in_channels < 2) throw ConfigError("discriminator.in_channels must be >= 2");
  if (base_width < 1) throw ConfigError("discriminator.base_width must be >= 1");
  if (kernel != 5) throw ConfigError("discriminator.kernel must be 5");
  if (block_count != 3) throw ConfigError("discriminator.block_count must be 3");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw ConfigError("discriminator.leaky_slope must be in (0,1)");
  }
  if (input_side < side_multiple() || input_side % side_multiple() != 0) {
    throw ConfigError("discriminator.input_side must be a positive multiple of " +
                      std::to_string(side_multiple()));
  }
}

std::size_t generator_param_count(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t k2 = static_cast<std::size_t>(cfg.kernel) * cfg.kernel;
  auto conv = [&](std::size_t in, std::size_t out) { return in * out * k2 + out; };
  std::size_t total = conv(cfg.in_channels, cfg.width(0));
  for (int l = 1; l <= cfg.depth; ++l) total += conv(cfg.width(l - 1), cfg.width(l)) + 2 * cfg.width(l);
  for (int l = cfg.depth; l >= 1; --l) {
    const std::size_t in = l == cfg.depth ? cfg.width(l) : 2 * cfg.width(l);
    total += conv(in, cfg.width(l - 1)) + 2 * cfg.width(l - 1);
  }
  total += conv(2 * cfg.width(0), cfg.out_channels);
  return total;
}

std::size_t discriminator_param_count(const DiscriminatorConfig& cfg) {
  cfg.validate();
  const std::size_t k2 = static_cast<std::size_t>(cfg.kernel) * cfg.kernel;
  auto conv = [&](std::size_t in, std::size_t out) { return in * out * k2 + out; };
  std::size_t total = conv(cfg.in_channels, cfg.width(0)) + 2 * cfg.width(0);
  for (int b = 1; b <= cfg.block_count; ++b) {
    total += conv(cfg.width(b - 1), cfg.width(b)) + 2 * cfg.width(b);
  }
  const std::size_t side = cfg.final_side();
  total += static_cast<std::size_t>(cfg.width(cfg.block_count)) * side * side + 1;
  return total;
}

}  // namespace vstain::net
