#pragma once

#include <cstddef>
#include <string>

namespace vstain::net {

// U-Net style generator: a stride-2 stem convolution, `depth` encoder
// blocks (LeakyReLU, stride-2 conv, batch norm), `depth` decoder blocks
// (ReLU, stride-2 transposed conv, batch norm) each followed by
// concatenation with the matching encoder output, and a ReLU, transposed
// conv, Tanh head. Level l has base_width * 2^l channels.
struct GeneratorConfig {
  int in_channels = 2;
  int out_channels = 1;
  int depth = 3;
  int base_width = 16;
  int kernel = 3;
  double leaky_slope = 0.2;

  void validate() const;
  int width(int level) const noexcept { return base_width << level; }
  // Spatial sides must be divisible by this.
  int side_multiple() const noexcept { return 1 << (depth + 1); }
  void check_input_side(int side) const;
};

// Conditional discriminator: stride-2 stem conv + batch norm, block_count
// blocks (stride-2 conv, batch norm, LeakyReLU), one fully connected layer
// and a sigmoid. in_channels counts the conditioning images plus the
// candidate image.
struct DiscriminatorConfig {
  int in_channels = 3;
  int input_side = 32;
  int base_width = 16;
  int kernel = 5;
  int block_count = 3;
  double leaky_slope = 0.2;

  void validate() const;
  int width(int level) const noexcept { return base_width << level; }
  int side_multiple() const noexcept { return 1 << (block_count + 1); }
  int final_side() const noexcept { return input_side >> (block_count + 1); }
};

// Standard deviation of the N(0, s^2) weight initialization.
inline constexpr double kInitStddev = 0.02;

std::size_t generator_param_count(const GeneratorConfig& cfg);
std::size_t discriminator_param_count(const DiscriminatorConfig& cfg);

}  // namespace vstain::net
