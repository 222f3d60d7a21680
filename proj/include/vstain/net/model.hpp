#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vstain/net/adam.hpp"
#include "vstain/net/discriminator.hpp"
#include "vstain/net/generator.hpp"

namespace vstain::net {

// Generator and discriminator with their configs, the channel roles they
// were trained for, and the optimizer moments.
struct ModelParams {
  GeneratorConfig generator_config;
  DiscriminatorConfig discriminator_config;
  std::vector<std::string> input_channels;
  std::string target_channel;
  Generator generator;
  Discriminator discriminator;
  AdamState<float> generator_opt;
  AdamState<float> discriminator_opt;

  // Builds both networks and initializes them from `seed`. The
  // discriminator input channel count is derived from the generator.
  static ModelParams build(const GeneratorConfig& gen, DiscriminatorConfig disc,
                           std::vector<std::string> input_channels, std::string target_channel,
                           std::uint64_t seed);

  // Generator parameters followed by its batch-norm buffers, flattened.
  std::vector<float> generator_snapshot();
  void restore_generator(std::span<const float> flat);
  std::vector<float> discriminator_snapshot();
  void restore_discriminator(std::span<const float> flat);
};

inline constexpr char kCheckpointMagic[8] = {'V', 'S', 'T', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: 8-byte magic, u32 LE version, u32 LE text length, key=value text
// block, then little-endian float32 values: generator params, generator
// buffers, discriminator params, discriminator buffers, generator Adam m
// and v, discriminator Adam m and v. Every group is in declaration order.
std::vector<std::uint8_t> serialize_checkpoint(ModelParams& model);
ModelParams deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(ModelParams& model, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace vstain::net
