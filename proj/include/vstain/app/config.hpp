#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vstain/metrics/error_index.hpp"
#include "vstain/net/architecture.hpp"
#include "vstain/net/loss.hpp"
#include "vstain/net/train.hpp"
#include "vstain/synth/psf.hpp"
#include "vstain/synth/scene.hpp"

namespace vstain::app {

// `key = value` lines grouped under `[section]` headers. Keys before the
// first header belong to the empty section. '#' and ';' start comments.
struct IniDocument {
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
  };
  std::vector<Entry> entries;
};

IniDocument parse_ini(const std::string& text);

struct SceneSection {
  std::string dataset = "channels";  // channels | af
  int count = 20;
  int bit_depth = 16;
  synth::SceneSpec spec;  // spec.seed is derived from the run seed
  std::vector<double> z_values{-8.0, -6.0, -4.0, 4.0, 6.0, 8.0};
  std::string near_focus = "reject";  // reject | flag
};

struct TrainSection {
  std::string task = "auto";         // auto | cgan | af
  std::string adversarial = "auto";  // auto | true | false
  bool exclude_near_focus = true;
  std::vector<std::string> input_channels{synth::kNucleusChannel, synth::kMembraneChannel};
  std::string target_channel = synth::kTargetChannel;
  net::TrainConfig options;
};

struct EvalSection {
  metrics::ErrorIndexOptions index;
  int mask_threshold = 50;
  int tile_side = 0;  // 0: the patch side stored in the checkpoint
  int overlap = -1;   // -1: a quarter of the tile side
};

struct RunConfig {
  std::uint64_t seed = 1;
  SceneSection scene;
  synth::PsfModel psf;
  net::GeneratorConfig generator;
  net::DiscriminatorConfig discriminator;
  net::LossWeights loss;
  TrainSection train;
  EvalSection eval;

  // Checks every section against the owning module; throws ConfigError.
  void validate() const;
};

// Unknown sections or keys, duplicates and malformed values are
// ConfigErrors naming the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every key with its resolved value, in a stable order; parses back to the
// same RunConfig.
std::string format_config(const RunConfig& config);

// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace vstain::app
