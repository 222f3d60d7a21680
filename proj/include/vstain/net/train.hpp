#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vstain/img/image.hpp"
#include "vstain/net/loss.hpp"
#include "vstain/net/model.hpp"
#include "vstain/synth/autofocus.hpp"
#include "vstain/synth/dataset_io.hpp"

namespace vstain::net {

struct TrainConfig {
  AdamConfig adam;
  int batch_size = 8;
  int steps = 2000;
  std::uint64_t seed = 1;
  bool adversarial = true;
  int d_steps_per_g_step = 1;
  int patch_side = 32;
  int val_interval = 100;
  double val_fraction = 0.1;
  int val_overlap = -1;  // -1: default_overlap(patch_side)
  MaeForm mae_form = MaeForm::kDifference;
  bool equalize_inputs = false;

  void validate() const;
};

// Training pairs: every FOV holds the input channels and the target
// channel. `group` keeps related FOVs (one scene at several z) on the same
// side of the train/validation split.
struct PairDataset {
  std::vector<std::string> input_channels;
  std::string target_channel;
  std::vector<img::FieldOfView> fovs;
  std::vector<int> groups;
};

struct HistoryRow {
  int step = 0;
  double l_mae = 0.0;
  double l_g = 0.0;
  double l_theta = 0.0;
  double d_loss = 0.0;
};

struct ValidationPoint {
  int step = 0;
  double mae = 0.0;
};

enum class TrainStatus { kOk, kNumericAbort };

struct TrainResult {
  ModelParams model;
  std::vector<HistoryRow> history;
  std::vector<ValidationPoint> validation;
  std::optional<double> best_val_mae;
  int best_step = 0;
  TrainStatus status = TrainStatus::kOk;
  std::string message;
  std::size_t train_count = 0;
  std::size_t val_count = 0;
  std::size_t skipped = 0;  // near-focus samples dropped by train_af
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

// Seeded shuffle of the distinct groups; the last val_fraction of them
// (at least one when there are two or more groups) go to validation.
SplitIndices split_dataset(const std::vector<int>& groups, double val_fraction, std::uint64_t seed);

// Optional progress callback, called after every step.
using ProgressFn = std::function<void(const HistoryRow&)>;

TrainResult train_cgan(const PairDataset& data, const GeneratorConfig& gen,
                       const DiscriminatorConfig& disc, const LossWeights& weights,
                       const TrainConfig& cfg, const ProgressFn& progress = {});

// Autofocus variant: one input channel (the defocused image) predicting the
// focused one. Near-focus samples are dropped when `exclude_near_focus` and
// counted in TrainResult::skipped.
TrainResult train_af(const std::vector<synth::AfSample>& samples, const GeneratorConfig& gen,
                     const DiscriminatorConfig& disc, const LossWeights& weights,
                     const TrainConfig& cfg, bool exclude_near_focus = true,
                     const ProgressFn& progress = {});

PairDataset af_pair_dataset(const std::vector<synth::AfSample>& samples, bool exclude_near_focus,
                            std::size_t* skipped = nullptr);

// Mean unit-scale MAE of tiled predictions over the given FOVs.
double validation_mae(Generator& generator, const PairDataset& data,
                      const std::vector<std::size_t>& indices, int tile_side, int overlap);

std::string history_csv(const std::vector<HistoryRow>& history);

}  // namespace vstain::net
