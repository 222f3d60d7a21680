#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vstain/app/config.hpp"
#include "vstain/metrics/quality.hpp"
#include "vstain/net/train.hpp"

namespace vstain::app {

struct RunContext {
  bool deterministic = true;
  std::ostream* log = nullptr;  // progress lines; nullptr for silence
};

// Renders the synthetic dataset selected by [scene] dataset into out.
// Returns the dataset file names.
std::vector<std::string> cmd_synth(const RunConfig& config, const std::filesystem::path& out,
                                   const RunContext& ctx = {});

struct TrainOutcome {
  std::string task;  // cgan | af
  net::TrainResult result;
};

// Trains on a dataset written by cmd_synth and writes checkpoint.bin,
// history.csv and validation.csv. A numeric abort still writes the last
// good checkpoint, then throws NumericError naming it.
TrainOutcome cmd_train(const RunConfig& config, const std::filesystem::path& data,
                       const std::filesystem::path& out, const RunContext& ctx = {});

// Predicts every FOV found in `input` (a dataset directory or a folder of
// <fov>_<channel>.pgm files) and writes <fov>_<target>.pgm into out.
// Missing input channels raise DimensionError with the counts.
std::vector<std::string> cmd_predict(const RunConfig& config,
                                     const std::filesystem::path& checkpoint,
                                     const std::filesystem::path& input,
                                     const std::filesystem::path& out,
                                     const RunContext& ctx = {});

struct EvalOutcome {
  std::vector<std::string> names;
  metrics::PairEvaluation evaluation;
  std::vector<double> tl;
  std::vector<int> argmin;
};

// Pairs prediction and ground-truth PGMs by file name. Ground-truth files
// are restricted to the channel suffixes present among the predictions;
// any unpaired name raises AlignmentError listing the orphans.
EvalOutcome cmd_eval(const RunConfig& config, const std::filesystem::path& pred,
                     const std::filesystem::path& gt, const std::filesystem::path& out,
                     const RunContext& ctx = {});

}  // namespace vstain::app
