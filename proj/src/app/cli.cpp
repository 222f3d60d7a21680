#include "vstain/app/cli.hpp"

#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "vstain/app/commands.hpp"
#include "vstain/error.hpp"

namespace vstain::app {

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const DimensionError*>(&e)) return kExitShape;
  if (dynamic_cast<const AlignmentError*>(&e)) return kExitAlignment;
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Virtual staining toolkit: synthetic data, cGAN training, tiled prediction, evaluation",
               "vstain"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_flag("--deterministic", deterministic, "Serial data order (always on; recorded)");
  };

  auto* synth = app.add_subcommand("synth", "Render a synthetic dataset");
  common(synth);
  std::optional<std::string> kind;
  synth->add_option("--kind", kind, "channels | af")->check(CLI::IsMember({"channels", "af"}));

  auto* train = app.add_subcommand("train", "Train a generator on a dataset");
  common(train);
  std::string data_dir;
  std::optional<std::string> task;
  std::optional<int> steps;
  train->add_option("--data", data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--task", task, "cgan | af")->check(CLI::IsMember({"cgan", "af"}));
  train->add_option("--steps", steps, "Override the configured step count");

  auto* predict = app.add_subcommand("predict", "Tiled prediction of full FOVs");
  common(predict);
  std::string checkpoint, input_dir;
  std::optional<int> tile, overlap;
  predict->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  predict->add_option("--input", input_dir, "FOV directory")->required()->check(CLI::ExistingDirectory);
  predict->add_option("--tile", tile, "Tile side (default: training patch side)");
  predict->add_option("--overlap", overlap, "Tile overlap (default: tile / 4)");

  auto* eval = app.add_subcommand("eval", "Metrics, error-index curves and masks");
  common(eval);
  std::string pred_dir, gt_dir;
  std::optional<double> beta1, beta2;
  std::optional<std::string> mode;
  std::optional<int> mask_threshold;
  eval->add_option("--pred", pred_dir, "Predicted PGMs")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", gt_dir, "Ground-truth PGMs")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--beta1", beta1, "Weight of the intensity error");
  eval->add_option("--beta2", beta2, "Weight of the segmented-area error");
  eval->add_option("--mode", mode, "plain | signal_normalized");
  eval->add_option("--mask-threshold", mask_threshold, "8-bit error threshold of the masks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty() ? parse_config("") : load_config(config_path);
    if (seed) config.seed = *seed;
    if (kind) config.scene.dataset = *kind;
    if (task) config.train.task = *task;
    if (steps) config.train.options.steps = *steps;
    if (tile) config.eval.tile_side = *tile;
    if (overlap) config.eval.overlap = *overlap;
    if (beta1) config.eval.index.beta1 = *beta1;
    if (beta2) config.eval.index.beta2 = *beta2;
    if (mode) config.eval.index.mode = metrics::parse_mode(*mode);
    if (mask_threshold) config.eval.mask_threshold = *mask_threshold;

    RunContext ctx;
    ctx.deterministic = true;
    ctx.log = &out;
    if (*synth) cmd_synth(config, out_dir, ctx);
    if (*train) cmd_train(config, data_dir, out_dir, ctx);
    if (*predict) cmd_predict(config, checkpoint, input_dir, out_dir, ctx);
    if (*eval) cmd_eval(config, pred_dir, gt_dir, out_dir, ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace vstain::app
