#include "vstain/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "vstain/app/manifest.hpp"
#include "vstain/error.hpp"
#include "vstain/img/pgm.hpp"
#include "vstain/img/tiling.hpp"
#include "vstain/metrics/error_index.hpp"
#include "vstain/net/model.hpp"
#include "vstain/net/predict.hpp"
#include "vstain/synth/autofocus.hpp"
#include "vstain/synth/dataset_io.hpp"

namespace vstain::app {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

void write_text(const fs::path& path, const std::string& text) {
  img::write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void prepare_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw Error("cannot create output directory " + out.string());
}

void finish(const fs::path& out, const std::string& command, const RunConfig& config,
            const RunContext& ctx, std::vector<std::string> inputs, Clock::time_point start) {
  const std::string resolved = format_config(config);
  write_text(out / kResolvedConfigName, resolved);
  RunManifest m;
  m.command = command;
  m.config_hash = fnv1a_hex(resolved);
  m.seed = config.seed;
  m.deterministic = ctx.deterministic;
  m.inputs = std::move(inputs);
  m.duration_s = std::chrono::duration<double>(Clock::now() - start).count();
  write_run_manifest(out, std::move(m));
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// "<fov>_<channel>.pgm" split at the last underscore.
bool split_channel_file(const fs::path& p, std::string& fov, std::string& channel) {
  if (p.extension() != ".pgm") return false;
  const std::string stem = p.stem().string();
  const auto cut = stem.rfind('_');
  if (cut == std::string::npos || cut == 0 || cut + 1 == stem.size()) return false;
  fov = stem.substr(0, cut);
  channel = stem.substr(cut + 1);
  return true;
}

std::vector<std::string> pgm_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") {
      names.push_back(e.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

std::vector<std::string> cmd_synth(const RunConfig& config, const fs::path& out,
                                   const RunContext& ctx) {
  const auto start = Clock::now();
  config.validate();
  prepare_out(out);
  std::vector<std::string> files;
  if (config.scene.dataset == "channels") {
    std::vector<img::FieldOfView> fovs;
    for (int i = 0; i < config.scene.count; ++i) {
      synth::SceneSpec spec = config.scene.spec;
      spec.seed = synth::scene_seed(config.seed, static_cast<std::uint64_t>(i));
      fovs.push_back(synth::render_channels(synth::gen_scene(spec), spec));
    }
    files = synth::write_channel_dataset(out, config.seed, fovs, config.scene.bit_depth);
  } else {
    synth::SceneSpec spec = config.scene.spec;
    spec.seed = config.seed;
    const auto policy = config.scene.near_focus == "flag" ? synth::NearFocusPolicy::kFlag
                                                          : synth::NearFocusPolicy::kReject;
    const auto samples =
        synth::make_af_dataset(spec, config.scene.count, config.scene.z_values, config.psf, policy);
    files = synth::write_af_dataset(out, config.seed, samples, config.scene.bit_depth);
  }
  if (ctx.log) *ctx.log << "wrote " << files.size() << " files to " << out.string() << "\n";
  finish(out, "synth", config, ctx, {}, start);
  return files;
}

TrainOutcome cmd_train(const RunConfig& input_config, const fs::path& data, const fs::path& out,
                       const RunContext& ctx) {
  const auto start = Clock::now();
  RunConfig config = input_config;
  const synth::DatasetManifest manifest = synth::read_manifest(data);
  const std::string kind = manifest.kind == synth::DatasetKind::kChannels ? "cgan" : "af";
  if (config.train.task == "auto") config.train.task = kind;
  if (config.train.task != kind) {
    throw DatasetError("task " + config.train.task + " does not match the dataset in " +
                       data.string() + " (" + kind + ")");
  }
  const bool af = config.train.task == "af";
  if (config.train.adversarial == "auto") config.train.adversarial = af ? "false" : "true";
  if (af) {
    config.train.input_channels = {synth::kDefocusedChannel};
    config.train.target_channel = synth::kFocusedChannel;
  }
  config.validate();
  prepare_out(out);

  net::TrainConfig opts = config.train.options;
  opts.seed = config.seed;
  opts.adversarial = config.train.adversarial == "true";
  net::GeneratorConfig gen = config.generator;
  gen.in_channels = static_cast<int>(config.train.input_channels.size());

  std::vector<std::string> inputs{file_record(data / synth::kManifestName, synth::kManifestName)};
  for (const auto& e : manifest.entries) {
    for (const auto& c : manifest.channels) {
      const std::string name = synth::channel_file_name(e.fov, c);
      inputs.push_back(file_record(data / name, name));
    }
  }

  const int report_every = std::max(1, opts.val_interval);
  net::ProgressFn progress;
  if (ctx.log) {
    progress = [&](const net::HistoryRow& r) {
      if (r.step % report_every == 0 || r.step == opts.steps) {
        *ctx.log << "step " << r.step << " l_mae " << fmt("%.5f", r.l_mae) << " l_g "
                 << fmt("%.5f", r.l_g) << " d_loss " << fmt("%.5f", r.d_loss) << "\n";
      }
    };
  }

  TrainOutcome outcome;
  outcome.task = config.train.task;
  if (af) {
    std::vector<synth::AfSample> samples;
    for (const auto& e : manifest.entries) {
      const img::FieldOfView fov = synth::load_fov(data, manifest, e);
      samples.push_back({fov.channel(synth::kDefocusedChannel), fov.channel(synth::kFocusedChannel),
                         e.z, e.near_focus, e.scene_index});
    }
    outcome.result = net::train_af(samples, gen, config.discriminator, config.loss, opts,
                                   config.train.exclude_near_focus, progress);
  } else {
    net::PairDataset pairs;
    pairs.input_channels = config.train.input_channels;
    pairs.target_channel = config.train.target_channel;
    for (const auto& e : manifest.entries) {
      pairs.fovs.push_back(synth::load_fov(data, manifest, e));
      pairs.groups.push_back(e.scene_index);
    }
    outcome.result = net::train_cgan(pairs, gen, config.discriminator, config.loss, opts, progress);
  }
  net::TrainResult& r = outcome.result;

  const fs::path checkpoint = out / "checkpoint.bin";
  net::save_checkpoint(r.model, checkpoint);
  write_text(out / "history.csv", net::history_csv(r.history));
  std::string val = "step,val_mae\n";
  for (const auto& v : r.validation) val += std::to_string(v.step) + fmt(",%.9g", v.mae) + "\n";
  write_text(out / "validation.csv", val);
  finish(out, "train", config, ctx, std::move(inputs), start);

  if (r.status == net::TrainStatus::kNumericAbort) {
    throw NumericError("training aborted: " + r.message + "; last good checkpoint kept at " +
                       checkpoint.string());
  }
  if (ctx.log) {
    *ctx.log << "trained " << r.history.size() << " steps on " << r.train_count
             << " FOVs (" << r.val_count << " held out";
    if (r.skipped) *ctx.log << ", " << r.skipped << " near-focus skipped";
    *ctx.log << ")";
    if (r.best_val_mae) {
      *ctx.log << "; best validation MAE " << fmt("%.5f", *r.best_val_mae) << " at step "
               << r.best_step;
    }
    *ctx.log << "\n";
  }
  return outcome;
}

std::vector<std::string> cmd_predict(const RunConfig& input_config, const fs::path& checkpoint,
                                     const fs::path& input, const fs::path& out,
                                     const RunContext& ctx) {
  const auto start = Clock::now();
  RunConfig config = input_config;
  net::ModelParams model = net::load_checkpoint(checkpoint);
  const int tile = config.eval.tile_side > 0 ? config.eval.tile_side
                                             : model.discriminator_config.input_side;
  const int overlap = config.eval.overlap >= 0 ? config.eval.overlap : img::default_overlap(tile);
  config.eval.tile_side = tile;
  config.eval.overlap = overlap;
  config.validate();

  // FOV name -> channels present in the input directory.
  std::map<std::string, std::vector<std::string>> fovs;
  if (fs::exists(input / synth::kManifestName)) {
    const auto manifest = synth::read_manifest(input);
    for (const auto& e : manifest.entries) fovs[e.fov] = manifest.channels;
  } else {
    for (const auto& name : pgm_names(input)) {
      std::string fov, channel;
      if (split_channel_file(name, fov, channel)) fovs[fov].push_back(channel);
    }
  }
  if (fovs.empty()) throw DatasetError("no FOVs found in " + input.string());

  const auto& needed = model.input_channels;
  for (const auto& [fov, channels] : fovs) {
    std::size_t present = 0;
    for (const auto& c : needed) present += std::count(channels.begin(), channels.end(), c);
    if (present != needed.size()) {
      throw DimensionError("checkpoint expects " + std::to_string(needed.size()) +
                           " input channels (" + join(needed) + ") but FOV '" + fov +
                           "' provides " + std::to_string(present) + " of them (has " +
                           std::to_string(channels.size()) + ": " + join(channels) + ")");
    }
  }

  prepare_out(out);
  std::vector<std::string> inputs{file_record(checkpoint, checkpoint.filename().string())};
  std::vector<std::string> written;
  for (const auto& [fov_name, channels] : fovs) {
    img::FieldOfView fov;
    for (const auto& c : needed) {
      const std::string name = synth::channel_file_name(fov_name, c);
      fov.add(c, img::read_pgm_file(input / name));
      inputs.push_back(file_record(input / name, name));
    }
    const img::ImageGrid pred = net::predict_fov(model.generator, fov, needed, tile, overlap);
    const std::string name = synth::channel_file_name(fov_name, model.target_channel);
    img::write_pgm_file(out / name, pred, pred.source_bit_depth());
    written.push_back(name);
  }
  if (ctx.log) *ctx.log << "predicted " << written.size() << " FOVs into " << out.string() << "\n";
  finish(out, "predict", config, ctx, std::move(inputs), start);
  return written;
}

EvalOutcome cmd_eval(const RunConfig& config, const fs::path& pred, const fs::path& gt,
                     const fs::path& out, const RunContext& ctx) {
  const auto start = Clock::now();
  config.validate();
  const auto pred_names = pgm_names(pred);
  if (pred_names.empty()) throw DatasetError("no prediction PGMs in " + pred.string());

  std::set<std::string> suffixes;
  for (const auto& n : pred_names) {
    std::string fov, channel;
    suffixes.insert(split_channel_file(n, fov, channel) ? channel : fs::path(n).stem().string());
  }
  std::vector<std::string> gt_names;
  for (const auto& n : pgm_names(gt)) {
    std::string fov, channel;
    const std::string key = split_channel_file(n, fov, channel) ? channel : fs::path(n).stem().string();
    if (suffixes.count(key)) gt_names.push_back(n);
  }
  std::vector<std::string> orphans;
  std::set_symmetric_difference(pred_names.begin(), pred_names.end(), gt_names.begin(),
                                gt_names.end(), std::back_inserter(orphans));
  if (!orphans.empty()) {
    throw AlignmentError("prediction and ground-truth files do not pair up; orphans: " +
                         join(orphans));
  }

  prepare_out(out);
  fs::create_directories(out / "curves");
  fs::create_directories(out / "masks");
  EvalOutcome outcome;
  outcome.names = pred_names;
  std::vector<img::ImageGrid> preds, gts;
  std::vector<std::string> inputs;
  for (const auto& n : pred_names) {
    preds.push_back(img::read_pgm_file(pred / n));
    gts.push_back(img::read_pgm_file(gt / n));
    inputs.push_back(file_record(pred / n, "pred/" + n));
    inputs.push_back(file_record(gt / n, "gt/" + n));
  }
  outcome.evaluation = metrics::evaluate_pairs(preds, gts);

  std::string csv = "image,mae,psnr,ssim,tl,argmin\n";
  double tl_sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::string stem = fs::path(pred_names[i]).stem().string();
    const auto curve = metrics::error_index(preds[i], gts[i], config.eval.index);
    write_text(out / "curves" / (stem + ".csv"), metrics::curve_csv(curve));
    const auto mask = metrics::error_mask(preds[i], gts[i], config.eval.mask_threshold);
    img::write_pgm_file(out / "masks" / (stem + "_mask.pgm"), metrics::mask_image(mask), 8);
    img::write_ppm_file(out / "masks" / (stem + "_overlay.ppm"), mask.width, mask.height,
                        metrics::mask_overlay_rgb(mask, preds[i]));
    outcome.tl.push_back(curve.tl);
    outcome.argmin.push_back(curve.argmin_threshold);
    tl_sum += curve.tl;

    const auto& rep = outcome.evaluation.reports[i];
    csv += pred_names[i] + fmt(",%.9g", rep.mae) +
           (std::isinf(rep.psnr) ? std::string(",inf") : fmt(",%.9g", rep.psnr)) +
           (rep.ssim ? fmt(",%.9g", *rep.ssim) : std::string(",na")) + fmt(",%.9g", curve.tl) +
           "," + std::to_string(curve.argmin_threshold) + "\n";
  }
  write_text(out / "metrics.csv", csv);

  const auto& ev = outcome.evaluation;
  auto maybe = [](double v) { return std::isnan(v) ? std::string("na") : fmt("%.9g", v); };
  std::string summary;
  summary += "count=" + std::to_string(preds.size()) + "\n";
  summary += "mean_mae=" + fmt("%.9g", ev.mean_mae) + "\n";
  summary += "mean_psnr=" + maybe(ev.mean_psnr) + "\n";
  summary += "infinite_psnr_count=" + std::to_string(ev.infinite_psnr_count) + "\n";
  summary += "mean_ssim=" + maybe(ev.mean_ssim) + "\n";
  summary += "undefined_ssim_count=" + std::to_string(ev.undefined_ssim_count) + "\n";
  summary += "mean_tl=" + fmt("%.9g", tl_sum / static_cast<double>(preds.size())) + "\n";
  summary += "mask_threshold=" + std::to_string(config.eval.mask_threshold) + "\n";
  write_text(out / "summary.txt", summary);
  if (ctx.log) *ctx.log << summary;
  finish(out, "eval", config, ctx, std::move(inputs), start);
  return outcome;
}

}  // namespace vstain::app
