#include "vstain/net/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "vstain/img/histogram.hpp"
#include "vstain/img/patch.hpp"
#include "vstain/img/tiling.hpp"
#include "vstain/metrics/quality.hpp"
#include "vstain/net/predict.hpp"

namespace vstain::net {

void TrainConfig::validate() const {
  adam.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (d_steps_per_g_step < 1) throw ConfigError("d_steps_per_g_step must be >= 1");
  if (patch_side < 1) throw ConfigError("patch_side must be >= 1");
  if (val_interval < 1) throw ConfigError("val_interval must be >= 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction must be in [0,1)");
  }
  if (val_overlap >= patch_side) throw ConfigError("val_overlap must be < patch_side");
}

SplitIndices split_dataset(const std::vector<int>& groups, double val_fraction,
                           std::uint64_t seed) {
  std::vector<int> distinct;
  for (int g : groups) {
    if (std::find(distinct.begin(), distinct.end(), g) == distinct.end()) distinct.push_back(g);
  }
  CounterRng rng = CounterRng(seed).split("split");
  for (std::size_t i = distinct.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(distinct[i - 1], distinct[j]);
  }
  std::size_t val_groups = 0;
  if (distinct.size() >= 2 && val_fraction > 0.0) {
    val_groups = static_cast<std::size_t>(std::llround(val_fraction * distinct.size()));
    val_groups = std::clamp<std::size_t>(val_groups, 1, distinct.size() - 1);
  }
  std::map<int, bool> is_val;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    is_val[distinct[i]] = i >= distinct.size() - val_groups;
  }
  SplitIndices out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    (is_val[groups[i]] ? out.val : out.train).push_back(i);
  }
  return out;
}

double validation_mae(Generator& generator, const PairDataset& data,
                      const std::vector<std::size_t>& indices, int tile_side, int overlap) {
  if (indices.empty()) throw DatasetError("no validation samples");
  double sum = 0.0;
  for (std::size_t i : indices) {
    const auto& fov = data.fovs[i];
    const img::ImageGrid pred =
        predict_fov(generator, fov, data.input_channels, tile_side, overlap);
    sum += metrics::mae(pred, fov.channel(data.target_channel));
  }
  return sum / static_cast<double>(indices.size());
}

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::string out = "step,l_mae,l_g,l_theta,d_loss\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g\n", r.step, r.l_mae, r.l_g, r.l_theta,
                  r.d_loss);
    out += buf;
  }
  return out;
}

namespace {

// Input channels optionally equalized; the target is left untouched.
PairDataset prepare(const PairDataset& data, bool equalize) {
  if (!equalize) return data;
  PairDataset out = data;
  for (auto& fov : out.fovs) {
    img::FieldOfView eq;
    for (const auto& [name, image] : fov.channels()) {
      const bool is_input = std::find(data.input_channels.begin(), data.input_channels.end(),
                                      name) != data.input_channels.end();
      eq.add(name, is_input ? img::histogram_equalize(image) : image);
    }
    fov = std::move(eq);
  }
  return out;
}

void check_dataset(const PairDataset& data, int patch_side) {
  if (data.fovs.empty()) throw DatasetError("training dataset is empty");
  if (data.groups.size() != data.fovs.size()) {
    throw DatasetError("dataset group list does not match the FOV list");
  }
  for (const auto& fov : data.fovs) {
    for (const auto& name : data.input_channels) {
      if (!fov.contains(name)) throw DatasetError("FOV is missing input channel '" + name + "'");
    }
    if (!fov.contains(data.target_channel)) {
      throw DatasetError("FOV is missing target channel '" + data.target_channel + "'");
    }
    if (fov.width() < patch_side || fov.height() < patch_side) {
      throw DimensionError("FOV " + std::to_string(fov.width()) + "x" +
                           std::to_string(fov.height()) + " is smaller than the patch side " +
                           std::to_string(patch_side));
    }
  }
}

struct Batch {
  Tensor inputs;
  Tensor target;
};

Batch sample_batch(const PairDataset& data, const std::vector<std::size_t>& pool, int batch,
                   int side, CounterRng& rng) {
  const int in = static_cast<int>(data.input_channels.size());
  Batch b{Tensor(batch, in, side, side), Tensor(batch, 1, side, side)};
  for (int i = 0; i < batch; ++i) {
    const auto& fov = data.fovs[pool[rng.below(pool.size())]];
    const img::CropResult crop = img::random_crop(fov, side, rng);
    const img::NormalizedPatch patch =
        img::augment(crop.patch, static_cast<int>(rng.below(img::kD4Size)));
    auto copy = [&](const std::string& name, float* dst) {
      const auto it = std::find(patch.names.begin(), patch.names.end(), name);
      const auto& values = patch.channels[it - patch.names.begin()];
      for (std::size_t k = 0; k < values.size(); ++k) dst[k] = static_cast<float>(values[k]);
    };
    for (int c = 0; c < in; ++c) copy(data.input_channels[c], b.inputs.channel(i, c));
    copy(data.target_channel, b.target.channel(i, 0));
  }
  return b;
}

bool finite_row(const HistoryRow& r) {
  return std::isfinite(r.l_mae) && std::isfinite(r.l_g) && std::isfinite(r.l_theta) &&
         std::isfinite(r.d_loss);
}

}  // namespace

TrainResult train_cgan(const PairDataset& raw, const GeneratorConfig& gen,
                       const DiscriminatorConfig& disc_cfg, const LossWeights& weights,
                       const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  weights.validate();
  gen.validate();
  gen.check_input_side(cfg.patch_side);
  check_dataset(raw, cfg.patch_side);
  if (static_cast<int>(raw.input_channels.size()) != gen.in_channels) {
    throw DimensionError("generator expects " + std::to_string(gen.in_channels) +
                         " input channels, dataset provides " +
                         std::to_string(raw.input_channels.size()));
  }
  const PairDataset data = prepare(raw, cfg.equalize_inputs);

  DiscriminatorConfig dcfg = disc_cfg;
  dcfg.input_side = cfg.patch_side;
  TrainResult result;
  result.model = ModelParams::build(gen, dcfg, data.input_channels, data.target_channel, cfg.seed);
  ModelParams& m = result.model;

  const SplitIndices split = split_dataset(data.groups, cfg.val_fraction, cfg.seed);
  result.train_count = split.train.size();
  result.val_count = split.val.size();
  const int overlap = cfg.val_overlap >= 0 ? cfg.val_overlap : img::default_overlap(cfg.patch_side);

  std::vector<float> best_g = m.generator_snapshot();
  std::vector<float> good_d = m.discriminator_snapshot();
  const CounterRng data_root = CounterRng(cfg.seed).split("batches");
  const MaeForm form = cfg.mae_form;
  const bool adversarial = cfg.adversarial && weights.lambda2 > 0.0;

  auto validate_now = [&](int step) {
    if (split.val.empty()) return;
    const double v = validation_mae(m.generator, data, split.val, cfg.patch_side, overlap);
    result.validation.push_back({step, v});
    if (!result.best_val_mae || v < *result.best_val_mae) {
      result.best_val_mae = v;
      result.best_step = step;
      best_g = m.generator_snapshot();
    }
  };

  for (int step = 1; step <= cfg.steps; ++step) {
    CounterRng rng = data_root.split(static_cast<std::uint64_t>(step));
    const Batch batch = sample_batch(data, split.train, cfg.batch_size, cfg.patch_side, rng);
    HistoryRow row;
    row.step = step;
    try {
      Tensor pred = m.generator.forward(batch.inputs, Mode::kTrain);
      pred.check_finite("generator output");

      if (adversarial) {
        for (int k = 0; k < cfg.d_steps_per_g_step; ++k) {
          m.discriminator.zero_grad();
          const auto real = m.discriminator.forward(batch.inputs, batch.target, Mode::kTrain);
          m.discriminator.backward(discriminator_real_logit_grad<float>(real.scores));
          const auto fake = m.discriminator.forward(batch.inputs, pred, Mode::kTrain);
          m.discriminator.backward(discriminator_fake_logit_grad<float>(fake.scores));
          row.d_loss = discriminator_loss<float>(real.scores, fake.scores);
          adam_step(m.discriminator.params(), m.discriminator_opt, cfg.adam);
        }
      }

      m.generator.zero_grad();
      const auto theta = m.generator.params();
      row.l_mae = pixel_loss(pred, batch.target, form);
      row.l_theta = l1_norm(theta);
      Tensor grad = pixel_loss_grad(pred, batch.target, form, weights.lambda1);
      if (adversarial) {
        const auto scored = m.discriminator.forward(batch.inputs, pred, Mode::kTrain);
        row.l_g = adversarial_loss<float>(scored.scores);
        const Tensor adv =
            m.discriminator.backward(adversarial_logit_grad<float>(scored.scores, weights.lambda2));
        add_into(grad, adv);
      }
      m.generator.backward(grad);
      add_l1_grad(theta, weights.lambda3);
      if (!finite_row(row)) throw NumericError("non-finite loss at step " + std::to_string(step));
      adam_step(theta, m.generator_opt, cfg.adam);
    } catch (const NumericError& e) {
      result.status = TrainStatus::kNumericAbort;
      result.message = e.what();
      m.restore_generator(best_g);
      m.restore_discriminator(good_d);
      return result;
    }
    result.history.push_back(row);
    if (progress) progress(row);
    if (step % cfg.val_interval == 0 || step == cfg.steps) {
      validate_now(step);
      good_d = m.discriminator_snapshot();
    }
  }
  if (result.best_val_mae) m.restore_generator(best_g);
  return result;
}

PairDataset af_pair_dataset(const std::vector<synth::AfSample>& samples, bool exclude_near_focus,
                            std::size_t* skipped) {
  PairDataset data;
  data.input_channels = {synth::kDefocusedChannel};
  data.target_channel = synth::kFocusedChannel;
  std::size_t skip = 0;
  for (const auto& s : samples) {
    if (exclude_near_focus && (s.near_focus || synth::is_near_focus(s.z))) {
      ++skip;
      continue;
    }
    img::FieldOfView fov;
    fov.add(synth::kDefocusedChannel, s.defocused);
    fov.add(synth::kFocusedChannel, s.focused);
    data.fovs.push_back(std::move(fov));
    data.groups.push_back(s.scene_index);
  }
  if (skipped) *skipped = skip;
  return data;
}

TrainResult train_af(const std::vector<synth::AfSample>& samples, const GeneratorConfig& gen,
                     const DiscriminatorConfig& disc, const LossWeights& weights,
                     const TrainConfig& cfg, bool exclude_near_focus, const ProgressFn& progress) {
  std::size_t skipped = 0;
  const PairDataset data = af_pair_dataset(samples, exclude_near_focus, &skipped);
  if (data.fovs.empty()) {
    throw DatasetError("autofocus dataset has no admissible samples (" +
                       std::to_string(skipped) + " near-focus samples skipped)");
  }
  TrainResult r = train_cgan(data, gen, disc, weights, cfg, progress);
  r.skipped = skipped;
  return r;
}

}  // namespace vstain::net
