// Acceptance run: one PASS/FAIL line per criterion. Pass criterion names as
// arguments to run a subset. Exit status is 0 only when everything passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../gradcheck.hpp"
#include "../support.hpp"
#include "vstain/app/cli.hpp"
#include "vstain/app/commands.hpp"
#include "vstain/app/config.hpp"
#include "vstain/app/manifest.hpp"
#include "vstain/error.hpp"
#include "vstain/img/pgm.hpp"
#include "vstain/img/tiling.hpp"
#include "vstain/metrics/correlation.hpp"
#include "vstain/metrics/error_index.hpp"
#include "vstain/metrics/quality.hpp"
#include "vstain/net/loss.hpp"
#include "vstain/net/predict.hpp"
#include "vstain/synth/autofocus.hpp"
#include "vstain/synth/dataset_io.hpp"

using namespace vstain;
using vstain::testing::Lcg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "vstain_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Image with integer 8-bit levels, so quantization is exact.
img::ImageGrid level_image(Lcg& rng, int w, int h, int max_level = 255) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = rng.below(static_cast<std::uint64_t>(max_level) + 1) / 255.0;
  return img::ImageGrid(w, h, std::move(v));
}

std::vector<int> levels(const img::ImageGrid& im) {
  std::vector<int> out;
  for (double v : im.values()) out.push_back(static_cast<int>(std::floor(v * 255.0 + 0.5)));
  return out;
}

// --- criteria ---------------------------------------------------------------

Outcome metric_identities() {
  Lcg rng(101);
  const auto start = std::chrono::steady_clock::now();
  double worst_ssim = 0.0, worst_psnr = 0.0, worst_mae = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int w = 16 + rng.below(49), h = 16 + rng.below(49);
    const img::ImageGrid a = vstain::testing::random_image(rng, w, h);
    worst_ssim = std::max(worst_ssim, std::abs(metrics::ssim(a, a) - 1.0));
    worst_mae = std::max(worst_mae, metrics::mae(a, a));

    const double d = 0.01 + 0.3 * rng.uniform();
    std::vector<double> base(a.size()), shifted(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      base[i] = (1.0 - d) * a.values()[i];
      shifted[i] = base[i] + d;
    }
    const img::ImageGrid x(w, h, base), y(w, h, shifted);
    const double expected = -20.0 * std::log10(metrics::mae(x, y));
    worst_psnr = std::max(worst_psnr, std::abs(metrics::psnr(x, y) - expected));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = worst_ssim <= 1e-9 && worst_mae == 0.0 && worst_psnr <= 1e-6 && secs < 5.0;
  return {pass, fmt("200 pairs: max|ssim(a,a)-1| %.2e, max mae(a,a) %.1e, max psnr gap %.2e dB, %.2f s",
                    worst_ssim, worst_mae, worst_psnr, secs)};
}

Outcome error_index_oracle() {
  Lcg rng(202);
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const img::ImageGrid p = level_image(rng, 8, 8), g = level_image(rng, 8, 8);
    metrics::ErrorIndexOptions opt;
    if (t % 2) {
      opt.beta1 = 2.0 * rng.uniform();
      opt.beta2 = 2.0 * rng.uniform();
    }
    const auto curve = metrics::error_index(p, g, opt);

    // Brute force: every threshold scans every pixel.
    const auto lp = levels(p), lg = levels(g);
    const double n = 64.0;
    double tl = 0.0;
    int argmin = 0;
    for (int i = 0; i <= 252; ++i) {
      long long mass = 0, above = 0;
      for (int k = 0; k < 64; ++k) {
        const int e = std::abs(lp[k] - lg[k]);
        if (e <= i) mass += e;
        else ++above;
      }
      const double ie = static_cast<double>(mass) / (n * 255.0);
      const double se = static_cast<double>(above) / n;
      const double total = opt.beta1 * ie + opt.beta2 * se;
      if (i == 0 || total < tl) {
        tl = total;
        argmin = i;
      }
      if (curve.thresholds[i] != i || curve.ie[i] != ie || curve.se[i] != se ||
          curve.total[i] != total) {
        ++mismatches;
      }
    }
    if (curve.thresholds.size() != 253 || curve.tl != tl || curve.argmin_threshold != argmin) {
      ++mismatches;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {mismatches == 0 && secs < 5.0,
          fmt("50 random 8x8 pairs x 253 rows: %.0f mismatches, %.2f s", mismatches, secs)};
}

Outcome index_monotonicity() {
  Lcg rng(303);
  int violations = 0;
  for (int t = 0; t < 200; ++t) {
    const int w = 4 + rng.below(37), h = 4 + rng.below(37);
    const img::ImageGrid p = level_image(rng, w, h), g = level_image(rng, w, h);
    const auto c = metrics::error_index(p, g);
    const double n = static_cast<double>(w) * h;
    for (int i = 0; i <= 252; ++i) {
      if (i > 0 && (c.ie[i] < c.ie[i - 1] || c.se[i] > c.se[i - 1])) ++violations;
      const auto mask = metrics::error_mask(p, g, i);
      if (static_cast<double>(mask.count()) / n != c.se[i]) ++violations;
    }
  }
  return {violations == 0,
          fmt("200 random pairs x 253 thresholds: %.0f violations (IE order, SE order, mask count)",
              violations)};
}

Outcome gradient_checks() {
  const auto start = std::chrono::steady_clock::now();
  const auto suite = vstain::testing::grad::full_suite(20);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double worst = 0.0;
  std::string worst_layer;
  bool enough = true;
  for (const auto& r : suite) {
    enough = enough && r.errors.size() >= 20;
    for (double e : r.errors) {
      if (e >= worst) {
        worst = e;
        worst_layer = r.layer;
      }
    }
  }
  return {enough && worst < 1e-4 && secs < 60.0,
          fmt("%.0f layer types x 20 instances, worst relative error %.2e", suite.size(), worst) +
              " (" + worst_layer + ")" + fmt(", %.1f s", secs)};
}

Outcome stitching_partition() {
  Lcg rng(404);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int tile = 2 + rng.below(15);
    const int overlap = rng.below(static_cast<std::uint64_t>(tile));
    const int w = tile + rng.below(50), h = tile + rng.below(50);
    const double c = rng.uniform();
    const img::TileLayout layout = img::tile_plan(w, h, tile, overlap);
    std::vector<img::ImageGrid> tiles(
        layout.origins.size(),
        img::ImageGrid(tile, tile, std::vector<double>(static_cast<std::size_t>(tile) * tile, c)));
    const img::ImageGrid out = img::stitch(tiles, layout);
    for (double v : out.values()) worst = std::max(worst, std::abs(v - c));
  }
  long long layouts = 0, bad = 0;
  for (int w = 1; w <= 32; ++w) {
    for (int h = 1; h <= 32; ++h) {
      for (int tile = 1; tile <= std::min({8, w, h}); ++tile) {
        for (int ov = 0; ov < tile; ++ov) {
          ++layouts;
          const img::TileLayout l = img::tile_plan(w, h, tile, ov);
          std::vector<int> hit(static_cast<std::size_t>(w) * h, 0);
          bool ok = true;
          for (const auto& o : l.origins) {
            if (o.row < 0 || o.col < 0 || o.row + tile > h || o.col + tile > w) {
              ok = false;
              continue;
            }
            for (int r = 0; r < tile; ++r) {
              for (int col = 0; col < tile; ++col) ++hit[(o.row + r) * w + o.col + col];
            }
          }
          ok = ok && std::all_of(hit.begin(), hit.end(), [](int k) { return k > 0; });
          bad += ok ? 0 : 1;
        }
      }
    }
  }
  return {worst <= 1e-9 && bad == 0,
          fmt("100 random layouts: max deviation %.2e; %.0f exhaustive layouts, %.0f uncovered",
              worst, static_cast<double>(layouts), static_cast<double>(bad))};
}

Outcome channel_prediction() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = scratch("channels");
  const app::RunConfig cfg = app::load_config(std::string(VSTAIN_CONFIG_DIR) + "/channels.ini");
  app::cmd_synth(cfg, dir / "data");
  app::TrainOutcome trained = app::cmd_train(cfg, dir / "data", dir / "train");
  net::TrainResult& r = trained.result;

  // Held out twice over: the validation scenes of the run and fresh scenes.
  const auto manifest = synth::read_manifest(dir / "data");
  std::vector<int> groups;
  for (const auto& e : manifest.entries) groups.push_back(e.scene_index);
  const auto split = net::split_dataset(groups, cfg.train.options.val_fraction, cfg.seed);
  const int tile = cfg.train.options.patch_side;
  std::vector<img::ImageGrid> vp, vg, fp, fg;
  for (std::size_t i : split.val) {
    const auto fov = synth::load_fov(dir / "data", manifest, manifest.entries[i]);
    vp.push_back(net::predict_fov(r.model.generator, fov, cfg.train.input_channels, tile,
                                  img::default_overlap(tile)));
    vg.push_back(fov.channel(cfg.train.target_channel));
  }
  for (int i = 0; i < 10; ++i) {
    synth::SceneSpec spec = cfg.scene.spec;
    spec.seed = synth::scene_seed(cfg.seed + 1000, static_cast<std::uint64_t>(i));
    const auto fov = synth::render_channels(synth::gen_scene(spec), spec);
    fp.push_back(net::predict_fov(r.model.generator, fov, cfg.train.input_channels, tile,
                                  img::default_overlap(tile)));
    fg.push_back(fov.channel(cfg.train.target_channel));
  }
  const auto val = metrics::evaluate_pairs(vp, vg);
  const auto fresh = metrics::evaluate_pairs(fp, fg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = r.status == net::TrainStatus::kOk && cfg.train.options.steps <= 5000 &&
                    val.mean_ssim > 0.8 && val.mean_mae < 0.03 && fresh.mean_ssim > 0.8 &&
                    fresh.mean_mae < 0.03 && secs < 900.0;
  return {pass, fmt("%.0f steps; validation scenes SSIM %.4f MAE %.4f; ", cfg.train.options.steps,
                    val.mean_ssim, val.mean_mae) +
                    fmt("10 fresh scenes SSIM %.4f MAE %.4f; %.0f s", fresh.mean_ssim,
                        fresh.mean_mae, secs)};
}

Outcome autofocus() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = scratch("af");
  const app::RunConfig cfg = app::load_config(std::string(VSTAIN_CONFIG_DIR) + "/af.ini");
  app::cmd_synth(cfg, dir / "data");
  app::TrainOutcome trained = app::cmd_train(cfg, dir / "data", dir / "train");
  net::TrainResult& r = trained.result;

  synth::SceneSpec spec = cfg.scene.spec;
  spec.seed = cfg.seed + 1000;
  const auto held = synth::make_af_dataset(spec, 5, cfg.scene.z_values, cfg.psf);
  const int tile = cfg.train.options.patch_side;
  std::vector<img::ImageGrid> pred, input, focused;
  for (const auto& s : held) {
    img::FieldOfView fov;
    fov.add(synth::kDefocusedChannel, s.defocused);
    pred.push_back(net::predict_fov(r.model.generator, fov, {synth::kDefocusedChannel}, tile,
                                    img::default_overlap(tile)));
    input.push_back(s.defocused);
    focused.push_back(s.focused);
  }
  const auto p = metrics::evaluate_pairs(pred, focused);
  const auto b = metrics::evaluate_pairs(input, focused);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double gain = p.mean_psnr - b.mean_psnr;
  const bool pass = r.status == net::TrainStatus::kOk && gain >= 2.0 &&
                    p.mean_ssim > b.mean_ssim && secs < 900.0;
  return {pass, fmt("%.0f held-out pairs: PSNR %.2f vs input %.2f dB (gain %.2f); ",
                    static_cast<double>(held.size()), p.mean_psnr, b.mean_psnr, gain) +
                    fmt("SSIM %.4f vs input %.4f; %.0f s", p.mean_ssim, b.mean_ssim, secs)};
}

Outcome loss_arithmetic() {
  net::BasicTensor<double> pred(1, 1, 2, 2, 0.5), target(1, 1, 2, 2, 0.4);
  net::Param<double> w("w", 4);
  w.value = {2.5, -2.5, 4.0, -1.0};
  const std::vector<double> half{0.5};
  const double hand = 0.99 * 0.1 + 0.01 * std::log(2.0) + 0.001 * 10.0;
  const auto terms =
      net::generator_loss<double>(pred, target, half, {&w}, {}, net::MaeForm::kDifference);
  const double example_gap = std::abs(terms.total - hand);

  Lcg rng(505);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int wd = 2 + rng.below(20), ht = 2 + rng.below(20);
    const img::ImageGrid a = vstain::testing::random_image(rng, wd, ht);
    const img::ImageGrid b = vstain::testing::random_image(rng, wd, ht);
    net::BasicTensor<double> pa(1, 1, ht, wd), pb(1, 1, ht, wd);
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa.data()[i] = 2.0 * a.values()[i] - 1.0;
      pb.data()[i] = 2.0 * b.values()[i] - 1.0;
    }
    const auto only = net::generator_loss<double>(pa, pb, {}, {}, {1.0, 0.0, 0.0},
                                                  net::MaeForm::kDifference);
    const double m = metrics::mae(a, b);
    worst = std::max(worst, std::abs(only.total / 2.0 - m) / m);
  }
  return {example_gap <= 1e-9 && worst <= 1e-12,
          fmt("example total %.12f (hand %.12f, gap %.1e); lambda=(1,0,0) vs 2*MAE max rel gap %.1e",
              terms.total, hand, example_gap, worst)};
}

Outcome determinism() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = scratch("determinism");
  const std::string cfg = std::string(VSTAIN_CONFIG_DIR) + "/smoke.ini";
  std::ostringstream sink;
  for (const char* side : {"a", "b"}) {
    const fs::path root = dir / side;
    const std::vector<std::vector<std::string>> steps = {
        {"synth", "--config", cfg, "--out", (root / "data").string(), "--deterministic"},
        {"train", "--config", cfg, "--data", (root / "data").string(), "--out",
         (root / "train").string(), "--deterministic"},
        {"predict", "--config", cfg, "--checkpoint", (root / "train" / "checkpoint.bin").string(),
         "--input", (root / "data").string(), "--out", (root / "pred").string()},
        {"eval", "--config", cfg, "--pred", (root / "pred").string(), "--gt",
         (root / "data").string(), "--out", (root / "eval").string()},
    };
    for (const auto& args : steps) {
      const int code = app::run_cli(args, sink, sink);
      if (code != 0) return {false, "vstain " + args[0] + " exited with " + std::to_string(code)};
    }
  }
  auto strip = [](const std::vector<std::uint8_t>& bytes) {
    std::string out;
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("duration_s=", 0) != 0) out += line + "\n";
    }
    return out;
  };
  long long files = 0, differing = 0;
  for (const char* stage : {"data", "train", "pred", "eval"}) {
    const auto a = app::inventory(dir / "a" / stage);
    const auto b = app::inventory(dir / "b" / stage);
    if (a != b) ++differing;
    for (const auto& n : a) {
      ++files;
      if (img::read_file_bytes(dir / "a" / stage / n) != img::read_file_bytes(dir / "b" / stage / n)) {
        ++differing;
      }
    }
    ++files;
    if (strip(img::read_file_bytes(dir / "a" / stage / app::kRunManifestName)) !=
        strip(img::read_file_bytes(dir / "b" / stage / app::kRunManifestName))) {
      ++differing;
    }
  }
  double val_mae = NAN;
  {
    std::istringstream in(std::string(
        [&] { auto v = img::read_file_bytes(dir / "a" / "train" / "validation.csv"); return std::string(v.begin(), v.end()); }()));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const double v = std::stod(line.substr(line.find(',') + 1));
      if (std::isnan(val_mae) || v < val_mae) val_mae = v;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {differing == 0 && files > 0,
          fmt("smoke pipeline twice: %.0f files compared, %.0f differ; smoke best val MAE %.4f; %.0f s",
              static_cast<double>(files), static_cast<double>(differing), val_mae, secs)};
}

Outcome pearson() {
  Lcg rng(606);
  int inexact = 0, series = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + rng.below(199);
    const double a = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.01 + 10.0 * rng.uniform());
    const double b = 20.0 * rng.uniform() - 10.0;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = 20.0 * rng.uniform() - 10.0;
      y[i] = a * x[i] + b;
    }
    ++series;
    if (metrics::pearson(x, y) != (a > 0 ? 1.0 : -1.0)) ++inexact;
  }
  int undefined = 0;
  const std::vector<double> c(17, 0.25), x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17};
  for (int k = 0; k < 2; ++k) {
    try {
      k == 0 ? metrics::pearson(c, x) : metrics::pearson(x, c);
    } catch (const UndefinedError&) {
      ++undefined;
    }
  }
  return {inexact == 0 && undefined == 2,
          fmt("%.0f affine series: %.0f not exactly +-1; constant series rejected %.0f/2", series,
              inexact, undefined)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"metric_identities", metric_identities},
      {"error_index_oracle", error_index_oracle},
      {"index_monotonicity", index_monotonicity},
      {"gradient_checks", gradient_checks},
      {"stitching_partition", stitching_partition},
      {"channel_prediction", channel_prediction},
      {"autofocus", autofocus},
      {"loss_arithmetic", loss_arithmetic},
      {"determinism", determinism},
      {"pearson", pearson},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
