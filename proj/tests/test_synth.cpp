#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "vstain/error.hpp"
#include "vstain/img/pgm.hpp"
#include "vstain/synth/autofocus.hpp"
#include "vstain/synth/dataset_io.hpp"
#include "vstain/synth/psf.hpp"
#include "vstain/synth/scene.hpp"

using namespace vstain;
using namespace vstain::synth;
namespace fs = std::filesystem;

namespace {

double variance(const img::ImageGrid& a) {
  double mean = 0.0;
  for (double v : a.values()) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a.values()) var += (v - mean) * (v - mean);
  return var / static_cast<double>(a.size());
}

double mean_of(const img::ImageGrid& a) {
  return std::accumulate(a.values().begin(), a.values().end(), 0.0) /
         static_cast<double>(a.size());
}

// Mirror index without repeating the edge sample.
int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Direct (non-separable) Gaussian convolution.
std::vector<double> direct_blur(const std::vector<double>& in, int w, int h, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  double norm = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      norm += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  std::vector<double> out(in.size(), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const double k = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)) / norm;
          acc += k * in[mirror(r + dy, h) * w + mirror(c + dx, w)];
        }
      }
      out[r * w + c] = acc;
    }
  }
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vstain_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen_scene is deterministic and respects counts") {
  SceneSpec spec;
  spec.seed = 42;
  CHECK(gen_scene(spec) == gen_scene(spec));
  spec.cell_count = {3, 3};
  CHECK(gen_scene(spec).nuclei.size() == 3);
  SceneSpec other = spec;
  other.seed = 43;
  CHECK(!(gen_scene(other) == gen_scene(spec)));
}

TEST_CASE("gen_scene rejects infeasible geometry") {
  SceneSpec spec;
  spec.width = 16;
  spec.height = 16;
  spec.nucleus_radius = {4.0, 9.0};
  CHECK_THROWS_AS(gen_scene(spec), GenerationError);
  spec.nucleus_radius = {4.0, 7.0};
  CHECK_NOTHROW(gen_scene(spec));
  SceneSpec bad;
  bad.noise_sigma = 0.2;
  CHECK_THROWS_AS(gen_scene(bad), ConfigError);
  bad.noise_sigma = 0.0;
  bad.cell_count = {3, 2};
  CHECK_THROWS_AS(gen_scene(bad), ConfigError);
}

TEST_CASE("scene primitives lie inside the raster") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.width = 40;
    spec.height = 30;
    const CellScene s = gen_scene(spec);
    CHECK(static_cast<int>(s.nuclei.size()) >= spec.cell_count.min);
    CHECK(static_cast<int>(s.nuclei.size()) <= spec.cell_count.max);
    CHECK(static_cast<int>(s.filaments.size()) >= spec.filament_count.min);
    CHECK(static_cast<int>(s.filaments.size()) <= spec.filament_count.max);
    for (const auto& n : s.nuclei) {
      CHECK(n.center.x - n.radius >= 0.0);
      CHECK(n.center.x + n.radius <= spec.width - 1);
      CHECK(n.center.y - n.radius >= 0.0);
      CHECK(n.center.y + n.radius <= spec.height - 1);
      CHECK((n.intensity > 0.5 && n.intensity <= 1.0));
      CHECK((n.ring_intensity > 0.0 && n.ring_intensity <= 1.0));
    }
    for (const auto& f : s.filaments) {
      CHECK((f.intensity > 0.0 && f.intensity <= 1.0));
      for (const auto& p : f.points) {
        CHECK(p.x - f.thickness >= 0.0);
        CHECK(p.x + f.thickness <= spec.width - 1);
        CHECK(p.y - f.thickness >= 0.0);
        CHECK(p.y + f.thickness <= spec.height - 1);
      }
    }
  }
}

TEST_CASE("empty scene renders black channels") {
  SceneSpec spec;
  spec.cell_count = {0, 0};
  spec.filament_count = {0, 0};
  spec.noise_sigma = 0.0;
  const auto fov = render_channels(gen_scene(spec), spec);
  CHECK(fov.names() == std::vector<std::string>{"nucleus", "membrane", "target"});
  for (const auto& [name, image] : fov.channels()) {
    for (double v : image.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("target rule matches a direct evaluation for a single nucleus") {
  SceneSpec spec;
  spec.width = 32;
  spec.height = 28;
  spec.noise_sigma = 0.0;
  CellScene scene;
  scene.width = 32;
  scene.height = 28;
  scene.nuclei.push_back({{14.3, 12.7}, 5.5, 0.8, 0.9});

  const auto fov = render_channels(scene, spec);
  std::vector<double> nucleus(32 * 28), ring(32 * 28);
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 32; ++c) {
      const double d2 = (c - 14.3) * (c - 14.3) + (r - 12.7) * (r - 12.7);
      nucleus[r * 32 + c] = 0.8 * std::exp(-d2 / (2.0 * (5.5 / 2) * (5.5 / 2)));
      const double dr = std::sqrt(d2) - 5.5;
      ring[r * 32 + c] = 0.9 * std::exp(-dr * dr / 2.0);
    }
  }
  const auto blurred = direct_blur(ring, 32, 28, 2.0);
  for (int i = 0; i < 32 * 28; ++i) {
    CHECK(fov.channel("nucleus").values()[i] == doctest::Approx(nucleus[i]).epsilon(1e-12));
    CHECK(fov.channel("membrane").values()[i] == doctest::Approx(ring[i]).epsilon(1e-12));
    const double expected = std::min(1.0, 0.6 * blurred[i] + 0.4 * nucleus[i]);
    CHECK(std::abs(fov.channel("target").values()[i] - expected) <= 1e-12);
  }
}

TEST_CASE("noise-free target stays in range") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.noise_sigma = 0.0;
    const auto fov = render_channels(gen_scene(spec), spec);
    for (double v : fov.channel("target").values()) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("noise is reproducible and channel-independent") {
  SceneSpec spec;
  spec.seed = 3;
  spec.noise_sigma = 0.05;
  const auto a = render_channels(gen_scene(spec), spec);
  const auto b = render_channels(gen_scene(spec), spec);
  CHECK(a.channel("membrane") == b.channel("membrane"));
  spec.noise_sigma = 0.0;
  const auto clean = render_channels(gen_scene(spec), spec);
  double diff = 0.0;
  for (std::size_t i = 0; i < clean.channel("nucleus").size(); ++i) {
    diff += std::abs(a.channel("nucleus").values()[i] - clean.channel("nucleus").values()[i]);
  }
  CHECK(diff > 0.0);
  CHECK(scene_seed(1, 0) != scene_seed(1, 1));
}

TEST_CASE("psf kernels") {
  PsfModel psf;
  CHECK(psf.sigma(0.0) == psf.sigma0);
  CHECK(psf.sigma(-4.0) == psf.sigma0 + 2.0);
  for (double s : {0.0, 0.3, 1.0, 1.5, 2.7, 5.0}) {
    const auto k = render_kernel(s);
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const int r = kernel_radius(s);
    CHECK(k.size() == static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
  }
  CHECK(kernel_radius(1.5) == 5);
  CHECK(render_kernel(0.0) == std::vector<double>{1.0});
  CHECK(reflect_index(-1, 5) == 1);
  CHECK(reflect_index(5, 5) == 3);
  CHECK(reflect_index(-9, 5) == 1);
  CHECK(reflect_index(0, 1) == 0);
  PsfModel bad;
  bad.slope = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("defocus with a delta kernel is the identity") {
  vstain::testing::Lcg rng(1);
  const auto img = vstain::testing::random_image(rng, 9, 7);
  PsfModel psf;
  psf.sigma0 = 0.0;
  CHECK(defocus(img, 0.0, psf) == img);
}

TEST_CASE("defocus of a constant image is constant") {
  PsfModel psf;
  const auto img = vstain::testing::constant_image(20, 15, 0.37);
  for (double z : {-12.0, -4.0, 3.0, 8.0}) {
    const auto out = defocus(img, z, psf);
    for (double v : out.values()) CHECK(std::abs(v - 0.37) <= 1e-9);
  }
}

TEST_CASE("defocus of an impulse reproduces the kernel") {
  PsfModel psf;  // sigma(2) = 0.5 + 0.5 * 2 = 1.5
  REQUIRE(psf.sigma(2.0) == 1.5);
  std::vector<double> v(21 * 21, 0.0);
  v[10 * 21 + 10] = 1.0;
  const auto out = defocus(img::ImageGrid(21, 21, v), 2.0, psf);
  double norm = 0.0;
  for (int dy = -5; dy <= 5; ++dy) {
    for (int dx = -5; dx <= 5; ++dx) norm += std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
  }
  for (int r = 0; r < 21; ++r) {
    for (int c = 0; c < 21; ++c) {
      const int dy = r - 10, dx = c - 10;
      const double expected = (std::abs(dy) <= 5 && std::abs(dx) <= 5)
                                  ? std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5)) / norm
                                  : 0.0;
      CHECK(std::abs(out.at(r, c) - expected) <= 1e-12);
    }
  }
}

TEST_CASE("defocus matches a direct 2-D convolution with reflect borders") {
  vstain::testing::Lcg rng(9);
  const auto img = vstain::testing::random_image(rng, 13, 11);
  const auto out = gaussian_blur(img, 1.7);
  const std::vector<double> in(img.values().begin(), img.values().end());
  const auto expected = direct_blur(in, 13, 11, 1.7);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(out.values()[i] - expected[i]) <= 1e-12);
  }
}

TEST_CASE("defocus: variance falls and interior mass is kept as |z| grows") {
  PsfModel psf;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.noise_sigma = 0.0;
    const auto membrane = render_membrane(gen_scene(spec));
    double prev = variance(membrane);
    for (double z : {2.5, 4.0, 6.0, 8.0, 10.0, 12.0}) {
      const double v = variance(defocus(membrane, -z, psf));
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
  }
  // Blob far from every border: mass is preserved exactly up to rounding.
  std::vector<double> v(64 * 64, 0.0);
  for (int r = 28; r < 36; ++r) {
    for (int c = 26; c < 38; ++c) v[r * 64 + c] = 0.5 + 0.01 * ((r * 7 + c) % 13);
  }
  const img::ImageGrid blob(64, 64, v);
  for (double z : {4.0, 8.0, -12.0}) {
    const double ratio = mean_of(defocus(blob, z, psf)) / mean_of(blob);
    CHECK(std::abs(ratio - 1.0) <= 1e-6);
  }
}

TEST_CASE("autofocus dataset counts and exclusion") {
  SceneSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.nucleus_radius = {3.0, 6.0};
  PsfModel psf;
  std::vector<double> zs;
  for (double z = -12.0; z <= 8.0; z += 2.0) zs.push_back(z);
  const auto samples = make_af_dataset(spec, 2, zs, psf);
  // Admissible in 2 um steps: -12..-4 (5 values) and 4, 6, 8.
  CHECK(samples.size() == 2 * 8);
  for (const auto& s : samples) {
    CHECK(std::abs(s.z) > 2.0);
    CHECK(!s.near_focus);
  }
  CHECK(samples[0].focused == samples[7].focused);
  CHECK(!(samples[0].focused == samples[8].focused));
  CHECK(samples[0].scene_index == 0);
  CHECK(samples[8].scene_index == 1);

  CHECK_THROWS_AS(make_af_dataset(spec, 1, {0.0}, psf), DatasetError);
  CHECK_THROWS_AS(make_af_dataset(spec, 1, {-2.0, 2.0, 1.0}, psf), DatasetError);
  CHECK_THROWS_AS(make_af_dataset(spec, 1, {9.0}, psf), ConfigError);
  const auto two = make_af_dataset(spec, 1, {-3.0, 3.0}, psf);
  CHECK(two.size() == 2);
  CHECK(!two[0].near_focus);
  CHECK(!two[1].near_focus);
  const auto flagged = make_af_dataset(spec, 1, {0.0, 4.0}, psf, NearFocusPolicy::kFlag);
  REQUIRE(flagged.size() == 2);
  CHECK(flagged[0].near_focus);
  CHECK(!flagged[1].near_focus);
}

TEST_CASE("autofocus dataset is a pure function of its inputs") {
  SceneSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.nucleus_radius = {3.0, 6.0};
  const auto a = make_af_dataset(spec, 2, {-4.0, 6.0}, PsfModel{});
  const auto b = make_af_dataset(spec, 2, {-4.0, 6.0}, PsfModel{});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].defocused == b[i].defocused);
    CHECK(a[i].focused == b[i].focused);
  }
}

TEST_CASE("manifest text round-trips") {
  DatasetManifest m;
  m.kind = DatasetKind::kAutofocus;
  m.seed = 77;
  m.width = 32;
  m.height = 24;
  m.bit_depth = 16;
  m.channels = {"defocused", "focused"};
  m.entries = {{af_fov_name(0, -4.0), 0, -4.0, false}, {af_fov_name(1, 0.5), 1, 0.5, true}};
  const DatasetManifest back = parse_manifest(format_manifest(m));
  CHECK(format_manifest(back) == format_manifest(m));
  CHECK(back.entries[1].near_focus);
  CHECK(af_fov_name(3, -4.0) == "scene0003-z-04.00");
  CHECK(scene_fov_name(12) == "scene0012");
  CHECK_THROWS_AS(parse_manifest("format=vstain-dataset\nbogus=1\n"), DatasetError);
  CHECK_THROWS_AS(parse_manifest("format=vstain-dataset\nchannels=a\ncount=2\n"), DatasetError);
}

TEST_CASE("channel dataset files round-trip through disk") {
  const fs::path dir = fresh_dir("channels");
  std::vector<img::FieldOfView> fovs;
  for (int i = 0; i < 3; ++i) {
    SceneSpec spec;
    spec.seed = scene_seed(5, i);
    spec.width = 24;
    spec.height = 20;
    spec.nucleus_radius = {3.0, 5.0};
    fovs.push_back(render_channels(gen_scene(spec), spec));
  }
  const auto files = write_channel_dataset(dir, 5, fovs, 16);
  CHECK(files.size() == 3 * 3 + 1);
  const DatasetManifest m = read_manifest(dir);
  CHECK(m.entries.size() == 3);
  const img::FieldOfView back = load_fov(dir, m, m.entries[1]);
  for (const auto& name : back.names()) {
    const auto& orig = fovs[1].channel(name);
    const auto& got = back.channel(name);
    for (std::size_t i = 0; i < orig.size(); ++i) {
      CHECK(std::abs(orig.values()[i] - got.values()[i]) <= 0.5 / 65535.0 + 1e-15);
    }
  }
  fs::remove_all(dir);
}
