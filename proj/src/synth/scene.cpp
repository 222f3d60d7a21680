#include "vstain/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vstain/error.hpp"
#include "vstain/rng.hpp"
#include "vstain/synth/psf.hpp"

namespace vstain::synth {

namespace {

constexpr double kMinFilamentThickness = 1.0;
constexpr double kMaxFilamentThickness = 2.0;
constexpr int kFilamentPoints = 3;

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x;
  const double ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("scene raster must be at least 1x1");
  if (cell_count.min < 0 || cell_count.max < cell_count.min) {
    throw ConfigError("cell_count range is empty or negative");
  }
  if (filament_count.min < 0 || filament_count.max < filament_count.min) {
    throw ConfigError("filament_count range is empty or negative");
  }
  if (!(nucleus_radius.min > 0.0) || nucleus_radius.max < nucleus_radius.min) {
    throw ConfigError("nucleus_radius range must be positive and non-empty");
  }
  if (!(noise_sigma >= 0.0) || noise_sigma >= 0.2) {
    throw ConfigError("noise_sigma must be in [0, 0.2)");
  }
}

std::uint64_t scene_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return CounterRng(seed).split("scenes").split(index).key();
}

CellScene gen_scene(const SceneSpec& spec) {
  spec.validate();
  const double half_extent = (std::min(spec.width, spec.height) - 1) / 2.0;
  if (spec.cell_count.max > 0 && spec.nucleus_radius.max > half_extent) {
    throw GenerationError("nucleus radius up to " + std::to_string(spec.nucleus_radius.max) +
                          " px cannot fit in a " + std::to_string(spec.width) + "x" +
                          std::to_string(spec.height) + " raster");
  }
  if (spec.filament_count.max > 0 && kMaxFilamentThickness > half_extent) {
    throw GenerationError("raster too small for filaments");
  }

  CounterRng rng = CounterRng(spec.seed).split("scene");
  CellScene scene;
  scene.width = spec.width;
  scene.height = spec.height;
  scene.rng_trace = spec.seed;

  const int cells = rng.between(spec.cell_count.min, spec.cell_count.max);
  for (int i = 0; i < cells; ++i) {
    Nucleus n;
    n.radius = rng.uniform(spec.nucleus_radius.min, spec.nucleus_radius.max);
    n.center.x = rng.uniform(n.radius, spec.width - 1 - n.radius);
    n.center.y = rng.uniform(n.radius, spec.height - 1 - n.radius);
    n.intensity = 1.0 - 0.5 * rng.uniform();
    n.ring_intensity = 1.0 - 0.4 * rng.uniform();
    scene.nuclei.push_back(n);
  }

  const int filaments = rng.between(spec.filament_count.min, spec.filament_count.max);
  for (int i = 0; i < filaments; ++i) {
    Filament f;
    f.thickness = rng.uniform(kMinFilamentThickness, kMaxFilamentThickness);
    f.intensity = 0.9 - 0.5 * rng.uniform();
    for (int k = 0; k < kFilamentPoints; ++k) {
      Point p;
      p.x = rng.uniform(f.thickness, spec.width - 1 - f.thickness);
      p.y = rng.uniform(f.thickness, spec.height - 1 - f.thickness);
      f.points.push_back(p);
    }
    scene.filaments.push_back(std::move(f));
  }
  return scene;
}

img::ImageGrid render_nucleus(const CellScene& scene) {
  std::vector<double> values(static_cast<std::size_t>(scene.width) * scene.height, 0.0);
  for (const auto& n : scene.nuclei) {
    const double s = n.radius / 2.0;
    const double inv = 1.0 / (2.0 * s * s);
    for (int r = 0; r < scene.height; ++r) {
      for (int c = 0; c < scene.width; ++c) {
        const double dx = c - n.center.x;
        const double dy = r - n.center.y;
        double& v = values[static_cast<std::size_t>(r) * scene.width + c];
        v = std::max(v, n.intensity * std::exp(-(dx * dx + dy * dy) * inv));
      }
    }
  }
  return img::ImageGrid::clamped(scene.width, scene.height, std::move(values), 16);
}

img::ImageGrid render_membrane(const CellScene& scene) {
  std::vector<double> values(static_cast<std::size_t>(scene.width) * scene.height, 0.0);
  const double ring_inv = 1.0 / (2.0 * kRingSigma * kRingSigma);
  for (const auto& n : scene.nuclei) {
    for (int r = 0; r < scene.height; ++r) {
      for (int c = 0; c < scene.width; ++c) {
        const double dx = c - n.center.x;
        const double dy = r - n.center.y;
        const double d = std::sqrt(dx * dx + dy * dy) - n.radius;
        double& v = values[static_cast<std::size_t>(r) * scene.width + c];
        v = std::max(v, n.ring_intensity * std::exp(-d * d * ring_inv));
      }
    }
  }
  for (const auto& f : scene.filaments) {
    const double s = f.thickness / 2.0;
    const double inv = 1.0 / (2.0 * s * s);
    for (int r = 0; r < scene.height; ++r) {
      for (int c = 0; c < scene.width; ++c) {
        const Point p{static_cast<double>(c), static_cast<double>(r)};
        double d = segment_distance(p, f.points[0], f.points[1]);
        for (std::size_t k = 2; k < f.points.size(); ++k) {
          d = std::min(d, segment_distance(p, f.points[k - 1], f.points[k]));
        }
        double& v = values[static_cast<std::size_t>(r) * scene.width + c];
        v = std::max(v, f.intensity * std::exp(-d * d * inv));
      }
    }
  }
  return img::ImageGrid::clamped(scene.width, scene.height, std::move(values), 16);
}

img::ImageGrid add_noise(const img::ImageGrid& image, double sigma, std::uint64_t stream) {
  if (sigma == 0.0) return image;
  CounterRng rng(stream);
  std::vector<double> values(image.values().begin(), image.values().end());
  for (double& v : values) v += sigma * rng.normal();
  return img::ImageGrid::clamped(image.width(), image.height(), std::move(values),
                                 image.source_bit_depth());
}

img::FieldOfView render_channels(const CellScene& scene, const SceneSpec& spec) {
  if (scene.width != spec.width || scene.height != spec.height) {
    throw DimensionError("scene raster does not match spec");
  }
  const auto nucleus = render_nucleus(scene);
  const auto membrane = render_membrane(scene);
  const auto blurred = gaussian_blur(membrane, kTargetBlurSigma);

  std::vector<double> target(nucleus.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i] = kTargetMembraneWeight * blurred.values()[i] +
                kTargetNucleusWeight * nucleus.values()[i];
  }
  const auto target_image =
      img::ImageGrid::clamped(scene.width, scene.height, std::move(target), 16);

  const CounterRng noise = CounterRng(scene.rng_trace).split("noise");
  img::FieldOfView fov;
  fov.add(kNucleusChannel, add_noise(nucleus, spec.noise_sigma, noise.split(kNucleusChannel).key()));
  fov.add(kMembraneChannel,
          add_noise(membrane, spec.noise_sigma, noise.split(kMembraneChannel).key()));
  fov.add(kTargetChannel,
          add_noise(target_image, spec.noise_sigma, noise.split(kTargetChannel).key()));
  return fov;
}

}  // namespace vstain::synth
