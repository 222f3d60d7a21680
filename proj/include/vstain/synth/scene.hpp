#pragma once

#include <cstdint>
#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::synth {

template <typename T>
struct Range {
  T min{};
  T max{};
};

struct SceneSpec {
  std::uint64_t seed = 1;
  int width = 64;
  int height = 64;
  Range<int> cell_count{2, 5};
  Range<double> nucleus_radius{4.0, 8.0};
  Range<int> filament_count{2, 6};
  double noise_sigma = 0.01;

  // Throws ConfigError when a range is empty or negative, or noise_sigma
  // is outside [0, 0.2).
  void validate() const;
};

struct Point {
  double x = 0.0;  // column
  double y = 0.0;  // row
  friend bool operator==(const Point&, const Point&) = default;
};

struct Nucleus {
  Point center;
  double radius = 0.0;
  double intensity = 0.0;       // peak of the nucleus blob
  double ring_intensity = 0.0;  // peak of the membrane ring at the boundary
  friend bool operator==(const Nucleus&, const Nucleus&) = default;
};

struct Filament {
  std::vector<Point> points;  // polyline control points
  double thickness = 0.0;
  double intensity = 0.0;
  friend bool operator==(const Filament&, const Filament&) = default;
};

struct CellScene {
  int width = 0;
  int height = 0;
  std::vector<Nucleus> nuclei;
  std::vector<Filament> filaments;
  std::uint64_t rng_trace = 0;
  friend bool operator==(const CellScene&, const CellScene&) = default;
};

// Channel names produced by render_channels.
inline constexpr const char* kNucleusChannel = "nucleus";
inline constexpr const char* kMembraneChannel = "membrane";
inline constexpr const char* kTargetChannel = "target";

// Mixing rule of the target channel.
inline constexpr double kTargetBlurSigma = 2.0;
inline constexpr double kTargetMembraneWeight = 0.6;
inline constexpr double kTargetNucleusWeight = 0.4;

// Ring profile width (px) and filament profile.
inline constexpr double kRingSigma = 1.0;

// Seed of scene `index` in a multi-scene dataset rooted at `seed`.
std::uint64_t scene_seed(std::uint64_t seed, std::uint64_t index) noexcept;

CellScene gen_scene(const SceneSpec& spec);

// Noise-free primitive rasters.
img::ImageGrid render_nucleus(const CellScene& scene);
img::ImageGrid render_membrane(const CellScene& scene);

// "nucleus", "membrane" and "target" channels with per-channel noise.
img::FieldOfView render_channels(const CellScene& scene, const SceneSpec& spec);

// Adds i.i.d. N(0, sigma^2) noise drawn from `stream` in row-major order and
// clamps to [0, 1].
img::ImageGrid add_noise(const img::ImageGrid& image, double sigma, std::uint64_t stream);

}  // namespace vstain::synth
