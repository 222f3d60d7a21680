#pragma once

#include <utility>

#include "vstain/img/image.hpp"
#include "vstain/rng.hpp"

namespace vstain::img {

struct CropResult {
  NormalizedPatch patch;
  int row = 0;
  int col = 0;
};

// Draws the row origin, then the column origin, each with
// rng.below(extent - side + 1). The same origin is used for every channel.
CropResult random_crop(const FieldOfView& fov, int side, CounterRng& rng);

// Crop at a fixed origin (no RNG).
NormalizedPatch crop_at(const FieldOfView& fov, int side, int row, int col);

// Dihedral group D4 on square patches. op = rotation + 4 * flip where
// rotation counts 90 degree counter-clockwise turns and the horizontal
// flip is applied after the rotation.
inline constexpr int kD4Size = 8;
NormalizedPatch augment(const NormalizedPatch& patch, int op_index);

// Same transform on one square channel.
std::vector<double> augment_channel(const std::vector<double>& values, int side, int op_index);

}  // namespace vstain::img
