#include "vstain/img/patch.hpp"

#include <string>

#include "vstain/error.hpp"

namespace vstain::img {

NormalizedPatch crop_at(const FieldOfView& fov, int side, int row, int col) {
  if (fov.empty()) throw DimensionError("cannot crop an empty field of view");
  if (side < 1 || side > fov.width() || side > fov.height()) {
    throw DimensionError("patch side " + std::to_string(side) + " does not fit in " +
                         std::to_string(fov.width()) + "x" + std::to_string(fov.height()));
  }
  if (row < 0 || col < 0 || row + side > fov.height() || col + side > fov.width()) {
    throw DimensionError("crop origin outside field of view");
  }
  NormalizedPatch patch;
  patch.side = side;
  for (const auto& [name, image] : fov.channels()) {
    std::vector<double> values(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        values[static_cast<std::size_t>(r) * side + c] = 2.0 * image.at(row + r, col + c) - 1.0;
      }
    }
    patch.names.push_back(name);
    patch.channels.push_back(std::move(values));
  }
  return patch;
}

CropResult random_crop(const FieldOfView& fov, int side, CounterRng& rng) {
  if (fov.empty()) throw DimensionError("cannot crop an empty field of view");
  if (side < 1 || side > fov.width() || side > fov.height()) {
    throw DimensionError("patch side " + std::to_string(side) + " does not fit in " +
                         std::to_string(fov.width()) + "x" + std::to_string(fov.height()));
  }
  const int row = static_cast<int>(rng.below(static_cast<std::uint64_t>(fov.height() - side + 1)));
  const int col = static_cast<int>(rng.below(static_cast<std::uint64_t>(fov.width() - side + 1)));
  return {crop_at(fov, side, row, col), row, col};
}

std::vector<double> augment_channel(const std::vector<double>& values, int side, int op_index) {
  if (op_index < 0 || op_index >= kD4Size) {
    throw InvariantError("augment op index " + std::to_string(op_index) + " outside 0..7");
  }
  if (values.size() != static_cast<std::size_t>(side) * side) {
    throw DimensionError("augment expects a square channel");
  }
  const auto at = [side](int r, int c) { return static_cast<std::size_t>(r) * side + c; };
  std::vector<double> cur = values;
  std::vector<double> next(values.size());
  for (int k = 0; k < op_index % 4; ++k) {
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) next[at(r, c)] = cur[at(c, side - 1 - r)];
    }
    cur.swap(next);
  }
  if (op_index >= 4) {
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) next[at(r, c)] = cur[at(r, side - 1 - c)];
    }
    cur.swap(next);
  }
  return cur;
}

NormalizedPatch augment(const NormalizedPatch& patch, int op_index) {
  NormalizedPatch out;
  out.side = patch.side;
  out.names = patch.names;
  out.channels.reserve(patch.channels.size());
  for (const auto& ch : patch.channels) {
    out.channels.push_back(augment_channel(ch, patch.side, op_index));
  }
  return out;
}

}  // namespace vstain::img
