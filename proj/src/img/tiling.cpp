#include "vstain/img/tiling.hpp"

#include <algorithm>
#include <string>

#include "vstain/error.hpp"

namespace vstain::img {

namespace {

void check_plan(int fov_width, int fov_height, int tile_side, int overlap) {
  if (fov_width < 1 || fov_height < 1) throw DimensionError("field of view must be non-empty");
  if (tile_side < 1 || tile_side > std::min(fov_width, fov_height)) {
    throw DimensionError("tile side " + std::to_string(tile_side) + " does not fit in " +
                         std::to_string(fov_width) + "x" + std::to_string(fov_height));
  }
  if (overlap < 0 || overlap >= tile_side) {
    throw DimensionError("overlap " + std::to_string(overlap) + " must be in [0, tile_side)");
  }
}

}  // namespace

std::vector<int> axis_origins(int extent, int tile_side, int overlap) {
  const int stride = tile_side - overlap;
  std::vector<int> origins;
  for (int p = 0; p + tile_side < extent; p += stride) origins.push_back(p);
  origins.push_back(extent - tile_side);
  return origins;
}

TileLayout tile_plan(int fov_width, int fov_height, int tile_side, int overlap) {
  check_plan(fov_width, fov_height, tile_side, overlap);
  TileLayout layout{tile_side, overlap, fov_width, fov_height, {}};
  const auto rows = axis_origins(fov_height, tile_side, overlap);
  const auto cols = axis_origins(fov_width, tile_side, overlap);
  layout.origins.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (int c : cols) layout.origins.push_back({r, c});
  }
  return layout;
}

double ramp_weight(int i, int tile_side, int overlap) noexcept {
  if (overlap <= 0) return 1.0;
  const int d = std::min(i, tile_side - 1 - i);
  return std::min(1.0, (d + 0.5) / overlap);
}

ImageGrid extract_tile(const ImageGrid& image, const TileOrigin& origin, int side) {
  if (origin.row < 0 || origin.col < 0 || origin.row + side > image.height() ||
      origin.col + side > image.width()) {
    throw DimensionError("tile outside image");
  }
  std::vector<double> values(static_cast<std::size_t>(side) * side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      values[static_cast<std::size_t>(r) * side + c] = image.at(origin.row + r, origin.col + c);
    }
  }
  return ImageGrid(side, side, std::move(values), image.source_bit_depth());
}

ImageGrid stitch(const std::vector<ImageGrid>& tiles, const TileLayout& layout) {
  if (tiles.size() != layout.origins.size()) {
    throw DimensionError("stitch got " + std::to_string(tiles.size()) + " tiles for " +
                         std::to_string(layout.origins.size()) + " layout origins");
  }
  const int side = layout.tile_side;
  std::vector<double> ramp(side);
  for (int i = 0; i < side; ++i) ramp[i] = ramp_weight(i, side, layout.overlap);

  const std::size_t n = static_cast<std::size_t>(layout.fov_width) * layout.fov_height;
  std::vector<double> acc(n, 0.0);
  std::vector<double> weight(n, 0.0);
  int bit_depth = 8;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const auto& tile = tiles[t];
    if (tile.width() != side || tile.height() != side) {
      throw DimensionError("tile " + std::to_string(t) + " is " + std::to_string(tile.width()) +
                           "x" + std::to_string(tile.height()) + ", expected " +
                           std::to_string(side));
    }
    bit_depth = std::max(bit_depth, tile.source_bit_depth());
    const auto origin = layout.origins[t];
    for (int r = 0; r < side; ++r) {
      const std::size_t row_base =
          static_cast<std::size_t>(origin.row + r) * layout.fov_width + origin.col;
      for (int c = 0; c < side; ++c) {
        const double w = ramp[r] * ramp[c];
        acc[row_base + c] += w * tile.at(r, c);
        weight[row_base + c] += w;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (weight[i] <= 0.0) throw DimensionError("layout leaves pixels uncovered");
    acc[i] /= weight[i];
  }
  return ImageGrid::clamped(layout.fov_width, layout.fov_height, std::move(acc), bit_depth);
}

}  // namespace vstain::img
