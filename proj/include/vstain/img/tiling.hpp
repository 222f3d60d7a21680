#pragma once

#include <utility>
#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::img {

struct TileOrigin {
  int row = 0;
  int col = 0;
  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

struct TileLayout {
  int tile_side = 0;
  int overlap = 0;
  int fov_width = 0;
  int fov_height = 0;
  std::vector<TileOrigin> origins;  // row-major over the tile grid
};

// Origins along one axis: 0, stride, 2*stride, ... while the tile ends
// before the edge, then one last origin at extent - tile_side.
std::vector<int> axis_origins(int extent, int tile_side, int overlap);

TileLayout tile_plan(int fov_width, int fov_height, int tile_side, int overlap);

// Default overlap used when none is given.
inline int default_overlap(int tile_side) { return tile_side / 4; }

// Blend ramp for local coordinate i of a tile: min(1, (d + 0.5) / overlap)
// with d the distance in pixels to the nearer tile border; 1 when overlap
// is 0. The 2-D weight is the product of the row and column ramps.
double ramp_weight(int i, int tile_side, int overlap) noexcept;

ImageGrid extract_tile(const ImageGrid& image, const TileOrigin& origin, int side);

// Alpha-blended mosaic: every output pixel is the ramp-weighted average of
// the tiles that cover it.
ImageGrid stitch(const std::vector<ImageGrid>& tiles, const TileLayout& layout);

}  // namespace vstain::img
