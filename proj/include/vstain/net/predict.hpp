#pragma once

#include <string>
#include <vector>

#include "vstain/img/image.hpp"
#include "vstain/img/tiling.hpp"
#include "vstain/net/generator.hpp"

namespace vstain::net {

// Normalizes the named input channels, cuts them into tiles, runs the
// generator on every tile in inference mode, maps the outputs back to
// [0, 1] and alpha-blends them into an image the size of the FOV.
img::ImageGrid predict_fov(Generator& generator, const img::FieldOfView& fov,
                           const std::vector<std::string>& input_channels, int tile_side,
                           int overlap);

// Packs square tiles of the named channels into one batch tensor in [-1, 1].
Tensor pack_tiles(const img::FieldOfView& fov, const std::vector<std::string>& input_channels,
                  const std::vector<img::TileOrigin>& origins, int tile_side);

}  // namespace vstain::net
