#include "vstain/net/predict.hpp"

#include "vstain/img/tiling.hpp"

namespace vstain::net {

Tensor pack_tiles(const img::FieldOfView& fov, const std::vector<std::string>& input_channels,
                  const std::vector<img::TileOrigin>& origins, int tile_side) {
  const int count = static_cast<int>(origins.size());
  const int channels = static_cast<int>(input_channels.size());
  Tensor x(count, channels, tile_side, tile_side);
  for (int c = 0; c < channels; ++c) {
    const img::ImageGrid& image = fov.channel(input_channels[c]);
    for (int t = 0; t < count; ++t) {
      float* dst = x.channel(t, c);
      const auto& o = origins[t];
      for (int r = 0; r < tile_side; ++r) {
        for (int col = 0; col < tile_side; ++col) {
          dst[r * tile_side + col] = static_cast<float>(2.0 * image.at(o.row + r, o.col + col) - 1.0);
        }
      }
    }
  }
  return x;
}

img::ImageGrid predict_fov(Generator& generator, const img::FieldOfView& fov,
                           const std::vector<std::string>& input_channels, int tile_side,
                           int overlap) {
  const auto& cfg = generator.config();
  if (static_cast<int>(input_channels.size()) != cfg.in_channels) {
    throw DimensionError("generator expects " + std::to_string(cfg.in_channels) +
                         " input channels, got " + std::to_string(input_channels.size()));
  }
  for (const auto& name : input_channels) {
    if (!fov.contains(name)) throw DimensionError("field of view has no channel '" + name + "'");
  }
  cfg.check_input_side(tile_side);
  const img::TileLayout layout = img::tile_plan(fov.width(), fov.height(), tile_side, overlap);
  const Tensor x = pack_tiles(fov, input_channels, layout.origins, tile_side);
  const Tensor y = generator.forward(x, Mode::kInference);
  y.check_finite("generator output");

  const int bits = fov.channel(input_channels.front()).source_bit_depth();
  std::vector<img::ImageGrid> tiles;
  tiles.reserve(layout.origins.size());
  std::vector<double> values(y.plane());
  for (int t = 0; t < y.n(); ++t) {
    const float* p = y.channel(t, 0);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = p[i];
    tiles.push_back(img::denormalize(values, tile_side, tile_side, bits));
  }
  return img::stitch(tiles, layout);
}

}  // namespace vstain::net
