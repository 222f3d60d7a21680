#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vstain::img {

// Single-channel raster with canonical intensities in [0, 1], row-major.
// source_bit_depth records where the samples came from (8 or 16 bits) so
// that writers can reproduce the original encoding.
class ImageGrid {
 public:
  ImageGrid() = default;
  // Zero-filled raster.
  ImageGrid(int width, int height, int source_bit_depth = 8);
  // Validates every invariant; throws InvariantError / DimensionError.
  ImageGrid(int width, int height, std::vector<double> values, int source_bit_depth = 8);

  // Clamps values to [0, 1] (NaN is still rejected). Used after
  // arithmetic that can drift a few ulps outside the range.
  static ImageGrid clamped(int width, int height, std::vector<double> values,
                           int source_bit_depth = 8);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  int source_bit_depth() const noexcept { return bit_depth_; }
  void set_source_bit_depth(int bits);

  double at(int row, int col) const { return values_[index(row, col)]; }
  void set(int row, int col, double v);

  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const ImageGrid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImageGrid& a, const ImageGrid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.values_ == b.values_;
  }

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 8;
  std::vector<double> values_;
};

// Co-registered named channels sharing one raster geometry. Channel order
// is insertion order.
class FieldOfView {
 public:
  void add(std::string name, ImageGrid image);

  bool contains(const std::string& name) const noexcept;
  const ImageGrid& channel(const std::string& name) const;
  std::vector<std::string> names() const;
  std::size_t channel_count() const noexcept { return channels_.size(); }
  bool empty() const noexcept { return channels_.empty(); }
  int width() const noexcept { return channels_.empty() ? 0 : channels_.front().second.width(); }
  int height() const noexcept { return channels_.empty() ? 0 : channels_.front().second.height(); }

  const std::vector<std::pair<std::string, ImageGrid>>& channels() const noexcept {
    return channels_;
  }

 private:
  std::vector<std::pair<std::string, ImageGrid>> channels_;
};

// Square multi-channel patch in [-1, 1].
struct NormalizedPatch {
  int side = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;

  double at(std::size_t channel, int row, int col) const {
    return channels[channel][static_cast<std::size_t>(row) * side + col];
  }
};

// v -> 2v - 1
std::vector<double> normalize(const ImageGrid& image);
// v -> (v + 1) / 2, clamped to [0, 1].
ImageGrid denormalize(std::span<const double> values, int width, int height,
                      int source_bit_depth = 8);

}  // namespace vstain::img
