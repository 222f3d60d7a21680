#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vstain/error.hpp"

namespace vstain::net {

// Storage aligned to the widest SIMD packet. Eigen peels vectorized loops
// according to the runtime address, so unaligned heap blocks would make the
// rounding of a product depend on where the allocator placed them.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

// Dense NCHW tensor.
template <typename T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int n, int c, int h, int w, T fill = T{})
      : n_(n), c_(c), h_(h), w_(w),
        data_(static_cast<std::size_t>(n) * c * h * w, fill) {
    if (n < 0 || c < 0 || h < 0 || w < 0) throw DimensionError("negative tensor dimension");
  }

  int n() const noexcept { return n_; }
  int c() const noexcept { return c_; }
  int h() const noexcept { return h_; }
  int w() const noexcept { return w_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h_) * w_; }
  std::size_t item_size() const noexcept { return plane() * c_; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  T* item(int i) noexcept { return data_.data() + i * item_size(); }
  const T* item(int i) const noexcept { return data_.data() + i * item_size(); }
  T* channel(int i, int ch) noexcept { return item(i) + ch * plane(); }
  const T* channel(int i, int ch) const noexcept { return item(i) + ch * plane(); }

  T& at(int i, int ch, int r, int col) noexcept {
    return data_[((static_cast<std::size_t>(i) * c_ + ch) * h_ + r) * w_ + col];
  }
  T at(int i, int ch, int r, int col) const noexcept {
    return data_[((static_cast<std::size_t>(i) * c_ + ch) * h_ + r) * w_ + col];
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const BasicTensor& o) const noexcept {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  std::string shape_string() const {
    return "(" + std::to_string(n_) + "," + std::to_string(c_) + "," + std::to_string(h_) + "," +
           std::to_string(w_) + ")";
  }

  // NaN/Inf anywhere is a hard failure.
  void check_finite(const std::string& where) const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw NumericError("non-finite value in " + where + " at flat index " + std::to_string(i));
      }
    }
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  AlignedVector<T> data_;
};

using Tensor = BasicTensor<float>;

// Learnable values with their gradient accumulator.
template <typename T>
struct Param {
  std::string name;
  AlignedVector<T> value;
  AlignedVector<T> grad;

  Param() = default;
  Param(std::string n, std::size_t count, T fill = T{})
      : name(std::move(n)), value(count, fill), grad(count, T{}) {}

  void zero_grad() { std::fill(grad.begin(), grad.end(), T{}); }
};

// Non-learnable state saved with the model (batch-norm running statistics).
template <typename T>
struct Buffer {
  std::string name;
  std::vector<T> value;
};

enum class Mode { kTrain, kInference };

template <typename T>
BasicTensor<T> concat_channels(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    throw DimensionError("cannot concatenate " + a.shape_string() + " and " + b.shape_string());
  }
  BasicTensor<T> out(a.n(), a.c() + b.c(), a.h(), a.w());
  for (int i = 0; i < a.n(); ++i) {
    std::copy(a.item(i), a.item(i) + a.item_size(), out.item(i));
    std::copy(b.item(i), b.item(i) + b.item_size(), out.item(i) + a.item_size());
  }
  return out;
}

// Inverse of concat_channels: the first `first_channels` go to `a`.
template <typename T>
void split_channels(const BasicTensor<T>& x, int first_channels, BasicTensor<T>& a,
                    BasicTensor<T>& b) {
  a = BasicTensor<T>(x.n(), first_channels, x.h(), x.w());
  b = BasicTensor<T>(x.n(), x.c() - first_channels, x.h(), x.w());
  for (int i = 0; i < x.n(); ++i) {
    std::copy(x.item(i), x.item(i) + a.item_size(), a.item(i));
    std::copy(x.item(i) + a.item_size(), x.item(i) + x.item_size(), b.item(i));
  }
}

template <typename T>
void add_into(BasicTensor<T>& acc, const BasicTensor<T>& x) {
  if (acc.size() == 0) {
    acc = x;
    return;
  }
  if (!acc.same_shape(x)) throw DimensionError("tensor shapes differ in accumulation");
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += x.data()[i];
}

template <typename To, typename From>
BasicTensor<To> tensor_cast(const BasicTensor<From>& x) {
  BasicTensor<To> out(x.n(), x.c(), x.h(), x.w());
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = static_cast<To>(x.data()[i]);
  return out;
}

}  // namespace vstain::net
