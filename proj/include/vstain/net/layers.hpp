#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

#include "vstain/net/tensor.hpp"
#include "vstain/rng.hpp"

namespace vstain::net {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

// Geometry of a strided convolution from a (channels, height, width) image
// to an (out_h, out_w) grid.
struct ConvGeometry {
  int channels = 0;
  int height = 0;
  int width = 0;
  int kernel = 0;
  int stride = 1;
  int pad = 0;
  int out_h = 0;
  int out_w = 0;

  int rows() const noexcept { return channels * kernel * kernel; }
  int cols() const noexcept { return out_h * out_w; }
};

inline int conv_output_extent(int in, int kernel, int stride, int pad) noexcept {
  return (in + 2 * pad - kernel) / stride + 1;
}

// col[(c*k + ki)*k + kj][oy*out_w + ox] = img[c][oy*s - p + ki][ox*s - p + kj]
template <typename T>
void im2col(const T* img, const ConvGeometry& g, T* col) {
  const int k = g.kernel;
  for (int c = 0; c < g.channels; ++c) {
    const T* plane = img + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        T* dst = col + static_cast<std::size_t>((c * k + ki) * k + kj) * g.cols();
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int y = oy * g.stride - g.pad + ki;
          T* row = dst + static_cast<std::size_t>(oy) * g.out_w;
          if (y < 0 || y >= g.height) {
            std::fill(row, row + g.out_w, T{});
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(y) * g.width;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int x = ox * g.stride - g.pad + kj;
            row[ox] = (x >= 0 && x < g.width) ? src[x] : T{};
          }
        }
      }
    }
  }
}

// Adjoint of im2col: accumulates columns back into the image.
template <typename T>
void col2im(const T* col, const ConvGeometry& g, T* img) {
  const int k = g.kernel;
  for (int c = 0; c < g.channels; ++c) {
    T* plane = img + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const T* src = col + static_cast<std::size_t>((c * k + ki) * k + kj) * g.cols();
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int y = oy * g.stride - g.pad + ki;
          if (y < 0 || y >= g.height) continue;
          T* dst = plane + static_cast<std::size_t>(y) * g.width;
          const T* row = src + static_cast<std::size_t>(oy) * g.out_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int x = ox * g.stride - g.pad + kj;
            if (x >= 0 && x < g.width) dst[x] += row[ox];
          }
        }
      }
    }
  }
}

template <typename T>
void init_normal(Param<T>& p, const CounterRng& root, double stddev) {
  CounterRng rng = root.split(p.name);
  for (auto& v : p.value) v = static_cast<T>(stddev * rng.normal());
}

// Square-kernel convolution; weight layout (out, in, k, k).
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, int in, int out, int kernel, int stride, int pad)
      : in_(in), out_(out), kernel_(kernel), stride_(stride), pad_(pad),
        weight_(name + ".weight", static_cast<std::size_t>(out) * in * kernel * kernel),
        bias_(name + ".bias", static_cast<std::size_t>(out)) {}

  int in_channels() const noexcept { return in_; }
  int out_channels() const noexcept { return out_; }

  BasicTensor<T> forward(const BasicTensor<T>& x) {
    if (x.c() != in_) {
      throw DimensionError(weight_.name + ": expected " + std::to_string(in_) +
                           " input channels, got " + std::to_string(x.c()));
    }
    geom_ = {in_, x.h(), x.w(), kernel_, stride_, pad_,
             conv_output_extent(x.h(), kernel_, stride_, pad_),
             conv_output_extent(x.w(), kernel_, stride_, pad_)};
    if (geom_.out_h < 1 || geom_.out_w < 1) throw DimensionError(weight_.name + ": input too small");
    batch_ = x.n();
    const std::size_t col_size = static_cast<std::size_t>(geom_.rows()) * geom_.cols();
    cols_.resize(col_size * batch_);
    BasicTensor<T> y(x.n(), out_, geom_.out_h, geom_.out_w);
    ConstMatrixMap<T> w(weight_.value.data(), out_, geom_.rows());
    for (int i = 0; i < x.n(); ++i) {
      T* col = cols_.data() + col_size * i;
      im2col(x.item(i), geom_, col);
      MatrixMap<T> out(y.item(i), out_, geom_.cols());
      out.noalias() = w * ConstMatrixMap<T>(col, geom_.rows(), geom_.cols());
      for (int o = 0; o < out_; ++o) out.row(o).array() += bias_.value[o];
    }
    return y;
  }

  BasicTensor<T> backward(const BasicTensor<T>& dy) {
    const std::size_t col_size = static_cast<std::size_t>(geom_.rows()) * geom_.cols();
    BasicTensor<T> dx(batch_, in_, geom_.height, geom_.width);
    ConstMatrixMap<T> w(weight_.value.data(), out_, geom_.rows());
    MatrixMap<T> dw(weight_.grad.data(), out_, geom_.rows());
    AlignedVector<T> dcol(col_size);
    for (int i = 0; i < batch_; ++i) {
      ConstMatrixMap<T> g(dy.item(i), out_, geom_.cols());
      ConstMatrixMap<T> col(cols_.data() + col_size * i, geom_.rows(), geom_.cols());
      dw.noalias() += g * col.transpose();
      for (int o = 0; o < out_; ++o) bias_.grad[o] += g.row(o).sum();
      MatrixMap<T>(dcol.data(), geom_.rows(), geom_.cols()).noalias() = w.transpose() * g;
      col2im(dcol.data(), geom_, dx.item(i));
    }
    return dx;
  }

  void init(const CounterRng& rng, double stddev) {
    init_normal(weight_, rng, stddev);
    std::fill(bias_.value.begin(), bias_.value.end(), T{});
  }

  Param<T>& weight() noexcept { return weight_; }
  Param<T>& bias() noexcept { return bias_; }
  void collect(std::vector<Param<T>*>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

 private:
  int in_ = 0, out_ = 0, kernel_ = 0, stride_ = 1, pad_ = 0;
  Param<T> weight_;
  Param<T> bias_;
  ConvGeometry geom_;
  int batch_ = 0;
  AlignedVector<T> cols_;
};

// Transposed convolution (adjoint of a strided Conv2d); weight layout
// (in, out, k, k). Output extent (in - 1) * stride - 2 * pad + k + output_pad.
template <typename T>
class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(const std::string& name, int in, int out, int kernel, int stride, int pad,
                  int output_pad)
      : in_(in), out_(out), kernel_(kernel), stride_(stride), pad_(pad), output_pad_(output_pad),
        weight_(name + ".weight", static_cast<std::size_t>(in) * out * kernel * kernel),
        bias_(name + ".bias", static_cast<std::size_t>(out)) {}

  int in_channels() const noexcept { return in_; }
  int out_channels() const noexcept { return out_; }

  BasicTensor<T> forward(const BasicTensor<T>& x) {
    if (x.c() != in_) {
      throw DimensionError(weight_.name + ": expected " + std::to_string(in_) +
                           " input channels, got " + std::to_string(x.c()));
    }
    const int oh = (x.h() - 1) * stride_ - 2 * pad_ + kernel_ + output_pad_;
    const int ow = (x.w() - 1) * stride_ - 2 * pad_ + kernel_ + output_pad_;
    geom_ = {out_, oh, ow, kernel_, stride_, pad_, x.h(), x.w()};
    if (conv_output_extent(oh, kernel_, stride_, pad_) != x.h() ||
        conv_output_extent(ow, kernel_, stride_, pad_) != x.w()) {
      throw DimensionError(weight_.name + ": inconsistent transposed geometry");
    }
    batch_ = x.n();
    input_ = x;
    BasicTensor<T> y(x.n(), out_, oh, ow);
    ConstMatrixMap<T> w(weight_.value.data(), in_, geom_.rows());
    AlignedVector<T> col(static_cast<std::size_t>(geom_.rows()) * geom_.cols());
    for (int i = 0; i < x.n(); ++i) {
      MatrixMap<T>(col.data(), geom_.rows(), geom_.cols()).noalias() =
          w.transpose() * ConstMatrixMap<T>(x.item(i), in_, geom_.cols());
      col2im(col.data(), geom_, y.item(i));
      for (int o = 0; o < out_; ++o) {
        T* p = y.channel(i, o);
        for (std::size_t j = 0; j < y.plane(); ++j) p[j] += bias_.value[o];
      }
    }
    return y;
  }

  BasicTensor<T> backward(const BasicTensor<T>& dy) {
    BasicTensor<T> dx(batch_, in_, geom_.out_h, geom_.out_w);
    ConstMatrixMap<T> w(weight_.value.data(), in_, geom_.rows());
    MatrixMap<T> dw(weight_.grad.data(), in_, geom_.rows());
    AlignedVector<T> dcol(static_cast<std::size_t>(geom_.rows()) * geom_.cols());
    for (int i = 0; i < batch_; ++i) {
      im2col(dy.item(i), geom_, dcol.data());
      ConstMatrixMap<T> g(dcol.data(), geom_.rows(), geom_.cols());
      ConstMatrixMap<T> x(input_.item(i), in_, geom_.cols());
      MatrixMap<T>(dx.item(i), in_, geom_.cols()).noalias() = w * g;
      dw.noalias() += x * g.transpose();
      for (int o = 0; o < out_; ++o) {
        const T* p = dy.channel(i, o);
        T acc{};
        for (std::size_t j = 0; j < dy.plane(); ++j) acc += p[j];
        bias_.grad[o] += acc;
      }
    }
    return dx;
  }

  void init(const CounterRng& rng, double stddev) {
    init_normal(weight_, rng, stddev);
    std::fill(bias_.value.begin(), bias_.value.end(), T{});
  }

  Param<T>& weight() noexcept { return weight_; }
  Param<T>& bias() noexcept { return bias_; }
  void collect(std::vector<Param<T>*>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

 private:
  int in_ = 0, out_ = 0, kernel_ = 0, stride_ = 2, pad_ = 0, output_pad_ = 0;
  Param<T> weight_;
  Param<T> bias_;
  ConvGeometry geom_;
  int batch_ = 0;
  BasicTensor<T> input_;
};

// Per-channel batch normalization. Training mode normalizes with the
// statistics of the current batch (over N, H, W) and updates the running
// estimates; inference mode uses the running estimates.
template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(const std::string& name, int channels, double eps = 1e-5, double momentum = 0.1)
      : channels_(channels), eps_(eps), momentum_(momentum),
        gamma_(name + ".gamma", static_cast<std::size_t>(channels), T{1}),
        beta_(name + ".beta", static_cast<std::size_t>(channels)),
        running_mean_{name + ".running_mean", std::vector<T>(channels, T{})},
        running_var_{name + ".running_var", std::vector<T>(channels, T{1})} {}

  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode) {
    if (x.c() != channels_) throw DimensionError(gamma_.name + ": channel count mismatch");
    mode_ = mode;
    xhat_ = BasicTensor<T>(x.n(), x.c(), x.h(), x.w());
    inv_std_.assign(channels_, T{});
    BasicTensor<T> y(x.n(), x.c(), x.h(), x.w());
    const std::size_t plane = x.plane();
    const double count = static_cast<double>(x.n()) * static_cast<double>(plane);
    for (int c = 0; c < channels_; ++c) {
      double mean = 0.0;
      double var = 0.0;
      if (mode == Mode::kTrain) {
        for (int i = 0; i < x.n(); ++i) {
          const T* p = x.channel(i, c);
          for (std::size_t j = 0; j < plane; ++j) mean += p[j];
        }
        mean /= count;
        for (int i = 0; i < x.n(); ++i) {
          const T* p = x.channel(i, c);
          for (std::size_t j = 0; j < plane; ++j) {
            const double d = p[j] - mean;
            var += d * d;
          }
        }
        var /= count;
        const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
        running_mean_.value[c] =
            static_cast<T>((1.0 - momentum_) * running_mean_.value[c] + momentum_ * mean);
        running_var_.value[c] =
            static_cast<T>((1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased);
      } else {
        mean = running_mean_.value[c];
        var = running_var_.value[c];
      }
      const T inv = static_cast<T>(1.0 / std::sqrt(var + eps_));
      const T m = static_cast<T>(mean);
      inv_std_[c] = inv;
      const T g = gamma_.value[c];
      const T b = beta_.value[c];
      for (int i = 0; i < x.n(); ++i) {
        const T* p = x.channel(i, c);
        T* h = xhat_.channel(i, c);
        T* o = y.channel(i, c);
        for (std::size_t j = 0; j < plane; ++j) {
          h[j] = (p[j] - m) * inv;
          o[j] = g * h[j] + b;
        }
      }
    }
    return y;
  }

  BasicTensor<T> backward(const BasicTensor<T>& dy) {
    BasicTensor<T> dx(dy.n(), dy.c(), dy.h(), dy.w());
    const std::size_t plane = dy.plane();
    const double count = static_cast<double>(dy.n()) * static_cast<double>(plane);
    for (int c = 0; c < channels_; ++c) {
      double sum_dy = 0.0;
      double sum_dy_xhat = 0.0;
      for (int i = 0; i < dy.n(); ++i) {
        const T* g = dy.channel(i, c);
        const T* h = xhat_.channel(i, c);
        for (std::size_t j = 0; j < plane; ++j) {
          sum_dy += g[j];
          sum_dy_xhat += static_cast<double>(g[j]) * h[j];
        }
      }
      gamma_.grad[c] += static_cast<T>(sum_dy_xhat);
      beta_.grad[c] += static_cast<T>(sum_dy);
      const T scale = gamma_.value[c] * inv_std_[c];
      if (mode_ == Mode::kTrain) {
        const T mean_dy = static_cast<T>(sum_dy / count);
        const T mean_dy_xhat = static_cast<T>(sum_dy_xhat / count);
        for (int i = 0; i < dy.n(); ++i) {
          const T* g = dy.channel(i, c);
          const T* h = xhat_.channel(i, c);
          T* o = dx.channel(i, c);
          for (std::size_t j = 0; j < plane; ++j) {
            o[j] = scale * (g[j] - mean_dy - h[j] * mean_dy_xhat);
          }
        }
      } else {
        for (int i = 0; i < dy.n(); ++i) {
          const T* g = dy.channel(i, c);
          T* o = dx.channel(i, c);
          for (std::size_t j = 0; j < plane; ++j) o[j] = scale * g[j];
        }
      }
    }
    return dx;
  }

  void init() {
    std::fill(gamma_.value.begin(), gamma_.value.end(), T{1});
    std::fill(beta_.value.begin(), beta_.value.end(), T{});
    std::fill(running_mean_.value.begin(), running_mean_.value.end(), T{});
    std::fill(running_var_.value.begin(), running_var_.value.end(), T{1});
  }

  Param<T>& gamma() noexcept { return gamma_; }
  Param<T>& beta() noexcept { return beta_; }
  void collect(std::vector<Param<T>*>& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
  }
  void collect_buffers(std::vector<Buffer<T>*>& out) {
    out.push_back(&running_mean_);
    out.push_back(&running_var_);
  }

 private:
  int channels_ = 0;
  double eps_ = 1e-5;
  double momentum_ = 0.1;
  Param<T> gamma_;
  Param<T> beta_;
  Buffer<T> running_mean_;
  Buffer<T> running_var_;
  Mode mode_ = Mode::kTrain;
  BasicTensor<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class LeakyReLU {
 public:
  explicit LeakyReLU(double slope = 0.2) : slope_(static_cast<T>(slope)) {}

  BasicTensor<T> forward(const BasicTensor<T>& x) {
    input_ = x;
    BasicTensor<T> y = x;
    for (auto& v : y.values()) v = v > T{} ? v : slope_ * v;
    return y;
  }
  BasicTensor<T> backward(const BasicTensor<T>& dy) const {
    BasicTensor<T> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (!(input_.data()[i] > T{})) dx.data()[i] *= slope_;
    }
    return dx;
  }

 private:
  T slope_;
  BasicTensor<T> input_;
};

template <typename T>
class ReLU {
 public:
  BasicTensor<T> forward(const BasicTensor<T>& x) {
    input_ = x;
    BasicTensor<T> y = x;
    for (auto& v : y.values()) v = v > T{} ? v : T{};
    return y;
  }
  BasicTensor<T> backward(const BasicTensor<T>& dy) const {
    BasicTensor<T> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (!(input_.data()[i] > T{})) dx.data()[i] = T{};
    }
    return dx;
  }

 private:
  BasicTensor<T> input_;
};

template <typename T>
class Tanh {
 public:
  BasicTensor<T> forward(const BasicTensor<T>& x) {
    output_ = x;
    for (auto& v : output_.values()) v = std::tanh(v);
    return output_;
  }
  BasicTensor<T> backward(const BasicTensor<T>& dy) const {
    BasicTensor<T> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const T y = output_.data()[i];
      dx.data()[i] *= T{1} - y * y;
    }
    return dx;
  }

 private:
  BasicTensor<T> output_;
};

template <typename T>
T sigmoid(T x) noexcept {
  if (x >= T{}) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

template <typename T>
class Sigmoid {
 public:
  BasicTensor<T> forward(const BasicTensor<T>& x) {
    output_ = x;
    for (auto& v : output_.values()) v = sigmoid(v);
    return output_;
  }
  BasicTensor<T> backward(const BasicTensor<T>& dy) const {
    BasicTensor<T> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const T s = output_.data()[i];
      dx.data()[i] *= s * (T{1} - s);
    }
    return dx;
  }

 private:
  BasicTensor<T> output_;
};

// Fully connected layer on the flattened (C, H, W) item; output (N, out, 1, 1).
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out)
      : in_(in), out_(out),
        weight_(name + ".weight", static_cast<std::size_t>(out) * in),
        bias_(name + ".bias", static_cast<std::size_t>(out)) {}

  BasicTensor<T> forward(const BasicTensor<T>& x) {
    if (static_cast<int>(x.item_size()) != in_) {
      throw DimensionError(weight_.name + ": expected " + std::to_string(in_) +
                           " features, got " + std::to_string(x.item_size()));
    }
    input_ = x;
    BasicTensor<T> y(x.n(), out_, 1, 1);
    ConstMatrixMap<T> xm(x.data(), x.n(), in_);
    ConstMatrixMap<T> w(weight_.value.data(), out_, in_);
    MatrixMap<T> ym(y.data(), x.n(), out_);
    ym.noalias() = xm * w.transpose();
    for (int i = 0; i < x.n(); ++i) {
      for (int o = 0; o < out_; ++o) ym(i, o) += bias_.value[o];
    }
    return y;
  }

  BasicTensor<T> backward(const BasicTensor<T>& dy) {
    BasicTensor<T> dx(input_.n(), input_.c(), input_.h(), input_.w());
    ConstMatrixMap<T> g(dy.data(), dy.n(), out_);
    ConstMatrixMap<T> xm(input_.data(), input_.n(), in_);
    ConstMatrixMap<T> w(weight_.value.data(), out_, in_);
    MatrixMap<T>(weight_.grad.data(), out_, in_).noalias() += g.transpose() * xm;
    for (int o = 0; o < out_; ++o) bias_.grad[o] += g.col(o).sum();
    MatrixMap<T>(dx.data(), dy.n(), in_).noalias() = g * w;
    return dx;
  }

  void init(const CounterRng& rng, double stddev) {
    init_normal(weight_, rng, stddev);
    std::fill(bias_.value.begin(), bias_.value.end(), T{});
  }

  Param<T>& weight() noexcept { return weight_; }
  Param<T>& bias() noexcept { return bias_; }
  void collect(std::vector<Param<T>*>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

 private:
  int in_ = 0, out_ = 0;
  Param<T> weight_;
  Param<T> bias_;
  BasicTensor<T> input_;
};

}  // namespace vstain::net
