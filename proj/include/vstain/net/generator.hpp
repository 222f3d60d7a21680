#pragma once

#include <vector>

#include "vstain/net/architecture.hpp"
#include "vstain/net/layers.hpp"

namespace vstain::net {

template <typename T>
class BasicGenerator {
 public:
  BasicGenerator() = default;

  explicit BasicGenerator(const GeneratorConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int k = cfg_.kernel;
    stem_ = Conv2d<T>("generator.stem", cfg_.in_channels, cfg_.width(0), k, 2, k / 2);
    for (int l = 1; l <= cfg_.depth; ++l) {
      const std::string name = "generator.down" + std::to_string(l);
      down_.push_back({LeakyReLU<T>(cfg_.leaky_slope),
                       Conv2d<T>(name + ".conv", cfg_.width(l - 1), cfg_.width(l), k, 2, k / 2),
                       BatchNorm2d<T>(name + ".bn", cfg_.width(l))});
    }
    for (int l = cfg_.depth; l >= 1; --l) {
      const std::string name = "generator.up" + std::to_string(l);
      const int in = l == cfg_.depth ? cfg_.width(l) : 2 * cfg_.width(l);
      up_.push_back({ReLU<T>(),
                     ConvTranspose2d<T>(name + ".conv", in, cfg_.width(l - 1), k, 2, k / 2, 1),
                     BatchNorm2d<T>(name + ".bn", cfg_.width(l - 1))});
    }
    head_ = ConvTranspose2d<T>("generator.head", 2 * cfg_.width(0), cfg_.out_channels, k, 2,
                               k / 2, 1);
  }

  const GeneratorConfig& config() const noexcept { return cfg_; }

  // Weights ~ N(0, 0.02^2) from per-parameter streams, biases 0, batch norm
  // scale 1 / shift 0.
  void init(const CounterRng& rng) {
    stem_.init(rng, kInitStddev);
    for (auto& d : down_) {
      d.conv.init(rng, kInitStddev);
      d.bn.init();
    }
    for (auto& u : up_) {
      u.conv.init(rng, kInitStddev);
      u.bn.init();
    }
    head_.init(rng, kInitStddev);
  }

  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode) {
    if (x.c() != cfg_.in_channels) {
      throw DimensionError("generator expects " + std::to_string(cfg_.in_channels) +
                           " input channels, got " + std::to_string(x.c()));
    }
    if (x.h() != x.w()) throw DimensionError("generator input must be square");
    cfg_.check_input_side(x.h());

    skips_.assign(cfg_.depth + 1, {});
    skips_[0] = stem_.forward(x);
    for (int l = 1; l <= cfg_.depth; ++l) {
      auto& d = down_[l - 1];
      skips_[l] = d.bn.forward(d.conv.forward(d.act.forward(skips_[l - 1])), mode);
    }
    BasicTensor<T> u = skips_[cfg_.depth];
    for (int j = 0; j < cfg_.depth; ++j) {
      const int level = cfg_.depth - j;
      auto& up = up_[j];
      BasicTensor<T> d = up.bn.forward(up.conv.forward(up.act.forward(u)), mode);
      u = concat_channels(d, skips_[level - 1]);
    }
    return out_act_.forward(head_.forward(head_act_.forward(u)));
  }

  // Gradient with respect to the input of the last forward call; parameter
  // gradients are accumulated.
  BasicTensor<T> backward(const BasicTensor<T>& dy) {
    BasicTensor<T> gu = head_act_.backward(head_.backward(out_act_.backward(dy)));
    std::vector<BasicTensor<T>> gskip(cfg_.depth + 1);
    for (int level = 1; level <= cfg_.depth; ++level) {
      auto& up = up_[cfg_.depth - level];
      BasicTensor<T> gd, gs;
      split_channels(gu, cfg_.width(level - 1), gd, gs);
      add_into(gskip[level - 1], gs);
      BasicTensor<T> g = up.act.backward(up.conv.backward(up.bn.backward(gd)));
      if (level == cfg_.depth) {
        add_into(gskip[level], g);
      } else {
        gu = std::move(g);
      }
    }
    for (int l = cfg_.depth; l >= 1; --l) {
      auto& d = down_[l - 1];
      add_into(gskip[l - 1], d.act.backward(d.conv.backward(d.bn.backward(gskip[l]))));
    }
    return stem_.backward(gskip[0]);
  }

  std::vector<Param<T>*> params() {
    std::vector<Param<T>*> out;
    stem_.collect(out);
    for (auto& d : down_) {
      d.conv.collect(out);
      d.bn.collect(out);
    }
    for (auto& u : up_) {
      u.conv.collect(out);
      u.bn.collect(out);
    }
    head_.collect(out);
    return out;
  }

  std::vector<Buffer<T>*> buffers() {
    std::vector<Buffer<T>*> out;
    for (auto& d : down_) d.bn.collect_buffers(out);
    for (auto& u : up_) u.bn.collect_buffers(out);
    return out;
  }

  void zero_grad() {
    for (auto* p : params()) p->zero_grad();
  }

 private:
  struct Down {
    LeakyReLU<T> act;
    Conv2d<T> conv;
    BatchNorm2d<T> bn;
  };
  struct Up {
    ReLU<T> act;
    ConvTranspose2d<T> conv;
    BatchNorm2d<T> bn;
  };

  GeneratorConfig cfg_;
  Conv2d<T> stem_;
  std::vector<Down> down_;
  std::vector<Up> up_;  // deepest level first
  ReLU<T> head_act_;
  ConvTranspose2d<T> head_;
  Tanh<T> out_act_;
  std::vector<BasicTensor<T>> skips_;
};

using Generator = BasicGenerator<float>;

}  // namespace vstain::net
