#pragma once

#include <vector>

#include "vstain/net/architecture.hpp"
#include "vstain/net/layers.hpp"

namespace vstain::net {

template <typename T>
struct DiscriminatorOutput {
  std::vector<T> logits;
  std::vector<T> scores;  // sigmoid(logits), in (0, 1)
};

template <typename T>
class BasicDiscriminator {
 public:
  BasicDiscriminator() = default;

  explicit BasicDiscriminator(const DiscriminatorConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int k = cfg_.kernel;
    stem_ = Conv2d<T>("discriminator.stem", cfg_.in_channels, cfg_.width(0), k, 2, k / 2);
    stem_bn_ = BatchNorm2d<T>("discriminator.stem_bn", cfg_.width(0));
    for (int b = 1; b <= cfg_.block_count; ++b) {
      const std::string name = "discriminator.block" + std::to_string(b);
      blocks_.push_back({Conv2d<T>(name + ".conv", cfg_.width(b - 1), cfg_.width(b), k, 2, k / 2),
                         BatchNorm2d<T>(name + ".bn", cfg_.width(b)),
                         LeakyReLU<T>(cfg_.leaky_slope)});
    }
    const int side = cfg_.final_side();
    fc_ = Linear<T>("discriminator.fc", cfg_.width(cfg_.block_count) * side * side, 1);
  }

  const DiscriminatorConfig& config() const noexcept { return cfg_; }

  void init(const CounterRng& rng) {
    stem_.init(rng, kInitStddev);
    stem_bn_.init();
    for (auto& b : blocks_) {
      b.conv.init(rng, kInitStddev);
      b.bn.init();
    }
    fc_.init(rng, kInitStddev);
  }

  // Scores the candidate conditioned on the input images; the two are
  // concatenated along channels in that order.
  DiscriminatorOutput<T> forward(const BasicTensor<T>& inputs, const BasicTensor<T>& candidate,
                                 Mode mode) {
    if (inputs.n() != candidate.n() || inputs.h() != candidate.h() ||
        inputs.w() != candidate.w()) {
      throw DimensionError("discriminator inputs " + inputs.shape_string() + " and candidate " +
                           candidate.shape_string() + " disagree");
    }
    if (inputs.c() + candidate.c() != cfg_.in_channels) {
      throw DimensionError("discriminator expects " + std::to_string(cfg_.in_channels) +
                           " channels in total");
    }
    if (inputs.h() != cfg_.input_side || inputs.w() != cfg_.input_side) {
      throw DimensionError("discriminator expects " + std::to_string(cfg_.input_side) +
                           " pixel patches");
    }
    input_channels_ = inputs.c();
    BasicTensor<T> h = stem_bn_.forward(stem_.forward(concat_channels(inputs, candidate)), mode);
    for (auto& b : blocks_) h = b.act.forward(b.bn.forward(b.conv.forward(h), mode));
    const BasicTensor<T> logits = fc_.forward(h);
    const BasicTensor<T> scores = sigmoid_.forward(logits);
    return {{logits.values().begin(), logits.values().end()},
            {scores.values().begin(), scores.values().end()}};
  }

  // Takes d loss / d logit per batch item and returns the gradient with
  // respect to the candidate image. Parameter gradients accumulate.
  BasicTensor<T> backward(const std::vector<T>& grad_logits) {
    BasicTensor<T> g(static_cast<int>(grad_logits.size()), 1, 1, 1);
    std::copy(grad_logits.begin(), grad_logits.end(), g.data());
    g = fc_.backward(g);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      g = it->conv.backward(it->bn.backward(it->act.backward(g)));
    }
    g = stem_.backward(stem_bn_.backward(g));
    BasicTensor<T> g_inputs, g_candidate;
    split_channels(g, input_channels_, g_inputs, g_candidate);
    return g_candidate;
  }

  std::vector<Param<T>*> params() {
    std::vector<Param<T>*> out;
    stem_.collect(out);
    stem_bn_.collect(out);
    for (auto& b : blocks_) {
      b.conv.collect(out);
      b.bn.collect(out);
    }
    fc_.collect(out);
    return out;
  }

  std::vector<Buffer<T>*> buffers() {
    std::vector<Buffer<T>*> out;
    stem_bn_.collect_buffers(out);
    for (auto& b : blocks_) b.bn.collect_buffers(out);
    return out;
  }

  void zero_grad() {
    for (auto* p : params()) p->zero_grad();
  }

 private:
  struct Block {
    Conv2d<T> conv;
    BatchNorm2d<T> bn;
    LeakyReLU<T> act;
  };

  DiscriminatorConfig cfg_;
  Conv2d<T> stem_;
  BatchNorm2d<T> stem_bn_;
  std::vector<Block> blocks_;
  Linear<T> fc_;
  Sigmoid<T> sigmoid_;
  int input_channels_ = 0;
};

using Discriminator = BasicDiscriminator<float>;

}  // namespace vstain::net
