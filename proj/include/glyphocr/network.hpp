#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "glyphocr/segment.hpp"
#include "glyphocr/tensor.hpp"

namespace glyphocr {

/// Layer sizes for Conv -> ReLU -> Pool -> Conv -> ReLU -> Pool -> Dense.
/// The production network is `standard()` (28 -> 24 -> 12 -> 8 -> 4, with
/// 16 then 32 channels); smaller geometries exist for gradient checks.
struct NetGeometry {
  int input = kGlyphSide;
  int kernel1 = 5;
  int channels1 = 16;
  int kernel2 = 5;
  int channels2 = 32;

  static constexpr NetGeometry standard() { return {}; }

  int conv1_side() const noexcept { return input - kernel1 + 1; }
  int pool1_side() const noexcept { return conv1_side() / 2; }
  int conv2_side() const noexcept { return pool1_side() - kernel2 + 1; }
  int pool2_side() const noexcept { return conv2_side() / 2; }
  int embedding_size() const noexcept { return channels2 * pool2_side() * pool2_side(); }

  /// Throws ShapeMismatch unless every stage has a positive, even side where
  /// a pool follows.
  void validate() const;

  bool operator==(const NetGeometry&) const = default;
};

/// All trainable parameters, in the order they are serialized.
struct NetParams {
  NetGeometry geometry;
  int num_classes = 0;
  std::vector<double> conv1_w, conv1_b;  // [c1][1][k1][k1], [c1]
  std::vector<double> conv2_w, conv2_b;  // [c2][c1][k2][k2], [c2]
  std::vector<double> dense_w, dense_b;  // [K][E], [K]

  static NetParams zeros(NetGeometry geometry, int num_classes);

  /// Uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static NetParams glorot(NetGeometry geometry, int num_classes, std::uint64_t seed);

  std::array<std::span<double>, 6> blocks() noexcept;
  std::array<std::span<const double>, 6> blocks() const noexcept;
  std::size_t parameter_count() const noexcept;

  /// Throws ShapeMismatch when any buffer disagrees with geometry and K.
  void check_shapes() const;

  /// Rounds every value to the nearest float, as stored in checkpoints.
  void round_to_float();

  bool operator==(const NetParams&) const = default;
};

/// Intermediate activations of one forward pass, kept for backprop.
struct ForwardTrace {
  Tensor input;       // (1, n, n)
  Tensor conv1;       // pre-activation
  Tensor relu1;
  Tensor pool1;
  std::vector<std::uint32_t> pool1_argmax;
  Tensor conv2;
  Tensor relu2;
  Tensor pool2;
  std::vector<std::uint32_t> pool2_argmax;
  Tensor embedding;   // (E,)
  Tensor logits;      // (K,)
  Tensor probs;       // (K,)
};

struct ForwardResult {
  Tensor logits;
  Tensor probs;
  Tensor embedding;
};

Tensor block_tensor(const GlyphBlock& block);

ForwardTrace forward_trace(const NetParams& params, const Tensor& input);
ForwardResult forward(const NetParams& params, const Tensor& input);
ForwardResult forward(const NetParams& params, const GlyphBlock& block);

/// -ln(max(p[class], 1e-12)).
double loss_softmax(const Tensor& probs, int class_id);

/// d^2 for a positive pair, max(0, margin - d)^2 otherwise.
double loss_contrastive(const Tensor& e1, const Tensor& e2, bool positive, double margin);

struct LossAndGradients {
  double loss = 0.0;
  NetParams gradients;
};

/// Backpropagates upstream gradients on the logits and/or the embedding.
NetParams backward(const NetParams& params, const ForwardTrace& trace, const Tensor* grad_logits,
                   const Tensor* grad_embedding, bool need_conv = true);

/// Softmax cross-entropy gradients for one example.
LossAndGradients gradients(const NetParams& params, const Tensor& input, int target);

/// Contrastive gradients through both forward passes of a pair.
LossAndGradients contrastive_gradients(const NetParams& params, const Tensor& first, const Tensor& second,
                                       bool positive, double margin);

void add_scaled(NetParams& into, const NetParams& delta, double scale);

}  // namespace glyphocr
