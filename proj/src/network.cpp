#include "glyphocr/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "glyphocr/errors.hpp"
#include "glyphocr/layers.hpp"
#include "glyphocr/rng.hpp"

namespace glyphocr {

namespace {

constexpr double kProbFloor = 1e-12;

std::size_t sq(int v) { return static_cast<std::size_t>(v) * static_cast<std::size_t>(v); }

void expect_shape(const Tensor& t, std::vector<std::size_t> shape, const char* stage) {
  if (t.shape() != shape) {
    fail(ErrorCode::Internal, std::string("layer boundary '") + stage + "' produced " + t.shape_string());
  }
}

void fill_uniform(std::span<double> values, double limit, std::mt19937_64& rng) {
  for (double& v : values) v = (2.0 * uniform01(rng) - 1.0) * limit;
}

}  // namespace

void NetGeometry::validate() const {
  const bool ok = input >= 1 && kernel1 >= 1 && kernel2 >= 1 && channels1 >= 1 && channels2 >= 1 &&
                  conv1_side() >= 2 && conv1_side() % 2 == 0 && conv2_side() >= 2 && conv2_side() % 2 == 0;
  if (!ok) fail(ErrorCode::ShapeMismatch, "network geometry does not reduce to an even feature map");
}

NetParams NetParams::zeros(NetGeometry geometry, int num_classes) {
  geometry.validate();
  if (num_classes < 1) fail(ErrorCode::ShapeMismatch, "network needs at least one class");
  NetParams p;
  p.geometry = geometry;
  p.num_classes = num_classes;
  p.conv1_w.assign(static_cast<std::size_t>(geometry.channels1) * sq(geometry.kernel1), 0.0);
  p.conv1_b.assign(static_cast<std::size_t>(geometry.channels1), 0.0);
  p.conv2_w.assign(static_cast<std::size_t>(geometry.channels2) * geometry.channels1 * sq(geometry.kernel2), 0.0);
  p.conv2_b.assign(static_cast<std::size_t>(geometry.channels2), 0.0);
  p.dense_w.assign(static_cast<std::size_t>(num_classes) * geometry.embedding_size(), 0.0);
  p.dense_b.assign(static_cast<std::size_t>(num_classes), 0.0);
  return p;
}

NetParams NetParams::glorot(NetGeometry geometry, int num_classes, std::uint64_t seed) {
  NetParams p = zeros(geometry, num_classes);
  std::mt19937_64 rng(seed);
  const auto& g = geometry;
  const double k1 = static_cast<double>(sq(g.kernel1));
  const double k2 = static_cast<double>(sq(g.kernel2));
  fill_uniform(p.conv1_w, std::sqrt(6.0 / (k1 + g.channels1 * k1)), rng);
  fill_uniform(p.conv2_w, std::sqrt(6.0 / (g.channels1 * k2 + g.channels2 * k2)), rng);
  fill_uniform(p.dense_w, std::sqrt(6.0 / (g.embedding_size() + num_classes)), rng);
  return p;
}

std::array<std::span<double>, 6> NetParams::blocks() noexcept {
  return {conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b};
}

std::array<std::span<const double>, 6> NetParams::blocks() const noexcept {
  return {conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b};
}

std::size_t NetParams::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& b : blocks()) n += b.size();
  return n;
}

void NetParams::check_shapes() const {
  const NetParams expected = zeros(geometry, num_classes);
  const auto mine = blocks();
  const auto want = expected.blocks();
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].size() != want[i].size()) {
      fail(ErrorCode::ShapeMismatch, "parameter block " + std::to_string(i) + " has " + std::to_string(mine[i].size()) +
                                         " values, expected " + std::to_string(want[i].size()));
    }
  }
}

void NetParams::round_to_float() {
  for (auto block : blocks()) {
    for (double& v : block) v = static_cast<double>(static_cast<float>(v));
  }
}

Tensor block_tensor(const GlyphBlock& block) {
  return Tensor({1, kGlyphSide, kGlyphSide}, std::vector<double>(block.values.begin(), block.values.end()));
}

ForwardTrace forward_trace(const NetParams& params, const Tensor& input) {
  const NetGeometry& g = params.geometry;
  const auto n = static_cast<std::size_t>(g.input);
  if (input.shape() != std::vector<std::size_t>{1, n, n}) {
    fail(ErrorCode::ShapeMismatch, "network expects (1," + std::to_string(n) + "," + std::to_string(n) + "), got " +
                                       input.shape_string());
  }
  params.check_shapes();
  const auto c1 = static_cast<std::size_t>(g.channels1);
  const auto c2 = static_cast<std::size_t>(g.channels2);

  ForwardTrace t;
  t.input = input;
  t.conv1 = layers::conv2d(input, params.conv1_w, params.conv1_b, g.kernel1);
  expect_shape(t.conv1, {c1, static_cast<std::size_t>(g.conv1_side()), static_cast<std::size_t>(g.conv1_side())}, "conv1");
  t.relu1 = layers::relu(t.conv1);
  auto pool1 = layers::maxpool2x2(t.relu1);
  t.pool1 = std::move(pool1.output);
  t.pool1_argmax = std::move(pool1.argmax);
  expect_shape(t.pool1, {c1, static_cast<std::size_t>(g.pool1_side()), static_cast<std::size_t>(g.pool1_side())}, "pool1");
  t.conv2 = layers::conv2d(t.pool1, params.conv2_w, params.conv2_b, g.kernel2);
  expect_shape(t.conv2, {c2, static_cast<std::size_t>(g.conv2_side()), static_cast<std::size_t>(g.conv2_side())}, "conv2");
  t.relu2 = layers::relu(t.conv2);
  auto pool2 = layers::maxpool2x2(t.relu2);
  t.pool2 = std::move(pool2.output);
  t.pool2_argmax = std::move(pool2.argmax);
  expect_shape(t.pool2, {c2, static_cast<std::size_t>(g.pool2_side()), static_cast<std::size_t>(g.pool2_side())}, "pool2");
  t.embedding = Tensor({t.pool2.size()}, std::vector<double>(t.pool2.data().begin(), t.pool2.data().end()));
  t.logits = layers::dense(t.embedding.data(), params.dense_w, params.dense_b, static_cast<std::size_t>(params.num_classes));
  t.probs = layers::softmax(t.logits);
  return t;
}

ForwardResult forward(const NetParams& params, const Tensor& input) {
  ForwardTrace t = forward_trace(params, input);
  return {std::move(t.logits), std::move(t.probs), std::move(t.embedding)};
}

ForwardResult forward(const NetParams& params, const GlyphBlock& block) {
  return forward(params, block_tensor(block));
}

double loss_softmax(const Tensor& probs, int class_id) {
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= probs.size()) {
    fail(ErrorCode::BadClassId, "class " + std::to_string(class_id) + " outside " + std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[static_cast<std::size_t>(class_id)], kProbFloor));
}

double loss_contrastive(const Tensor& e1, const Tensor& e2, bool positive, double margin) {
  if (!(margin > 0)) fail(ErrorCode::InvalidArgument, "contrastive margin must be > 0");
  if (e1.size() != e2.size()) fail(ErrorCode::LengthMismatch, "embedding lengths differ");
  double d2 = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) d2 += (e1[i] - e2[i]) * (e1[i] - e2[i]);
  if (positive) return d2;
  const double gap = std::max(0.0, margin - std::sqrt(d2));
  return gap * gap;
}

NetParams backward(const NetParams& params, const ForwardTrace& trace, const Tensor* grad_logits,
                   const Tensor* grad_embedding, bool need_conv) {
  const NetGeometry& g = params.geometry;
  NetParams grads = NetParams::zeros(g, params.num_classes);

  Tensor g_emb({trace.embedding.size()});
  if (grad_logits != nullptr) {
    g_emb = layers::dense_backward(trace.embedding.data(), params.dense_w, *grad_logits, grads.dense_w, grads.dense_b);
  }
  if (grad_embedding != nullptr) {
    if (grad_embedding->size() != g_emb.size()) fail(ErrorCode::ShapeMismatch, "embedding gradient length");
    for (std::size_t i = 0; i < g_emb.size(); ++i) g_emb[i] += (*grad_embedding)[i];
  }
  if (!need_conv) return grads;

  const Tensor g_pool2(trace.pool2.shape(), std::vector<double>(g_emb.data().begin(), g_emb.data().end()));
  const Tensor g_relu2 = layers::maxpool2x2_backward(trace.relu2.shape(), trace.pool2_argmax, g_pool2);
  const Tensor g_conv2 = layers::relu_backward(trace.conv2, g_relu2);
  const Tensor g_pool1 = layers::conv2d_backward(trace.pool1, params.conv2_w, g.kernel2, g_conv2, grads.conv2_w, grads.conv2_b);
  const Tensor g_relu1 = layers::maxpool2x2_backward(trace.relu1.shape(), trace.pool1_argmax, g_pool1);
  const Tensor g_conv1 = layers::relu_backward(trace.conv1, g_relu1);
  layers::conv2d_backward(trace.input, params.conv1_w, g.kernel1, g_conv1, grads.conv1_w, grads.conv1_b, false);
  return grads;
}

LossAndGradients gradients(const NetParams& params, const Tensor& input, int target) {
  const ForwardTrace trace = forward_trace(params, input);
  const double loss = loss_softmax(trace.probs, target);
  Tensor g_logits = trace.probs;
  g_logits[static_cast<std::size_t>(target)] -= 1.0;
  return {loss, backward(params, trace, &g_logits, nullptr)};
}

LossAndGradients contrastive_gradients(const NetParams& params, const Tensor& first, const Tensor& second,
                                       bool positive, double margin) {
  const ForwardTrace a = forward_trace(params, first);
  const ForwardTrace b = forward_trace(params, second);
  const double loss = loss_contrastive(a.embedding, b.embedding, positive, margin);

  const std::size_t n = a.embedding.size();
  Tensor g_a({n});
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) d2 += (a.embedding[i] - b.embedding[i]) * (a.embedding[i] - b.embedding[i]);
  const double d = std::sqrt(d2);
  double coeff = 0.0;  // dL/de_a = coeff * (e_a - e_b)
  if (positive) {
    coeff = 2.0;
  } else if (d < margin && d > 0.0) {
    coeff = -2.0 * (margin - d) / d;
  }
  for (std::size_t i = 0; i < n; ++i) g_a[i] = coeff * (a.embedding[i] - b.embedding[i]);
  Tensor g_b = g_a;
  for (double& v : g_b.data()) v = -v;

  NetParams grads = backward(params, a, nullptr, &g_a);
  add_scaled(grads, backward(params, b, nullptr, &g_b), 1.0);
  return {loss, std::move(grads)};
}

void add_scaled(NetParams& into, const NetParams& delta, double scale) {
  auto dst = into.blocks();
  const auto src = delta.blocks();
  for (std::size_t b = 0; b < dst.size(); ++b) {
    if (dst[b].size() != src[b].size()) fail(ErrorCode::ShapeMismatch, "parameter block sizes differ");
    for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += scale * src[b][i];
  }
}

}  // namespace glyphocr
