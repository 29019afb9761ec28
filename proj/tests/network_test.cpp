#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glyphocr/errors.hpp"
#include "glyphocr/network.hpp"
#include "oracles.hpp"

using namespace glyphocr;

namespace {

constexpr NetGeometry kTiny{8, 5, 2, 1, 3};  // 8 -> 4 -> 2 -> 2 -> 1, E = 3

Tensor random_input(int side, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(side) * side);
  for (auto& x : v) x = dist(rng);
  return Tensor({1, static_cast<std::size_t>(side), static_cast<std::size_t>(side)}, std::move(v));
}

double ce_loss(const NetParams& p, const Tensor& in, int target) { return loss_softmax(forward(p, in).probs, target); }

}  // namespace

TEST(Network, ShapeTrace) {
  const NetParams p = NetParams::glorot(NetGeometry::standard(), 10, 1);
  std::mt19937_64 rng(1);
  const ForwardTrace t = forward_trace(p, random_input(28, rng));
  EXPECT_EQ(t.conv1.shape(), (std::vector<std::size_t>{16, 24, 24}));
  EXPECT_EQ(t.pool1.shape(), (std::vector<std::size_t>{16, 12, 12}));
  EXPECT_EQ(t.conv2.shape(), (std::vector<std::size_t>{32, 8, 8}));
  EXPECT_EQ(t.pool2.shape(), (std::vector<std::size_t>{32, 4, 4}));
  EXPECT_EQ(t.embedding.shape(), (std::vector<std::size_t>{512}));
  EXPECT_EQ(t.logits.shape(), (std::vector<std::size_t>{10}));
  EXPECT_EQ(p.parameter_count(), 16u * 25 + 16 + 32u * 16 * 25 + 32 + 10u * 512 + 10);
}

TEST(Network, RejectsWrongInputShape) {
  const NetParams p = NetParams::glorot(NetGeometry::standard(), 3, 1);
  try {
    forward(p, Tensor({1, 27, 28}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Network, ZeroWeightsGiveUniformProbabilities) {
  const NetParams p = NetParams::zeros(NetGeometry::standard(), 4);
  std::mt19937_64 rng(2);
  const auto r = forward(p, random_input(28, rng));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(r.probs[i], 0.25);
  EXPECT_NEAR(loss_softmax(r.probs, 2), std::log(4.0), 1e-12);
}

TEST(Network, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const NetParams p = NetParams::glorot(NetGeometry::standard(), 7, trial);
    const auto r = forward(p, random_input(28, rng));
    double sum = 0;
    for (std::size_t i = 0; i < 7; ++i) sum += r.probs[i];
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Loss, SoftmaxExamples) {
  EXPECT_NEAR(loss_softmax(Tensor({4}, 0.25), 0), 1.3863, 1e-4);
  EXPECT_DOUBLE_EQ(loss_softmax(Tensor({2}, {0, 1}), 1), 0.0);
  EXPECT_NEAR(loss_softmax(Tensor({2}, {0, 1}), 0), 27.631, 1e-3);
  EXPECT_THROW(loss_softmax(Tensor({2}, {0.5, 0.5}), 2), Error);
}

TEST(Loss, ContrastiveExamples) {
  const Tensor a({2}, {1, 2});
  EXPECT_DOUBLE_EQ(loss_contrastive(a, a, true, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(loss_contrastive(Tensor({2}, {0, 0}), Tensor({2}, {2, 0}), false, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(loss_contrastive(Tensor({2}, {0, 0}), Tensor({2}, {0.5, 0}), false, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(loss_contrastive(Tensor({2}, {0, 0}), Tensor({2}, {3, 4}), true, 1.0), 25.0);
}

TEST(Gradients, TinyNetMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  NetParams p = NetParams::glorot(kTiny, 3, 17);
  // Nonzero biases keep ReLUs away from exact zero.
  for (auto& b : p.conv1_b) b = 0.1;
  for (auto& b : p.conv2_b) b = 0.1;
  const Tensor in = random_input(8, rng);
  const auto analytic = gradients(p, in, 1);
  EXPECT_NEAR(analytic.loss, ce_loss(p, in, 1), 1e-12);
  auto g = analytic.gradients.blocks();
  auto w = p.blocks();
  for (std::size_t b = 0; b < w.size(); ++b) {
    for (std::size_t i = 0; i < w[b].size(); ++i) {
      const double numeric = oracle::central_difference(w[b][i], 1e-5, [&] { return ce_loss(p, in, 1); });
      EXPECT_LT(oracle::relative_error(g[b][i], numeric), 1e-4) << "block " << b << " index " << i;
    }
  }
}

TEST(Gradients, ZeroInputBiasGradientIsProbsMinusOneHot) {
  std::mt19937_64 rng(5);
  NetParams p = NetParams::glorot(NetGeometry::standard(), 5, 3);
  for (auto& b : p.dense_b) b = std::uniform_real_distribution<double>(-1, 1)(rng);
  const Tensor zero({1, 28, 28});
  const auto r = gradients(p, zero, 2);
  const auto probs = forward(p, zero).probs;
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_NEAR(r.gradients.dense_b[k], probs[k] - (k == 2 ? 1.0 : 0.0), 1e-12);
  }
  // All conv biases are zero so every ReLU is dead and nothing upstream moves.
  for (double v : r.gradients.conv1_w) EXPECT_EQ(v, 0.0);
  for (double v : r.gradients.conv2_w) EXPECT_EQ(v, 0.0);
}

TEST(Gradients, ContrastiveMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  NetParams p = NetParams::glorot(kTiny, 2, 23);
  for (auto& b : p.conv1_b) b = 0.1;
  for (auto& b : p.conv2_b) b = 0.1;
  const Tensor a = random_input(8, rng);
  const Tensor b = random_input(8, rng);
  for (bool positive : {true, false}) {
    const double d = std::sqrt(loss_contrastive(forward(p, a).embedding, forward(p, b).embedding, true, 1.0));
    const double margin = positive ? 1.0 : 2.0 * d + 0.1;  // keep the hinge active
    const auto analytic = contrastive_gradients(p, a, b, positive, margin);
    auto loss = [&] { return loss_contrastive(forward(p, a).embedding, forward(p, b).embedding, positive, margin); };
    EXPECT_NEAR(analytic.loss, loss(), 1e-12);
    auto g = analytic.gradients.blocks();
    auto w = p.blocks();
    for (std::size_t blk = 0; blk < 4; ++blk) {
      for (std::size_t i = 0; i < w[blk].size(); ++i) {
        const double numeric = oracle::central_difference(w[blk][i], 1e-5, loss);
        EXPECT_LT(oracle::relative_error(g[blk][i], numeric), 1e-4) << "block " << blk << " index " << i;
      }
    }
    for (double v : analytic.gradients.dense_w) EXPECT_EQ(v, 0.0);
  }
}

TEST(Params, GlorotIsSeededAndBounded) {
  const NetParams a = NetParams::glorot(NetGeometry::standard(), 6, 9);
  EXPECT_EQ(a, NetParams::glorot(NetGeometry::standard(), 6, 9));
  EXPECT_NE(a, NetParams::glorot(NetGeometry::standard(), 6, 10));
  const double limit = std::sqrt(6.0 / (512 + 6));
  for (double v : a.dense_w) EXPECT_LE(std::abs(v), limit);
  for (double v : a.dense_b) EXPECT_EQ(v, 0.0);
  NetParams bad = a;
  bad.dense_b.pop_back();
  EXPECT_THROW(bad.check_shapes(), Error);
}
