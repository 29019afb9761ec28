#include "glyphocr/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "glyphocr/errors.hpp"
#include "glyphocr/rng.hpp"

namespace glyphocr {

namespace {

void sgd_step(NetParams& params, const NetParams& grad_sum, double lr, std::size_t batch, bool freeze_conv) {
  const double scale = -lr / static_cast<double>(batch);
  auto dst = params.blocks();
  const auto src = grad_sum.blocks();
  const std::size_t first = freeze_conv ? 4 : 0;
  for (std::size_t b = first; b < dst.size(); ++b) {
    for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += scale * src[b][i];
  }
}

void zero(NetParams& p) {
  for (auto block : p.blocks()) std::fill(block.begin(), block.end(), 0.0);
}

NetParams initial_params(const Corpus& corpus, const TrainConfig& config, const Checkpoint* pretrained) {
  const int k = corpus.labels.size();
  NetParams params = NetParams::glorot(NetGeometry::standard(), k, config.seed);
  if (pretrained == nullptr) return params;

  const NetParams& pre = pretrained->params;
  if (pre.geometry != params.geometry) fail(ErrorCode::ShapeMismatch, "pretrained network geometry differs");
  pre.check_shapes();
  params.conv1_w = pre.conv1_w;
  params.conv1_b = pre.conv1_b;
  params.conv2_w = pre.conv2_w;
  params.conv2_b = pre.conv2_b;
  if (pre.num_classes == k) {
    params.dense_w = pre.dense_w;
    params.dense_b = pre.dense_b;
  }
  return params;
}

struct PairIndex {
  std::vector<std::vector<std::size_t>> by_class;
};

std::size_t draw_partner(const std::vector<LabeledExample>& data, const PairIndex& index, std::size_t anchor,
                         bool want_same, std::mt19937_64& rng) {
  const auto& own = index.by_class[static_cast<std::size_t>(data[anchor].class_id)];
  const bool can_same = own.size() >= 2;
  const bool can_diff = own.size() < data.size();
  if ((want_same && can_same) || !can_diff) {
    std::size_t pick = anchor;
    while (pick == anchor && own.size() >= 2) pick = own[uniform_index(rng, own.size())];
    return pick;
  }
  std::size_t pick = anchor;
  while (data[pick].class_id == data[anchor].class_id) pick = uniform_index(rng, data.size());
  return pick;
}

}  // namespace

std::string_view to_string(TrainMode mode) noexcept {
  return mode == TrainMode::contrastive ? "contrastive" : "softmax";
}

TrainMode parse_train_mode(std::string_view text) {
  if (text == "softmax") return TrainMode::softmax;
  if (text == "contrastive") return TrainMode::contrastive;
  fail(ErrorCode::InvalidArgument, "unknown training mode '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) fail(ErrorCode::InvalidArgument, "learning rate must be > 0");
  if (epochs < 1) fail(ErrorCode::InvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorCode::InvalidArgument, "batch size must be >= 1");
  if (mode == TrainMode::contrastive && !margin) fail(ErrorCode::InvalidArgument, "contrastive mode needs a margin");
  if (mode == TrainMode::softmax && margin) fail(ErrorCode::InvalidArgument, "margin only applies to contrastive mode");
  if (margin && !(*margin > 0)) fail(ErrorCode::InvalidArgument, "margin must be > 0");
  if (augment) augment->validate();
}

TrainResult train(const Corpus& corpus, const TrainConfig& config) {
  if (config.pretrained) {
    config.validate();
    const Checkpoint pre = load_checkpoint(*config.pretrained);
    return train(corpus, config, &pre);
  }
  return train(corpus, config, nullptr);
}

TrainResult train(const Corpus& corpus, const TrainConfig& config, const Checkpoint* pretrained) {
  config.validate();
  if (corpus.examples.empty()) fail(ErrorCode::EmptyCorpus, "no training examples");
  if (config.freeze_conv && pretrained == nullptr) {
    fail(ErrorCode::InvalidArgument, "freeze_conv needs a pretrained checkpoint");
  }
  for (const auto& ex : corpus.examples) {
    if (ex.class_id < 0 || ex.class_id >= corpus.labels.size()) fail(ErrorCode::BadClassId, "example label outside map");
  }

  std::vector<LabeledExample> data =
      config.augment ? augment_all(corpus.examples, *config.augment) : corpus.examples;
  std::vector<Tensor> inputs;
  inputs.reserve(data.size());
  for (const auto& ex : data) inputs.push_back(block_tensor(ex.block));

  NetParams params = initial_params(corpus, config, pretrained);
  NetParams grad_sum = NetParams::zeros(params.geometry, params.num_classes);

  PairIndex pairs;
  pairs.by_class.resize(static_cast<std::size_t>(corpus.labels.size()));
  for (std::size_t i = 0; i < data.size(); ++i) pairs.by_class[static_cast<std::size_t>(data[i].class_id)].push_back(i);

  // Separate streams so the visiting order does not depend on the mode.
  std::mt19937_64 order_rng(mix_keys({config.seed, 1}));
  std::mt19937_64 pair_rng(mix_keys({config.seed, 2}));
  std::vector<std::size_t> order(data.size());
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const bool need_conv = !config.freeze_conv;

  TrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_in_place(std::span<std::size_t>(order), order_rng);
    double loss_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      zero(grad_sum);
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t i = order[j];
        if (config.mode == TrainMode::softmax) {
          const ForwardTrace trace = forward_trace(params, inputs[i]);
          loss_total += loss_softmax(trace.probs, data[i].class_id);
          Tensor g_logits = trace.probs;
          g_logits[static_cast<std::size_t>(data[i].class_id)] -= 1.0;
          add_scaled(grad_sum, backward(params, trace, &g_logits, nullptr, need_conv), 1.0);
        } else {
          const bool want_same = uniform01(pair_rng) < 0.5;
          const std::size_t partner = draw_partner(data, pairs, i, want_same, pair_rng);
          const bool same = data[partner].class_id == data[i].class_id;
          auto lg = contrastive_gradients(params, inputs[i], inputs[partner], same, *config.margin);
          loss_total += lg.loss;
          add_scaled(grad_sum, lg.gradients, 1.0);
        }
      }
      sgd_step(params, grad_sum, config.learning_rate, end - start, config.freeze_conv);
    }
    result.epoch_losses.push_back(loss_total / static_cast<double>(data.size()));
  }

  params.round_to_float();
  result.checkpoint = {std::move(params), corpus.labels};
  return result;
}

double softmax_accuracy(const Checkpoint& model, std::span<const LabeledExample> examples) {
  if (examples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : examples) {
    const auto out = forward(model.params, ex.block);
    const auto p = out.probs.data();
    const auto best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    if (best == ex.class_id) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

}  // namespace glyphocr
