#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "glyphocr/checkpoint.hpp"
#include "glyphocr/corpus.hpp"

namespace glyphocr {

enum class TrainMode { softmax, contrastive };

std::string_view to_string(TrainMode mode) noexcept;
TrainMode parse_train_mode(std::string_view text);

inline constexpr double kDefaultMargin = 1.0;

struct TrainConfig {
  TrainMode mode = TrainMode::softmax;
  double learning_rate = 0.01;
  int epochs = 10;
  int batch_size = 1;
  std::optional<double> margin;  // contrastive only
  std::uint64_t seed = 0;
  bool freeze_conv = false;
  std::optional<std::filesystem::path> pretrained;
  std::optional<AugmentSpec> augment;

  void validate() const;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<double> epoch_losses;  // mean per-example loss of each epoch
};

/// Plain SGD, one update per batch, batches drawn from a seeded shuffle of
/// the (optionally augmented) corpus. Contrastive mode trains the
/// convolutional trunk on seeded pairs: half share a class, half do not.
/// With a pretrained checkpoint the conv layers start from it (and stay
/// bit-identical under freeze_conv); the dense head is reused when the class
/// count matches and freshly initialized otherwise. The returned parameters
/// are rounded to float so they equal what a save/load round trip yields.
TrainResult train(const Corpus& corpus, const TrainConfig& config);

/// Same as above with an already loaded pretrained model (overrides
/// config.pretrained).
TrainResult train(const Corpus& corpus, const TrainConfig& config, const Checkpoint* pretrained);

/// Fraction of examples whose softmax argmax equals their label.
double softmax_accuracy(const Checkpoint& model, std::span<const LabeledExample> examples);

}  // namespace glyphocr
