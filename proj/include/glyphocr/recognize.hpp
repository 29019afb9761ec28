#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glyphocr/binarize.hpp"
#include "glyphocr/bridge.hpp"
#include "glyphocr/checkpoint.hpp"
#include "glyphocr/corpus.hpp"
#include "glyphocr/raster.hpp"
#include "glyphocr/segment.hpp"

namespace glyphocr {

/// sqrt(sum (a_i - b_i)^2); LengthMismatch on unequal lengths.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct Prototype {
  std::vector<double> embedding;  // mean embedding of the class
  int count = 0;                  // examples averaged

  bool operator==(const Prototype&) const = default;
};

/// One prototype per class id of the model's label map.
struct PrototypeSet {
  std::vector<Prototype> by_class;

  bool operator==(const PrototypeSet&) const = default;
};

/// Throws UncoveredClass when some class of the model has no example.
PrototypeSet build_prototypes(const Checkpoint& model, std::span<const LabeledExample> examples);

// "GLYPHPRO" | u32 version | u32 K | u32 dim | per class: u32 count, dim f64 LE
std::vector<std::uint8_t> serialize_prototypes(const PrototypeSet& prototypes);
PrototypeSet parse_prototypes(std::span<const std::uint8_t> bytes);
void save_prototypes(const PrototypeSet& prototypes, const std::filesystem::path& path);
PrototypeSet load_prototypes(const std::filesystem::path& path);

struct BlockPrediction {
  GridOrigin origin;
  int class_id = 0;
  std::string glyph_text;
  double distance = 0.0;  // to the chosen prototype
  double prob = 0.0;      // softmax probability of the chosen class
  std::optional<bool> agreed_with_ocr;
};

/// Nearest prototype by Euclidean distance on the embedding; ties go to the
/// lowest class id.
BlockPrediction classify_block(const Checkpoint& model, const PrototypeSet& prototypes, const GlyphBlock& block);

/// Same rule on a precomputed embedding and probability vector.
BlockPrediction classify_embedding(const Checkpoint& model, const PrototypeSet& prototypes, std::span<const double> embedding,
                                   std::span<const double> probs, GridOrigin origin = {});

struct PipelineOptions {
  std::optional<EngineBridge> ocr;
  std::optional<EngineBridge> tts;
  std::optional<std::filesystem::path> audio_out;  // required with tts
  std::optional<std::filesystem::path> scratch_root;  // default: system temp dir
  bool keep_temp = false;
  int gutter = kDefaultGutter;
  Polarity polarity = Polarity::automatic;
};

struct RecognitionResult {
  GridSpec grid;
  OtsuResult otsu;
  Polarity polarity = Polarity::dark_foreground;
  std::vector<BlockPrediction> predictions;  // row-major
  std::string net_text;                      // one line per grid row
  std::optional<std::string> ocr_text;
  std::string final_text;
  Tile tile{1, 1, {0}};
  bool audio_written = false;
  std::vector<std::string> warnings;  // bridge failures and degenerate inputs
};

/// grayscale -> Otsu -> slice -> classify -> tile, then the optional OCR
/// double-check (non-empty engine output becomes final_text) and the
/// optional TTS hand-off. Bridge failures only add warnings.
RecognitionResult run_pipeline(const Image& image, GridSpec grid, const Checkpoint& model, const PrototypeSet& prototypes,
                               const PipelineOptions& options = {});

/// Sets agreed_with_ocr on every prediction by left-aligned, per-code-point
/// comparison of the whitespace-stripped texts.
void mark_agreement(std::vector<BlockPrediction>& predictions, const std::string& ocr_text);

/// Deterministic JSON rendering (no paths, fixed key order).
std::string recognition_json(const RecognitionResult& result);

}  // namespace glyphocr
