#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphocr/raster.hpp"
#include "glyphocr/segment.hpp"

namespace glyphocr {

enum class Family { modern, ancient };

std::string_view to_string(Family family) noexcept;
std::optional<Family> parse_family(std::string_view text) noexcept;

struct LabelEntry {
  int class_id = 0;
  std::string glyph_text;
  Family family = Family::modern;

  bool operator==(const LabelEntry&) const = default;
};

/// Class inventory. Ids are 0..K-1 in order; glyph text is unique within a
/// family, so the same character may appear once as modern and once as
/// ancient.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<LabelEntry> entries);

  int size() const noexcept { return static_cast<int>(entries_.size()); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<LabelEntry>& entries() const noexcept { return entries_; }
  const LabelEntry& at(int class_id) const;
  std::optional<int> find(std::string_view glyph_text, Family family) const;

  /// Returns the existing id or appends a new class.
  int intern(std::string_view glyph_text, Family family);

  std::string to_json() const;
  static LabelMap from_json(std::string_view json);

  bool operator==(const LabelMap&) const = default;

 private:
  std::vector<LabelEntry> entries_;
};

struct LabeledExample {
  GlyphBlock block;
  int class_id = 0;
  Family family = Family::modern;

  bool operator==(const LabeledExample&) const = default;
};

struct Corpus {
  LabelMap labels;
  std::vector<LabeledExample> examples;
};

/// Any decoded crop becomes a block the same way a page cell does:
/// grayscale, Otsu with automatic polarity, then a 1x1 slice.
GlyphBlock block_from_image(const Image& img);

/// Reads a JSON array of {"image", "label", "family"} records. Image paths
/// are relative to the manifest. Classes are numbered in order of first
/// appearance unless `fixed_labels` is given, in which case every record must
/// resolve against it (UnknownLabel otherwise).
Corpus load_manifest(const std::filesystem::path& path, const LabelMap* fixed_labels = nullptr);

struct AugmentSpec {
  double rotation_degrees = 10.0;  // drawn from [-r, r]
  double translate_pixels = 2.0;   // per axis, [-t, t]
  double scale_min = 0.9;
  double scale_max = 1.1;
  double noise_flip_prob = 0.02;
  int copies_per_example = 4;
  std::uint64_t seed = 0;

  void validate() const;
  static AugmentSpec identity(std::uint64_t seed = 0);
};

/// Rotation, translation and scale about the block center (bilinear,
/// out-of-frame = 0), then independent value flips v -> 1-v. Draws come from
/// a counter-based stream keyed by (seed, example contents, index).
LabeledExample augment(const LabeledExample& example, const AugmentSpec& spec, std::uint64_t index);

/// Originals followed, per original, by `copies_per_example` augmented copies.
std::vector<LabeledExample> augment_all(std::span<const LabeledExample> examples, const AugmentSpec& spec);

std::uint64_t example_key(const LabeledExample& example) noexcept;

inline constexpr int kMaxSynthClasses = 64;

/// Text assigned to synthetic class `class_id`: one code point each.
std::string synth_glyph_text(int class_id);

/// Procedural glyph corpus: each class is a fixed combination of strokes;
/// every example is a jittered rendering of it. Examples are grouped by
/// class, `per_class` each. The ancient family renders the same classes
/// condensed and slanted, with heavier, eroded strokes.
Corpus synth_corpus(int num_classes, int per_class, std::uint64_t seed, Family family = Family::modern);

struct SynthPage {
  GrayImage image;
  std::string text;  // expected net text: one line per grid row
};

/// Lays out corpus examples as dark ink on a light page, each glyph scaled
/// up by `scale`. Cell k shows class k mod K.
SynthPage synth_page(const Corpus& corpus, GridSpec grid, int scale, std::uint64_t seed);

}  // namespace glyphocr
