#include "glyphocr/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "glyphocr/binarize.hpp"
#include "glyphocr/errors.hpp"
#include "glyphocr/rng.hpp"

namespace glyphocr {

using nlohmann::json;

std::string_view to_string(Family family) noexcept {
  return family == Family::ancient ? "ancient" : "modern";
}

std::optional<Family> parse_family(std::string_view text) noexcept {
  if (text == "modern") return Family::modern;
  if (text == "ancient") return Family::ancient;
  return std::nullopt;
}

LabelMap::LabelMap(std::vector<LabelEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.class_id != static_cast<int>(i)) {
      fail(ErrorCode::InvalidArgument, "label map ids must be contiguous from 0; entry " + std::to_string(i) +
                                           " has id " + std::to_string(e.class_id));
    }
    if (e.glyph_text.empty()) fail(ErrorCode::InvalidArgument, "empty glyph text for class " + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[j].family == e.family && entries_[j].glyph_text == e.glyph_text) {
        fail(ErrorCode::InvalidArgument, "glyph '" + e.glyph_text + "' listed twice in family " +
                                             std::string(to_string(e.family)));
      }
    }
  }
}

const LabelEntry& LabelMap::at(int class_id) const {
  if (class_id < 0 || class_id >= size()) fail(ErrorCode::BadClassId, "class id " + std::to_string(class_id));
  return entries_[static_cast<std::size_t>(class_id)];
}

std::optional<int> LabelMap::find(std::string_view glyph_text, Family family) const {
  for (const auto& e : entries_) {
    if (e.family == family && e.glyph_text == glyph_text) return e.class_id;
  }
  return std::nullopt;
}

int LabelMap::intern(std::string_view glyph_text, Family family) {
  if (auto id = find(glyph_text, family)) return *id;
  if (glyph_text.empty()) fail(ErrorCode::InvalidArgument, "empty glyph text");
  entries_.push_back({size(), std::string(glyph_text), family});
  return entries_.back().class_id;
}

std::string LabelMap::to_json() const {
  json arr = json::array();
  for (const auto& e : entries_) {
    arr.push_back({{"class_id", e.class_id}, {"family", to_string(e.family)}, {"glyph", e.glyph_text}});
  }
  return arr.dump();
}

LabelMap LabelMap::from_json(std::string_view text) {
  const json arr = json::parse(text.begin(), text.end(), nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) fail(ErrorCode::InvalidArgument, "label map is not a JSON array");
  std::vector<LabelEntry> entries;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("class_id") || !item.contains("glyph") || !item.contains("family") ||
        !item["class_id"].is_number_integer() || !item["glyph"].is_string() || !item["family"].is_string()) {
      fail(ErrorCode::InvalidArgument, "malformed label map entry");
    }
    const auto family = parse_family(item["family"].get<std::string>());
    if (!family) fail(ErrorCode::InvalidArgument, "unknown family in label map");
    entries.push_back({item["class_id"].get<int>(), item["glyph"].get<std::string>(), *family});
  }
  return LabelMap(std::move(entries));
}

GlyphBlock block_from_image(const Image& img) {
  const Binarization bin = binarize(to_grayscale(img));
  return slice(bin.image, {1, 1}).front();
}

Corpus load_manifest(const std::filesystem::path& path, const LabelMap* fixed_labels) {
  const auto bytes = read_file(path);
  const json records = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (records.is_discarded()) fail(ErrorCode::ManifestParseError, path.string() + " is not valid JSON");
  if (!records.is_array()) fail(ErrorCode::ManifestParseError, path.string() + ": expected a JSON array");

  Corpus corpus;
  if (fixed_labels != nullptr) corpus.labels = *fixed_labels;
  const auto base = path.parent_path();
  std::size_t index = 0;
  for (const auto& rec : records) {
    const std::string where = path.string() + " record " + std::to_string(index++);
    if (!rec.is_object() || !rec.contains("image") || !rec["image"].is_string() || !rec.contains("label") ||
        !rec["label"].is_string()) {
      fail(ErrorCode::ManifestParseError, where + ": needs string fields \"image\" and \"label\"");
    }
    Family family = Family::modern;
    if (rec.contains("family")) {
      const auto parsed = rec["family"].is_string() ? parse_family(rec["family"].get<std::string>()) : std::nullopt;
      if (!parsed) fail(ErrorCode::ManifestParseError, where + ": family must be \"modern\" or \"ancient\"");
      family = *parsed;
    }
    const std::string label = rec["label"].get<std::string>();
    if (label.empty()) fail(ErrorCode::ManifestParseError, where + ": empty label");

    int class_id = 0;
    if (fixed_labels != nullptr) {
      const auto id = corpus.labels.find(label, family);
      if (!id) fail(ErrorCode::UnknownLabel, where + ": '" + label + "' (" + std::string(to_string(family)) + ")");
      class_id = *id;
    } else {
      class_id = corpus.labels.intern(label, family);
    }

    const auto image_path = base / rec["image"].get<std::string>();
    if (!std::filesystem::is_regular_file(image_path)) fail(ErrorCode::MissingImage, image_path.string());
    corpus.examples.push_back({block_from_image(read_image(image_path)), class_id, family});
  }
  return corpus;
}

void AugmentSpec::validate() const {
  const bool finite = std::isfinite(rotation_degrees) && std::isfinite(translate_pixels) && std::isfinite(scale_min) &&
                      std::isfinite(scale_max) && std::isfinite(noise_flip_prob);
  if (!finite) fail(ErrorCode::InvalidArgument, "augmentation ranges must be finite");
  if (rotation_degrees < 0 || translate_pixels < 0) fail(ErrorCode::InvalidArgument, "augmentation ranges must be >= 0");
  if (scale_min <= 0 || scale_max < scale_min) fail(ErrorCode::InvalidArgument, "scale range must satisfy 0 < min <= max");
  if (noise_flip_prob < 0 || noise_flip_prob >= 0.5) fail(ErrorCode::InvalidArgument, "flip probability must be in [0, 0.5)");
  if (copies_per_example < 0) fail(ErrorCode::InvalidArgument, "copies per example must be >= 0");
}

AugmentSpec AugmentSpec::identity(std::uint64_t seed) {
  AugmentSpec spec;
  spec.rotation_degrees = 0;
  spec.translate_pixels = 0;
  spec.scale_min = 1;
  spec.scale_max = 1;
  spec.noise_flip_prob = 0;
  spec.seed = seed;
  return spec;
}

std::uint64_t example_key(const LabeledExample& example) noexcept {
  std::uint64_t h = mix_keys({static_cast<std::uint64_t>(example.class_id), static_cast<std::uint64_t>(example.family)});
  for (double v : example.block.values) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

LabeledExample augment(const LabeledExample& example, const AugmentSpec& spec, std::uint64_t index) {
  spec.validate();
  KeyedStream draws(mix_keys({spec.seed, example_key(example), index}));
  const double angle = draws.uniform(-spec.rotation_degrees, spec.rotation_degrees) * std::numbers::pi / 180.0;
  const double tx = draws.uniform(-spec.translate_pixels, spec.translate_pixels);
  const double ty = draws.uniform(-spec.translate_pixels, spec.translate_pixels);
  const double scale = draws.uniform(spec.scale_min, spec.scale_max);

  // Inverse map: source = c + R(-angle) * (dest - c - t) / scale.
  constexpr double kCenter = (kGlyphSide - 1) / 2.0;
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  const auto& src = example.block.values;
  auto sample = [&](int x, int y) { return (x < 0 || y < 0 || x >= kGlyphSide || y >= kGlyphSide) ? 0.0 : src[y * kGlyphSide + x]; };

  LabeledExample out = example;
  for (int y = 0; y < kGlyphSide; ++y) {
    for (int x = 0; x < kGlyphSide; ++x) {
      const double dx = (x - kCenter - tx) / scale;
      const double dy = (y - kCenter - ty) / scale;
      const double u = kCenter + cs * dx + sn * dy;
      const double v = kCenter - sn * dx + cs * dy;
      const int x0 = static_cast<int>(std::floor(u));
      const int y0 = static_cast<int>(std::floor(v));
      const double fx = u - x0;
      const double fy = v - y0;
      double value = (1 - fy) * ((1 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0)) +
                     fy * ((1 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1));
      out.block.values[static_cast<std::size_t>(y) * kGlyphSide + x] = std::clamp(value, 0.0, 1.0);
    }
  }
  if (spec.noise_flip_prob > 0) {
    for (double& value : out.block.values) {
      if (draws.uniform() < spec.noise_flip_prob) value = 1.0 - value;
    }
  }
  return out;
}

std::vector<LabeledExample> augment_all(std::span<const LabeledExample> examples, const AugmentSpec& spec) {
  spec.validate();
  std::vector<LabeledExample> out(examples.begin(), examples.end());
  out.reserve(examples.size() * (1 + static_cast<std::size_t>(spec.copies_per_example)));
  for (const auto& example : examples) {
    for (int k = 1; k <= spec.copies_per_example; ++k) out.push_back(augment(example, spec, static_cast<std::uint64_t>(k)));
  }
  return out;
}

}  // namespace glyphocr
