#include "glyphocr/recognize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include <json.hpp>

#include "glyphocr/errors.hpp"
#include "glyphocr/network.hpp"
#include "glyphocr/text.hpp"

namespace glyphocr {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kProtoMagic = "GLYPHPRO";
constexpr std::uint32_t kProtoVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t& pos, int width) {
  if (bytes.size() - pos < static_cast<std::size_t>(width)) fail(ErrorCode::CorruptCheckpoint, "prototype file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
  pos += static_cast<std::size_t>(width);
  return v;
}

/// Per-run scratch directory, removed on destruction unless kept.
class ScratchDir {
 public:
  ScratchDir(const std::optional<fs::path>& root, bool keep) : keep_(keep) {
    const fs::path base = root ? *root : fs::temp_directory_path();
    std::error_code ec;
    fs::create_directories(base, ec);
    std::string pattern = (base / "glyphocr-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) fail(ErrorCode::IoError, "cannot create scratch directory under " + base.string());
    path_ = pattern;
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    if (keep_) return;
    std::error_code ec;
    fs::remove_all(path_, ec);
  }

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
  bool keep_;
};

std::string describe_failure(const CommandOutcome& out, const EngineBridge& bridge) {
  if (out.timed_out) return "timed out after " + std::to_string(bridge.timeout().count()) + " ms";
  if (out.exit_code < 0) return "terminated abnormally";
  return "exited with status " + std::to_string(out.exit_code);
}

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " elements");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

PrototypeSet build_prototypes(const Checkpoint& model, std::span<const LabeledExample> examples) {
  const int k = model.params.num_classes;
  const auto dim = static_cast<std::size_t>(model.params.geometry.embedding_size());
  PrototypeSet set;
  set.by_class.assign(static_cast<std::size_t>(k), Prototype{std::vector<double>(dim, 0.0), 0});
  for (const auto& ex : examples) {
    if (ex.class_id < 0 || ex.class_id >= k) fail(ErrorCode::BadClassId, "example class " + std::to_string(ex.class_id));
    const auto out = forward(model.params, ex.block);
    auto& proto = set.by_class[static_cast<std::size_t>(ex.class_id)];
    for (std::size_t i = 0; i < dim; ++i) proto.embedding[i] += out.embedding[i];
    ++proto.count;
  }
  for (int c = 0; c < k; ++c) {
    auto& proto = set.by_class[static_cast<std::size_t>(c)];
    if (proto.count == 0) fail(ErrorCode::UncoveredClass, "no example for class " + std::to_string(c));
    for (double& v : proto.embedding) v /= proto.count;
  }
  return set;
}

std::vector<std::uint8_t> serialize_prototypes(const PrototypeSet& prototypes) {
  std::vector<std::uint8_t> out(kProtoMagic.begin(), kProtoMagic.end());
  const std::size_t dim = prototypes.by_class.empty() ? 0 : prototypes.by_class.front().embedding.size();
  put_u32(out, kProtoVersion);
  put_u32(out, static_cast<std::uint32_t>(prototypes.by_class.size()));
  put_u32(out, static_cast<std::uint32_t>(dim));
  for (const auto& p : prototypes.by_class) {
    if (p.embedding.size() != dim) fail(ErrorCode::ShapeMismatch, "prototype dimensions differ");
    put_u32(out, static_cast<std::uint32_t>(p.count));
    for (double v : p.embedding) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

PrototypeSet parse_prototypes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kProtoMagic.size() || !std::equal(kProtoMagic.begin(), kProtoMagic.end(), bytes.begin())) {
    fail(ErrorCode::CorruptCheckpoint, "bad prototype magic");
  }
  std::size_t pos = kProtoMagic.size();
  if (get_le(bytes, pos, 4) != kProtoVersion) fail(ErrorCode::CorruptCheckpoint, "unsupported prototype version");
  const auto k = get_le(bytes, pos, 4);
  const auto dim = get_le(bytes, pos, 4);
  if (bytes.size() - pos != k * (4 + 8 * dim)) fail(ErrorCode::CorruptCheckpoint, "prototype payload size");
  PrototypeSet set;
  set.by_class.resize(k);
  for (auto& p : set.by_class) {
    p.count = static_cast<int>(get_le(bytes, pos, 4));
    p.embedding.resize(dim);
    for (double& v : p.embedding) v = std::bit_cast<double>(get_le(bytes, pos, 8));
  }
  return set;
}

void save_prototypes(const PrototypeSet& prototypes, const fs::path& path) {
  write_file(path, serialize_prototypes(prototypes));
}

PrototypeSet load_prototypes(const fs::path& path) { return parse_prototypes(read_file(path)); }

BlockPrediction classify_embedding(const Checkpoint& model, const PrototypeSet& prototypes, std::span<const double> embedding,
                                   std::span<const double> probs, GridOrigin origin) {
  if (prototypes.by_class.size() != static_cast<std::size_t>(model.labels.size())) {
    fail(ErrorCode::ShapeMismatch, "prototype set does not match the model's classes");
  }
  BlockPrediction pred;
  pred.origin = origin;
  pred.distance = INFINITY;
  for (std::size_t c = 0; c < prototypes.by_class.size(); ++c) {
    const double d = euclidean_distance(embedding, prototypes.by_class[c].embedding);
    if (d < pred.distance) {
      pred.distance = d;
      pred.class_id = static_cast<int>(c);
    }
  }
  pred.glyph_text = model.labels.at(pred.class_id).glyph_text;
  pred.prob = probs[static_cast<std::size_t>(pred.class_id)];
  return pred;
}

BlockPrediction classify_block(const Checkpoint& model, const PrototypeSet& prototypes, const GlyphBlock& block) {
  const auto out = forward(model.params, block);
  return classify_embedding(model, prototypes, out.embedding.data(), out.probs.data(), block.origin);
}

void mark_agreement(std::vector<BlockPrediction>& predictions, const std::string& ocr_text) {
  const std::u32string ocr = strip_whitespace(utf8_decode(ocr_text));
  std::size_t pos = 0;
  for (auto& pred : predictions) {
    const std::u32string glyph = strip_whitespace(utf8_decode(pred.glyph_text));
    bool agreed = pos + glyph.size() <= ocr.size();
    for (std::size_t i = 0; agreed && i < glyph.size(); ++i) agreed = ocr[pos + i] == glyph[i];
    pred.agreed_with_ocr = agreed;
    pos += glyph.size();
  }
}

RecognitionResult run_pipeline(const Image& image, GridSpec grid, const Checkpoint& model, const PrototypeSet& prototypes,
                               const PipelineOptions& options) {
  grid.validate();
  if (options.tts && !options.audio_out) fail(ErrorCode::InvalidArgument, "tts bridge configured without an audio output path");

  RecognitionResult result;
  result.grid = grid;
  const Binarization bin = binarize(to_grayscale(image), options.polarity);
  result.otsu = bin.otsu;
  result.polarity = bin.polarity;
  if (bin.otsu.degenerate) {
    result.warnings.push_back("degenerate histogram: image has a single gray level " + std::to_string(bin.otsu.threshold));
  }

  const std::vector<GlyphBlock> blocks = slice(bin.image, grid);
  result.predictions.reserve(blocks.size());
  for (const auto& block : blocks) {
    if (block.origin.col == 0 && block.origin.row > 0) result.net_text.push_back('\n');
    result.predictions.push_back(classify_block(model, prototypes, block));
    result.net_text += result.predictions.back().glyph_text;
  }
  result.tile = assemble_tile(blocks, grid, options.gutter);
  result.final_text = result.net_text;

  if (!options.ocr && !options.tts) return result;

  const ScratchDir scratch(options.scratch_root, options.keep_temp);
  if (options.ocr) {
    const fs::path tile_path = scratch.path() / "tile.pgm";
    write_file(tile_path, encode_pgm(render_binary(result.tile)));
    const CommandOutcome out = run_command(options.ocr->expand(tile_path), options.ocr->timeout());
    if (out.ok()) {
      result.ocr_text = trim(out.stdout_text);
      mark_agreement(result.predictions, *result.ocr_text);
      if (!result.ocr_text->empty()) result.final_text = *result.ocr_text;
    } else {
      result.warnings.push_back("ocr bridge " + describe_failure(out, *options.ocr) + "; keeping network text");
    }
  }
  if (options.tts) {
    const fs::path text_path = scratch.path() / "final_text.txt";
    write_file(text_path, std::span(reinterpret_cast<const std::uint8_t*>(result.final_text.data()), result.final_text.size()));
    std::error_code ec;
    fs::remove(*options.audio_out, ec);
    const CommandOutcome out = run_command(options.tts->expand(text_path, *options.audio_out), options.tts->timeout());
    const bool produced = fs::is_regular_file(*options.audio_out, ec) && fs::file_size(*options.audio_out, ec) > 0;
    if (out.ok() && produced) {
      result.audio_written = true;
    } else if (!out.ok()) {
      result.warnings.push_back("tts bridge " + describe_failure(out, *options.tts));
    } else {
      result.warnings.push_back("tts bridge produced no audio output");
    }
  }
  return result;
}

std::string recognition_json(const RecognitionResult& result) {
  using nlohmann::ordered_json;
  ordered_json preds = ordered_json::array();
  for (const auto& p : result.predictions) {
    ordered_json item;
    item["row"] = p.origin.row;
    item["col"] = p.origin.col;
    item["class_id"] = p.class_id;
    item["glyph"] = p.glyph_text;
    item["distance"] = p.distance;
    item["prob"] = p.prob;
    item["agreed_with_ocr"] = p.agreed_with_ocr ? ordered_json(*p.agreed_with_ocr) : ordered_json(nullptr);
    preds.push_back(std::move(item));
  }
  ordered_json j;
  j["grid"] = {{"rows", result.grid.rows}, {"cols", result.grid.cols}};
  j["threshold"] = result.otsu.threshold;
  j["degenerate"] = result.otsu.degenerate;
  j["polarity"] = std::string(to_string(result.polarity));
  j["predictions"] = std::move(preds);
  j["net_text"] = result.net_text;
  j["ocr_text"] = result.ocr_text ? ordered_json(*result.ocr_text) : ordered_json(nullptr);
  j["final_text"] = result.final_text;
  j["tile"] = {{"width", result.tile.width()}, {"height", result.tile.height()}};
  j["audio_written"] = result.audio_written;
  j["warnings"] = result.warnings;
  return j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace glyphocr
