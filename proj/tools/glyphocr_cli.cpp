// glyphocr: command-line front end for the glyph digitization pipeline.
//
//   glyphocr binarize  <in> <out> [--polarity auto|dark_foreground|light_foreground]
//   glyphocr slice     <in> --rows R --cols C --out-dir DIR
//   glyphocr train     (--manifest M | --synth KxN) --out MODEL [...]
//   glyphocr recognize <image> --model MODEL --rows R --cols C [...]
//   glyphocr eval      --pred-dir P --truth-dir T --out REPORT.json
//   glyphocr synth     --classes K --per-class N --out-dir DIR [--page RxC]
//
// Exit status: 0 success (bridge failures are warnings), 1 bad input,
// 2 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glyphocr/binarize.hpp"
#include "glyphocr/bridge.hpp"
#include "glyphocr/checkpoint.hpp"
#include "glyphocr/corpus.hpp"
#include "glyphocr/errors.hpp"
#include "glyphocr/evalkit.hpp"
#include "glyphocr/raster.hpp"
#include "glyphocr/recognize.hpp"
#include "glyphocr/segment.hpp"
#include "glyphocr/train.hpp"

namespace fs = std::filesystem;
using glyphocr::ErrorCode;
using glyphocr::fail;
using json = nlohmann::ordered_json;

namespace {

// --config reader. The file is a JSON object with one object per
// subcommand, e.g. {"train": {"epochs": 5, "freeze-conv": true}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

// Flags as they were resolved (command line, config file, then defaults),
// in the same shape --config accepts.
json effective_config(const CLI::App& sub) {
  json body = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt == sub.get_help_ptr() || opt == sub.get_help_all_ptr()) continue;
    const std::string name = !opt->get_lnames().empty() ? opt->get_lnames().front() : opt->get_single_name();
    if (opt->get_expected_max() == 0) {
      body[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.size() == 1) {
        body[name] = results.front();
      } else {
        body[name] = results;
      }
    } else if (!opt->get_default_str().empty()) {
      body[name] = opt->get_default_str();
    }
  }
  json doc = json::object();
  doc[sub.get_name()] = std::move(body);
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  glyphocr::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = glyphocr::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void record_config(const CLI::App& sub, const fs::path& path) {
  write_text(path, effective_config(sub).dump(2) + "\n");
}

fs::path sibling(const fs::path& path, const std::string& suffix) { return fs::path(path.string() + suffix); }

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// "4x30" -> {4, 30}
std::pair<int, int> parse_pair(const std::string& text, const char* what) {
  int a = 0, b = 0;
  char x = 0, extra = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || (x != 'x' && x != 'X') || a < 1 || b < 1) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must look like 4x30, got '" + text + "'");
  }
  return {a, b};
}

// ---------------------------------------------------------------- binarize

struct BinarizeArgs {
  std::string input, output, polarity = "auto";
};

void add_binarize(CLI::App& app, BinarizeArgs& a) {
  auto* sub = app.add_subcommand("binarize", "Otsu-threshold an image into a black-on-white PGM");
  sub->add_option("input", a.input, "PNG, PGM or PPM image")->required();
  sub->add_option("output", a.output, "binarized PGM to write")->required();
  sub->add_option("--polarity", a.polarity, "auto, dark_foreground or light_foreground");
}

int run_binarize(const CLI::App& sub, const BinarizeArgs& a) {
  const auto polarity = glyphocr::parse_polarity(a.polarity);
  const auto gray = glyphocr::to_grayscale(glyphocr::read_image(a.input));
  const auto result = glyphocr::binarize(gray, polarity);
  ensure_parent(a.output);
  glyphocr::write_file(a.output, glyphocr::encode_pgm(glyphocr::render_binary(result.image)));
  record_config(sub, sibling(a.output, ".config.json"));
  if (result.otsu.degenerate) {
    std::cerr << "warning: degenerate histogram (one intensity); output has no foreground\n";
  }
  std::cout << "threshold=" << result.otsu.threshold << " polarity=" << glyphocr::to_string(result.polarity) << "\n";
  return 0;
}

// ---------------------------------------------------------------- slice

struct SliceArgs {
  std::string input, out_dir, polarity = "auto";
  int rows = 1, cols = 1;
};

void add_slice(CLI::App& app, SliceArgs& a) {
  auto* sub = app.add_subcommand("slice", "Binarize and cut an image into rows x cols glyph blocks");
  sub->add_option("input", a.input, "page image")->required();
  sub->add_option("--rows", a.rows, "grid rows")->required()->check(CLI::PositiveNumber);
  sub->add_option("--cols", a.cols, "grid columns")->required()->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", a.out_dir, "directory for r{row}_c{col}.pgm files")->required();
  sub->add_option("--polarity", a.polarity, "auto, dark_foreground or light_foreground");
}

int run_slice(const CLI::App& sub, const SliceArgs& a) {
  const auto polarity = glyphocr::parse_polarity(a.polarity);
  const auto gray = glyphocr::to_grayscale(glyphocr::read_image(a.input));
  const auto bin = glyphocr::binarize(gray, polarity);
  const auto blocks = glyphocr::slice(bin.image, {a.rows, a.cols});
  // Blocks keep the ink polarity of the source page.
  const bool dark_ink = bin.polarity == glyphocr::Polarity::dark_foreground;
  const auto written = glyphocr::export_blocks(blocks, a.out_dir, dark_ink);
  record_config(sub, fs::path(a.out_dir) / "slice.config.json");
  std::cout << written.size() << " blocks written to " << a.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string manifest, synth, synth_family = "modern", mode = "softmax", out, pretrained;
  std::uint64_t synth_seed = 0, seed = 0;
  double lr = 0.01;
  int epochs = 10, batch = 1;
  std::optional<double> margin;
  bool freeze_conv = false, augment = false;
  glyphocr::AugmentSpec aug;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* sub = app.add_subcommand("train", "Train the glyph network and write a checkpoint");
  auto* manifest = sub->add_option("--manifest", a.manifest, "JSON manifest of labeled crops");
  auto* synth = sub->add_option("--synth", a.synth, "train on a generated corpus, KxN = classes x examples");
  manifest->excludes(synth);
  sub->add_option("--synth-seed", a.synth_seed, "seed of the generated corpus");
  sub->add_option("--synth-family", a.synth_family, "modern or ancient rendering of the generated corpus");
  sub->add_option("--mode", a.mode, "softmax or contrastive");
  sub->add_option("--lr", a.lr, "SGD learning rate");
  sub->add_option("--epochs", a.epochs, "passes over the corpus");
  sub->add_option("--batch", a.batch, "examples (or pairs) per update");
  sub->add_option("--seed", a.seed, "seed for initialization, shuffling, pairs and augmentation");
  sub->add_option("--out", a.out, "checkpoint path")->required();
  sub->add_option("--pretrained", a.pretrained, "checkpoint whose conv layers seed this run");
  sub->add_flag("--freeze-conv", a.freeze_conv, "keep the pretrained conv layers fixed");
  sub->add_option("--margin", a.margin, "contrastive margin (contrastive mode only)");
  sub->add_flag("--augment", a.augment, "add augmented copies of every example");
  sub->add_option("--aug-copies", a.aug.copies_per_example, "augmented copies per example");
  sub->add_option("--aug-rotation", a.aug.rotation_degrees, "max rotation in degrees");
  sub->add_option("--aug-translate", a.aug.translate_pixels, "max shift in pixels per axis");
  sub->add_option("--aug-scale-min", a.aug.scale_min, "smallest scale factor");
  sub->add_option("--aug-scale-max", a.aug.scale_max, "largest scale factor");
  sub->add_option("--aug-flip", a.aug.noise_flip_prob, "per-pixel flip probability");
}

int run_train(const CLI::App& sub, TrainArgs& a) {
  glyphocr::TrainConfig config;
  config.mode = glyphocr::parse_train_mode(a.mode);
  config.learning_rate = a.lr;
  config.epochs = a.epochs;
  config.batch_size = a.batch;
  config.margin = a.margin;
  if (config.mode == glyphocr::TrainMode::contrastive && !config.margin) config.margin = glyphocr::kDefaultMargin;
  config.seed = a.seed;
  config.freeze_conv = a.freeze_conv;
  if (!a.pretrained.empty()) config.pretrained = a.pretrained;
  if (a.augment) {
    a.aug.seed = a.seed;
    config.augment = a.aug;
  }
  config.validate();
  if (config.freeze_conv && !config.pretrained) fail(ErrorCode::InvalidArgument, "--freeze-conv needs --pretrained");

  glyphocr::Corpus corpus;
  if (!a.manifest.empty()) {
    corpus = glyphocr::load_manifest(a.manifest);
  } else if (!a.synth.empty()) {
    const auto [classes, per_class] = parse_pair(a.synth, "--synth");
    const auto family = glyphocr::parse_family(a.synth_family);
    if (!family) fail(ErrorCode::InvalidArgument, "--synth-family must be modern or ancient");
    corpus = glyphocr::synth_corpus(classes, per_class, a.synth_seed, *family);
  } else {
    fail(ErrorCode::InvalidArgument, "give --manifest or --synth");
  }

  const auto result = glyphocr::train(corpus, config);
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
    std::cout << "epoch " << e + 1 << "/" << result.epoch_losses.size() << " loss=" << result.epoch_losses[e] << "\n";
  }

  const fs::path out = a.out;
  ensure_parent(out);
  glyphocr::save_checkpoint(result.checkpoint, out);
  const auto prototypes = glyphocr::build_prototypes(result.checkpoint, corpus.examples);
  glyphocr::save_prototypes(prototypes, sibling(out, ".protos"));

  json log = json::object();
  log["mode"] = std::string(glyphocr::to_string(config.mode));
  log["classes"] = corpus.labels.size();
  log["examples"] = corpus.examples.size();
  log["epoch_losses"] = result.epoch_losses;
  if (config.mode == glyphocr::TrainMode::softmax) {
    log["train_accuracy"] = glyphocr::softmax_accuracy(result.checkpoint, corpus.examples);
  }
  write_text(sibling(out, ".log.json"), log.dump(2) + "\n");
  record_config(sub, sibling(out, ".config.json"));
  return 0;
}

// ---------------------------------------------------------------- recognize

struct RecognizeArgs {
  std::string image, model, prototypes, manifest, ocr_cmd, tts_cmd, audio, out_json, tile_out, polarity = "auto";
  int rows = 1, cols = 1, gutter = glyphocr::kDefaultGutter;
  double timeout = 30.0;
  bool keep_temp = false;
};

void add_recognize(CLI::App& app, RecognizeArgs& a) {
  auto* sub = app.add_subcommand("recognize", "Recognize the glyph grid of a page and print the text");
  sub->add_option("image", a.image, "page image")->required();
  sub->add_option("--model", a.model, "checkpoint from `train`")->required();
  sub->add_option("--rows", a.rows, "grid rows")->required()->check(CLI::PositiveNumber);
  sub->add_option("--cols", a.cols, "grid columns")->required()->check(CLI::PositiveNumber);
  sub->add_option("--prototypes", a.prototypes, "prototype file (default: <model>.protos)");
  sub->add_option("--manifest", a.manifest, "rebuild prototypes from this manifest instead");
  sub->add_option("--ocr-cmd", a.ocr_cmd, "external OCR command; {input} is the tile PGM");
  sub->add_option("--tts-cmd", a.tts_cmd, "external TTS command; {input} text file, {output} audio file");
  sub->add_option("--audio", a.audio, "audio file the TTS command writes");
  sub->add_option("--timeout", a.timeout, "seconds before an external command is killed")->check(CLI::PositiveNumber);
  sub->add_option("--out-json", a.out_json, "write the full recognition result as JSON");
  sub->add_option("--tile-out", a.tile_out, "write the assembled tile as PGM");
  sub->add_option("--gutter", a.gutter, "background pixels between tile cells")->check(CLI::NonNegativeNumber);
  sub->add_option("--polarity", a.polarity, "auto, dark_foreground or light_foreground");
  sub->add_flag("--keep-temp", a.keep_temp, "keep the scratch directory of the bridges");
}

int run_recognize(const CLI::App& sub, const RecognizeArgs& a) {
  const auto model = glyphocr::load_checkpoint(a.model);
  glyphocr::PrototypeSet prototypes;
  if (!a.manifest.empty()) {
    const auto corpus = glyphocr::load_manifest(a.manifest, &model.labels);
    prototypes = glyphocr::build_prototypes(model, corpus.examples);
  } else {
    const fs::path path = a.prototypes.empty() ? sibling(a.model, ".protos") : fs::path(a.prototypes);
    if (!fs::exists(path)) fail(ErrorCode::InvalidArgument, "no prototypes at " + path.string() + "; pass --prototypes or --manifest");
    prototypes = glyphocr::load_prototypes(path);
  }

  glyphocr::PipelineOptions options;
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(a.timeout * 1000));
  if (!a.ocr_cmd.empty()) options.ocr = glyphocr::EngineBridge(glyphocr::EngineKind::ocr, a.ocr_cmd, timeout);
  if (!a.tts_cmd.empty()) {
    if (a.audio.empty()) fail(ErrorCode::InvalidArgument, "--tts-cmd needs --audio");
    options.tts = glyphocr::EngineBridge(glyphocr::EngineKind::tts, a.tts_cmd, timeout);
    options.audio_out = a.audio;
  }
  options.keep_temp = a.keep_temp;
  options.gutter = a.gutter;
  options.polarity = glyphocr::parse_polarity(a.polarity);

  const auto result = glyphocr::run_pipeline(glyphocr::read_image(a.image), {a.rows, a.cols}, model, prototypes, options);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (!a.out_json.empty()) {
    ensure_parent(a.out_json);
    write_text(a.out_json, glyphocr::recognition_json(result));
    record_config(sub, sibling(a.out_json, ".config.json"));
  }
  if (!a.tile_out.empty()) {
    ensure_parent(a.tile_out);
    glyphocr::write_file(a.tile_out, glyphocr::encode_pgm(glyphocr::render_binary(result.tile)));
  }
  std::cout << result.final_text << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred_dir, truth_dir, out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* sub = app.add_subcommand("eval", "Score predicted texts against ground truth and combine efficiencies");
  sub->add_option("--pred-dir", a.pred_dir, "<id>.txt recognized text, optional <id>.tts.txt audio transcript")
      ->required()
      ->check(CLI::ExistingDirectory);
  sub->add_option("--truth-dir", a.truth_dir, "<id>.txt ground truth")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--out", a.out, "report JSON; a .txt table is written beside it")->required();
}

// id -> path for every "<id>.txt" that is not a "<id>.tts.txt".
std::map<std::string, fs::path> text_files(const fs::path& dir) {
  std::map<std::string, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() <= 4 || name.substr(name.size() - 4) != ".txt") continue;
    if (name.size() > 8 && name.substr(name.size() - 8) == ".tts.txt") continue;
    found.emplace(name.substr(0, name.size() - 4), entry.path());
  }
  return found;
}

int run_eval(const CLI::App& sub, const EvalArgs& a) {
  const auto preds = text_files(a.pred_dir);
  const auto truths = text_files(a.truth_dir);
  std::string unpaired;
  for (const auto& [id, _] : truths)
    if (!preds.count(id)) unpaired += " " + id + " (no prediction)";
  for (const auto& [id, _] : preds)
    if (!truths.count(id)) unpaired += " " + id + " (no truth)";
  if (!unpaired.empty()) fail(ErrorCode::InvalidArgument, "unpaired samples:" + unpaired);
  if (truths.empty()) fail(ErrorCode::EmptyList, "no <id>.txt files in " + a.truth_dir);

  std::vector<glyphocr::SampleReport> samples;
  for (const auto& [id, truth_path] : truths) {
    const std::string truth = read_text(truth_path);
    const auto text = glyphocr::score_sample(read_text(preds.at(id)), truth);
    std::optional<int> audio;
    const fs::path tts = fs::path(a.pred_dir) / (id + ".tts.txt");
    if (fs::exists(tts)) audio = glyphocr::score_sample(read_text(tts), truth).correct;
    samples.push_back(glyphocr::make_sample_report(id, text.total, text.correct, audio));
  }
  const auto report = glyphocr::combine(std::move(samples));
  ensure_parent(a.out);
  glyphocr::emit_report(report, a.out);
  record_config(sub, sibling(a.out, ".config.json"));
  std::cout << glyphocr::report_table(report);
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  int classes = 10, per_class = 20, scale = 2;
  std::uint64_t seed = 0;
  std::string family = "modern", out_dir, page;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* sub = app.add_subcommand("synth", "Generate a synthetic glyph corpus (crops + manifest)");
  sub->add_option("--classes", a.classes, "number of classes")->check(CLI::Range(2, glyphocr::kMaxSynthClasses));
  sub->add_option("--per-class", a.per_class, "examples per class")->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.seed, "generator seed");
  sub->add_option("--family", a.family, "modern or ancient");
  sub->add_option("--out-dir", a.out_dir, "output directory")->required();
  sub->add_option("--page", a.page, "also lay out a RxC page (page.pgm, page.txt)");
  sub->add_option("--scale", a.scale, "page pixels per glyph pixel")->check(CLI::PositiveNumber);
}

int run_synth(const CLI::App& sub, const SynthArgs& a) {
  const auto family = glyphocr::parse_family(a.family);
  if (!family) fail(ErrorCode::InvalidArgument, "--family must be modern or ancient");
  const auto corpus = glyphocr::synth_corpus(a.classes, a.per_class, a.seed, *family);
  const fs::path dir = a.out_dir;
  fs::create_directories(dir / "crops");

  json manifest = json::array();
  std::vector<int> seen(static_cast<std::size_t>(corpus.labels.size()), 0);
  for (const auto& ex : corpus.examples) {
    char name[48];
    std::snprintf(name, sizeof name, "c%02d_%03d.pgm", ex.class_id, seen[static_cast<std::size_t>(ex.class_id)]++);
    glyphocr::write_file(dir / "crops" / name, glyphocr::encode_pgm(glyphocr::render_block(ex.block)));
    json record = json::object();
    record["image"] = std::string("crops/") + name;
    record["label"] = corpus.labels.at(ex.class_id).glyph_text;
    record["family"] = std::string(glyphocr::to_string(ex.family));
    manifest.push_back(std::move(record));
  }
  write_text(dir / "manifest.json", manifest.dump(2, ' ', false, json::error_handler_t::replace) + "\n");

  if (!a.page.empty()) {
    const auto [rows, cols] = parse_pair(a.page, "--page");
    const auto page = glyphocr::synth_page(corpus, {rows, cols}, a.scale, a.seed);
    glyphocr::write_file(dir / "page.pgm", glyphocr::encode_pgm(page.image));
    write_text(dir / "page.txt", page.text + "\n");
  }
  record_config(sub, dir / "synth.config.json");
  std::cout << corpus.examples.size() << " crops over " << corpus.labels.size() << " classes written to "
            << dir.string() << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Glyph digitization pipeline: binarize, slice, train, recognize, evaluate"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of flag values, one object per subcommand; flags win");

  BinarizeArgs binarize_args;
  SliceArgs slice_args;
  TrainArgs train_args;
  RecognizeArgs recognize_args;
  EvalArgs eval_args;
  SynthArgs synth_args;
  add_binarize(app, binarize_args);
  add_slice(app, slice_args);
  add_train(app, train_args);
  add_recognize(app, recognize_args);
  add_eval(app, eval_args);
  add_synth(app, synth_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const CLI::App& sub = *app.get_subcommands().front();
  const std::string& name = sub.get_name();
  if (name == "binarize") return run_binarize(sub, binarize_args);
  if (name == "slice") return run_slice(sub, slice_args);
  if (name == "train") return run_train(sub, train_args);
  if (name == "recognize") return run_recognize(sub, recognize_args);
  if (name == "eval") return run_eval(sub, eval_args);
  return run_synth(sub, synth_args);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const glyphocr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Internal ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
