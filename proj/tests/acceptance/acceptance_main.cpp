// Acceptance gate. Each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glyphocr/binarize.hpp"
#include "glyphocr/bridge.hpp"
#include "glyphocr/checkpoint.hpp"
#include "glyphocr/corpus.hpp"
#include "glyphocr/errors.hpp"
#include "glyphocr/evalkit.hpp"
#include "glyphocr/layers.hpp"
#include "glyphocr/network.hpp"
#include "glyphocr/raster.hpp"
#include "glyphocr/recognize.hpp"
#include "glyphocr/rng.hpp"
#include "glyphocr/segment.hpp"
#include "glyphocr/train.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace glyphocr;
namespace L = glyphocr::layers;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failed checks so one criterion can report the first few.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 3) failures_.push_back(what);
    failed_ += ok ? 0 : 1;
  }
  bool ok() const { return failed_ == 0; }
  Outcome outcome(const std::string& summary) const {
    if (ok()) return {true, summary};
    std::string d = std::to_string(failed_) + "/" + std::to_string(total_) + " checks failed:";
    for (const auto& f : failures_) d += " [" + f + "]";
    return {false, d};
  }

 private:
  int total_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// ------------------------------------------------------------------ 1

Outcome combined_efficiency_matches_reference() {
  const std::vector<double> reference{79.1, 79.7, 81.3, 75.0, 71.1, 80.0};
  const double got = combined_efficiency(reference);
  return {got == 77.7, "combined_efficiency = " + fmt(got, 6) + " (expected 77.7)"};
}

// ------------------------------------------------------------------ 2

Outcome otsu_matches_oracle() {
  Checks c;
  auto compare = [&](const std::vector<std::uint8_t>& px, int w, int h, const std::string& name) {
    const auto expected = oracle::brute_force_otsu(px);
    const auto got = otsu_threshold(histogram(GrayImage(w, h, px)));
    c.expect(got.threshold == expected.threshold,
             name + ": threshold " + std::to_string(got.threshold) + " vs " + std::to_string(expected.threshold));
    const double rel = std::abs(got.within_class_variance - expected.within) / std::max(1e-300, std::abs(expected.within));
    c.expect(expected.within == got.within_class_variance || rel <= 1e-9, name + ": objective rel err " + fmt(rel));
  };

  std::mt19937_64 rng(0x07575);
  for (int i = 0; i < 100; ++i) {
    const GrayImage img = testing_support::random_gray(16, 16, rng);
    compare(std::vector<std::uint8_t>(img.pixels().begin(), img.pixels().end()), 16, 16, "random " + std::to_string(i));
  }

  auto two_bin = [](int a, int na, int b, int nb) {
    std::vector<std::uint8_t> px(na, static_cast<std::uint8_t>(a));
    px.insert(px.end(), nb, static_cast<std::uint8_t>(b));
    return px;
  };
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> adversarial{
      {"single bin 0", std::vector<std::uint8_t>(64, 0)},
      {"single bin 255", std::vector<std::uint8_t>(64, 255)},
      {"single bin 128", std::vector<std::uint8_t>(64, 128)},
      {"two bins 0/255", two_bin(0, 32, 255, 32)},
      {"two bins adjacent", two_bin(7, 1, 8, 63)},
      {"two bins top", two_bin(254, 60, 255, 4)},
  };
  std::vector<std::uint8_t> uniform(256);
  std::iota(uniform.begin(), uniform.end(), 0);
  adversarial.emplace_back("uniform 0..255", uniform);
  std::vector<std::uint8_t> sparse;
  for (int v = 0; v < 256; v += 17) sparse.insert(sparse.end(), 4, static_cast<std::uint8_t>(v));
  adversarial.emplace_back("uniform every 17th", sparse);
  adversarial.emplace_back("symmetric three bins", std::vector<std::uint8_t>{10, 10, 100, 100, 190, 190, 10, 190});
  std::vector<std::uint8_t> spike(63, 200);
  spike.push_back(0);
  adversarial.emplace_back("lone outlier", spike);

  for (const auto& [name, px] : adversarial) {
    const int n = static_cast<int>(px.size());
    compare(px, n, 1, name);
  }
  return c.outcome("100 random 16x16 + " + std::to_string(adversarial.size()) + " adversarial histograms agree");
}

// ------------------------------------------------------------------ 3

struct GradCheck {
  int checked = 0;
  double worst = 0.0;
};

constexpr double kH = 1e-5;
constexpr double kTol = 1e-4;

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return Tensor(std::move(shape), random_vector(n, rng));
}

double probe(const Tensor& out, const Tensor& weights) {
  double s = 0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
  return s;
}

// Checks `count` distinct coordinates drawn from the listed (value, analytic) slots.
void check_sample(std::vector<std::pair<double*, double>> slots, int count, std::mt19937_64& rng,
                  const std::function<double()>& loss, GradCheck& g) {
  shuffle_in_place(std::span(slots), rng);
  const int n = std::min<int>(count, static_cast<int>(slots.size()));
  for (int i = 0; i < n; ++i) {
    const double numeric = oracle::central_difference(*slots[i].first, kH, loss);
    g.worst = std::max(g.worst, oracle::relative_error(slots[i].second, numeric));
    ++g.checked;
  }
}

Outcome gradients_match_finite_differences() {
  std::mt19937_64 rng(0x6EAD);
  std::vector<std::string> parts;
  bool pass = true;
  auto report = [&](const std::string& name, const GradCheck& g) {
    const bool ok = g.checked >= 200 && g.worst < kTol;
    pass = pass && ok;
    parts.push_back(name + " n=" + std::to_string(g.checked) + " max=" + fmt(g.worst, 2));
  };

  {  // convolution: weights, biases and inputs
    Tensor in = random_tensor({3, 8, 8}, rng);
    std::vector<double> w = random_vector(5 * 3 * 3 * 3, rng), b = random_vector(5, rng);
    const Tensor r = random_tensor({5, 6, 6}, rng);
    std::vector<double> gw(w.size(), 0.0), gb(b.size(), 0.0);
    const Tensor gin = L::conv2d_backward(in, w, 3, r, gw, gb);
    std::vector<std::pair<double*, double>> slots;
    for (std::size_t i = 0; i < w.size(); ++i) slots.emplace_back(&w[i], gw[i]);
    for (std::size_t i = 0; i < b.size(); ++i) slots.emplace_back(&b[i], gb[i]);
    for (std::size_t i = 0; i < in.size(); ++i) slots.emplace_back(&in[i], gin[i]);
    GradCheck g;
    check_sample(slots, 200, rng, [&] { return probe(L::conv2d(in, w, b, 3), r); }, g);
    report("conv", g);
  }
  {  // relu, inputs kept away from the kink
    Tensor in = random_tensor({4, 8, 8}, rng);
    for (std::size_t i = 0; i < in.size(); ++i)
      if (std::abs(in[i]) < 1e-3) in[i] = 0.5;
    const Tensor r = random_tensor(in.shape(), rng);
    const Tensor gin = L::relu_backward(in, r);
    std::vector<std::pair<double*, double>> slots;
    for (std::size_t i = 0; i < in.size(); ++i) slots.emplace_back(&in[i], gin[i]);
    GradCheck g;
    check_sample(slots, 200, rng, [&] { return probe(L::relu(in), r); }, g);
    report("relu", g);
  }
  {  // max pooling on distinct values
    Tensor in = random_tensor({4, 8, 8}, rng);
    const auto pooled = L::maxpool2x2(in);
    const Tensor r = random_tensor(pooled.output.shape(), rng);
    const Tensor gin = L::maxpool2x2_backward(in.shape(), pooled.argmax, r);
    std::vector<std::pair<double*, double>> slots;
    for (std::size_t i = 0; i < in.size(); ++i) slots.emplace_back(&in[i], gin[i]);
    GradCheck g;
    check_sample(slots, 200, rng, [&] { return probe(L::maxpool2x2(in).output, r); }, g);
    report("pool", g);
  }
  {  // dense
    std::vector<double> x = random_vector(20, rng), w = random_vector(12 * 20, rng), b = random_vector(12, rng);
    const Tensor r = random_tensor({12}, rng);
    std::vector<double> gw(w.size(), 0.0), gb(b.size(), 0.0);
    const Tensor gx = L::dense_backward(x, w, r, gw, gb);
    std::vector<std::pair<double*, double>> slots;
    for (std::size_t i = 0; i < w.size(); ++i) slots.emplace_back(&w[i], gw[i]);
    for (std::size_t i = 0; i < b.size(); ++i) slots.emplace_back(&b[i], gb[i]);
    for (std::size_t i = 0; i < x.size(); ++i) slots.emplace_back(&x[i], gx[i]);
    GradCheck g;
    check_sample(slots, 200, rng, [&] { return probe(L::dense(x, w, b, 12), r); }, g);
    report("dense", g);
  }
  {  // softmax + cross-entropy: dL/dz = p - onehot
    Tensor z = random_tensor({256}, rng);
    const int target = 17;
    const Tensor p = L::softmax(z);
    std::vector<std::pair<double*, double>> slots;
    for (std::size_t i = 0; i < z.size(); ++i) slots.emplace_back(&z[i], p[i] - (static_cast<int>(i) == target ? 1.0 : 0.0));
    GradCheck g;
    check_sample(slots, 200, rng, [&] { return loss_softmax(L::softmax(z), target); }, g);
    report("softmax", g);
  }
  {  // full network on an 8x8 input: 8 -> 4 -> 2 -> 2 -> 1
    const NetGeometry tiny{8, 5, 6, 1, 12};
    NetParams p = NetParams::glorot(tiny, 5, 77);
    for (auto& b : p.conv1_b) b = 0.05;
    for (auto& b : p.conv2_b) b = 0.05;
    std::uniform_real_distribution<double> pixel(0.0, 1.0);
    std::vector<double> px(64);
    for (auto& v : px) v = pixel(rng);
    const Tensor in({1, 8, 8}, px);
    const auto analytic = gradients(p, in, 3);
    std::vector<std::pair<double*, double>> slots;
    auto values = p.blocks();
    const auto grads = analytic.gradients.blocks();
    for (std::size_t blk = 0; blk < values.size(); ++blk)
      for (std::size_t i = 0; i < values[blk].size(); ++i) slots.emplace_back(&values[blk][i], grads[blk][i]);
    GradCheck g;
    check_sample(slots, 200, rng, [&] { return loss_softmax(forward(p, in).probs, 3); }, g);
    report("net8x8", g);
  }

  std::string detail;
  for (const auto& part : parts) detail += (detail.empty() ? "" : ", ") + part;
  return {pass, detail + " (h=1e-5, tol 1e-4)"};
}

// ------------------------------------------------------------------ 4

Outcome architecture_shapes() {
  const NetParams p = NetParams::glorot(NetGeometry::standard(), 12, 1);
  std::mt19937_64 rng(4);
  std::vector<double> px(kGlyphPixels);
  for (auto& v : px) v = static_cast<double>(rng() % 2);
  const ForwardTrace t = forward_trace(p, Tensor({1, 28, 28}, px));
  const std::string got = t.conv1.shape_string() + "->" + t.pool1.shape_string() + "->" + t.conv2.shape_string() + "->" +
                          t.pool2.shape_string() + "->" + t.embedding.shape_string();
  const std::string want = "(16,24,24)->(16,12,12)->(32,8,8)->(32,4,4)->(512)";
  return {got == want, got};
}

// ------------------------------------------------------------------ 5

struct Split {
  std::vector<LabeledExample> train, held_out;
};

// Last `fraction` of every class is held out.
Split split_by_class(const Corpus& corpus, double fraction) {
  std::vector<int> total(static_cast<std::size_t>(corpus.labels.size()), 0), seen(total.size(), 0);
  for (const auto& ex : corpus.examples) ++total[static_cast<std::size_t>(ex.class_id)];
  Split s;
  for (const auto& ex : corpus.examples) {
    const auto c = static_cast<std::size_t>(ex.class_id);
    const int keep = total[c] - static_cast<int>(std::lround(total[c] * fraction));
    (seen[c]++ < keep ? s.train : s.held_out).push_back(ex);
  }
  return s;
}

double accuracy_by_class_id(const NetParams& params, const std::vector<LabeledExample>& examples) {
  int correct = 0;
  for (const auto& ex : examples) {
    const auto probs = forward(params, ex.block).probs;
    const auto best = std::max_element(probs.data().begin(), probs.data().end()) - probs.data().begin();
    correct += best == ex.class_id;
  }
  return static_cast<double>(correct) / examples.size();
}

Outcome learns_synthetic_corpus() {
  const Corpus corpus = synth_corpus(20, 50, 2024);
  const Split split = split_by_class(corpus, 0.2);
  TrainConfig config;
  config.epochs = 15;
  config.learning_rate = 0.01;
  config.seed = 7;
  const auto model = train(Corpus{corpus.labels, split.train}, config).checkpoint;
  const double held = softmax_accuracy(model, split.held_out);

  const auto prototypes = build_prototypes(model, split.train);
  int agree = 0;
  for (const auto& ex : split.held_out) {
    const auto fwd = forward(model.params, ex.block);
    const auto pred = classify_embedding(model, prototypes, fwd.embedding.data(), fwd.probs.data());
    const auto head = std::max_element(fwd.probs.data().begin(), fwd.probs.data().end()) - fwd.probs.data().begin();
    agree += pred.class_id == head;
  }
  const double agreement = static_cast<double>(agree) / split.held_out.size();
  return {held >= 0.95 && agreement >= 0.90, "held-out accuracy " + fmt(held) + " (>= 0.95), prototype/softmax agreement " +
                                                 fmt(agreement) + " (>= 0.90), " + std::to_string(split.held_out.size()) +
                                                 " held-out, 15 epochs"};
}

// ------------------------------------------------------------------ 6

Outcome transfer_learning_contract() {
  const int k = 10;
  const Corpus modern = synth_corpus(k, 40, 11, Family::modern);
  TrainConfig pre_config;
  pre_config.epochs = 8;
  pre_config.seed = 3;
  const Checkpoint pretrained = train(modern, pre_config).checkpoint;

  const Corpus ancient = synth_corpus(k, 30, 12, Family::ancient);
  const Split split = split_by_class(ancient, 0.2);
  TrainConfig fine;
  fine.epochs = 8;
  fine.seed = 4;
  fine.freeze_conv = true;
  const Checkpoint tuned = train(Corpus{ancient.labels, split.train}, fine, &pretrained).checkpoint;

  const auto a = serialize_checkpoint(pretrained);
  const auto b = serialize_checkpoint(tuned);
  const std::size_t conv_bytes = 4 * (pretrained.params.conv1_w.size() + pretrained.params.conv1_b.size() +
                                      pretrained.params.conv2_w.size() + pretrained.params.conv2_b.size());
  const bool conv_identical = std::equal(a.begin() + 16, a.begin() + 16 + conv_bytes, b.begin() + 16);

  const double zero_shot = accuracy_by_class_id(pretrained.params, split.held_out);
  const double after = accuracy_by_class_id(tuned.params, split.held_out);
  return {conv_identical && after > zero_shot,
          std::string("conv bytes ") + (conv_identical ? "identical" : "DIFFER") + " (" + std::to_string(conv_bytes) +
              " B), ancient held-out accuracy " + fmt(zero_shot) + " zero-shot -> " + fmt(after) + " fine-tuned"};
}

// ------------------------------------------------------------------ 7

Outcome determinism() {
  Checks c;
  const Corpus corpus = synth_corpus(6, 12, 5);
  TrainConfig config;
  config.epochs = 3;
  config.batch_size = 4;
  config.seed = 99;
  config.augment = AugmentSpec{};
  const auto first = train(corpus, config).checkpoint;
  const auto second = train(corpus, config).checkpoint;
  c.expect(serialize_checkpoint(first) == serialize_checkpoint(second), "softmax checkpoints differ");

  TrainConfig contrastive = config;
  contrastive.mode = TrainMode::contrastive;
  contrastive.margin = 1.0;
  c.expect(serialize_checkpoint(train(corpus, contrastive).checkpoint) == serialize_checkpoint(train(corpus, contrastive).checkpoint),
           "contrastive checkpoints differ");

  const auto prototypes = build_prototypes(first, corpus.examples);
  c.expect(build_prototypes(first, corpus.examples) == prototypes, "prototypes differ");
  const auto page = synth_page(corpus, {3, 4}, 2, 8);
  const auto bytes = encode_pgm(page.image);
  const Image decoded_a = decode_image(bytes);
  const Image decoded_b = decode_image(bytes);
  const auto r1 = run_pipeline(decoded_a, {3, 4}, first, prototypes);
  const auto r2 = run_pipeline(decoded_b, {3, 4}, second, build_prototypes(second, corpus.examples));
  c.expect(recognition_json(r1) == recognition_json(r2), "recognition JSON differs");
  c.expect(encode_pgm(render_binary(r1.tile)) == encode_pgm(render_binary(r2.tile)), "tile bytes differ");
  return c.outcome("softmax + contrastive checkpoints, prototypes, recognition JSON and tile bytes repeat exactly");
}

// ------------------------------------------------------------------ 8

Outcome round_trips() {
  Checks c;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    const GrayImage img = testing_support::random_gray(w, h, rng);
    const auto back = decode_image(encode_pgm(img));
    c.expect(std::holds_alternative<GrayImage>(back) && std::get<GrayImage>(back) == img, "PGM " + std::to_string(i));
  }
  for (int i = 0; i < 30; ++i) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = 1 + static_cast<int>(rng() % 4);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(rows) * cols * kGlyphPixels);
    for (auto& b : bits) b = rng() % 3 == 0;
    const BinaryImage img(cols * kGlyphSide, rows * kGlyphSide, bits);
    c.expect(assemble_tile(slice(img, {rows, cols}), {rows, cols}, 0) == img, "slice/assemble " + std::to_string(i));
  }
  testing_support::TempDir dir;
  for (int k : {2, 20, 64}) {
    const Corpus corpus = synth_corpus(k, 1, static_cast<std::uint64_t>(k));
    Checkpoint ck{NetParams::glorot(NetGeometry::standard(), k, static_cast<std::uint64_t>(k)), corpus.labels};
    for (auto& b : ck.params.dense_b) b = std::uniform_real_distribution<double>(-1, 1)(rng);
    ck.params.round_to_float();
    const auto path = dir / ("m" + std::to_string(k) + ".bin");
    save_checkpoint(ck, path);
    const Checkpoint loaded = load_checkpoint(path);
    c.expect(loaded == ck, "checkpoint values K=" + std::to_string(k));
    c.expect(serialize_checkpoint(loaded) == read_file(path), "checkpoint bytes K=" + std::to_string(k));
  }
  return c.outcome("50 PGM, 30 slice/assemble and 3 checkpoint round trips bit-exact");
}

// ------------------------------------------------------------------ 9

Outcome bridge_contracts() {
  Checks c;
  const Corpus corpus = synth_corpus(4, 6, 9);
  TrainConfig config;
  config.epochs = 2;
  const auto model = train(corpus, config).checkpoint;
  const auto prototypes = build_prototypes(model, corpus.examples);
  const Image page = synth_page(corpus, {2, 2}, 1, 1).image;
  testing_support::TempDir dir;

  PipelineOptions ok;
  ok.ocr = EngineBridge(EngineKind::ocr, "test -s {input} && echo 'STUB OCR'");
  ok.tts = EngineBridge(EngineKind::tts, "cp {input} {output}");
  ok.audio_out = dir / "audio.out";
  const auto good = run_pipeline(page, {2, 2}, model, prototypes, ok);
  c.expect(good.final_text == "STUB OCR", "final_text = '" + good.final_text + "'");
  c.expect(good.audio_written && std::filesystem::file_size(dir / "audio.out") > 0, "audio file missing or empty");
  c.expect(good.warnings.empty(), "unexpected warnings");

  PipelineOptions bad;
  bad.ocr = EngineBridge(EngineKind::ocr, "echo junk; exit 7 # {input}");
  bad.tts = EngineBridge(EngineKind::tts, "exit 3 # {input} {output}");
  bad.audio_out = dir / "audio2.out";
  const auto degraded = run_pipeline(page, {2, 2}, model, prototypes, bad);
  c.expect(degraded.final_text == degraded.net_text, "final_text != net_text on failure");
  c.expect(!degraded.audio_written, "audio reported despite failure");
  c.expect(degraded.warnings.size() == 2, std::to_string(degraded.warnings.size()) + " warnings");

  PipelineOptions slow;
  slow.ocr = EngineBridge(EngineKind::ocr, "sleep 10; echo late {input}", std::chrono::milliseconds(300));
  const auto timed = run_pipeline(page, {2, 2}, model, prototypes, slow);
  c.expect(timed.final_text == timed.net_text && timed.warnings.size() == 1, "timeout not degraded");
  return c.outcome("echo OCR wins, copy TTS writes audio, failing and hanging stubs degrade to warnings");
}

// ------------------------------------------------------------------ 10

Outcome contrastive_properties() {
  Checks c;
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto distance = [](const Tensor& a, const Tensor& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  for (int i = 0; i < 1000; ++i) {
    const double margin = 0.1 + 5.0 * unit(rng);
    std::vector<double> base(512), dir(512);
    for (auto& v : base) v = normal(rng);
    double norm = 0;
    for (auto& v : dir) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const Tensor e1({512}, base);
    c.expect(loss_contrastive(e1, e1, true, margin) == 0.0, "identical positive pair " + std::to_string(i));

    auto at_distance = [&](double d) {
      std::vector<double> v = base;
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += dir[j] / norm * d;
      return Tensor({512}, v);
    };
    const Tensor far = at_distance(margin * (1.0 + 2.0 * unit(rng)) + 1e-9);
    c.expect(distance(e1, far) < margin || loss_contrastive(e1, far, false, margin) == 0.0, "far negative pair " + std::to_string(i));

    const Tensor near = at_distance(margin * unit(rng));
    const double d = distance(e1, near);
    const double expected = d < margin ? (margin - d) * (margin - d) : 0.0;
    const double got = loss_contrastive(e1, near, false, margin);
    c.expect(std::abs(got - expected) <= 1e-9 * std::max(1.0, expected), "hinge pair " + std::to_string(i));
    c.expect(loss_contrastive(e1, near, true, margin) >= 0.0 && got >= 0.0, "negative loss " + std::to_string(i));
  }
  return c.outcome("1000 random 512-d pairs: zero on identical positives, zero beyond margin, (m-d)^2 below");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"combined efficiency reproduces 77.7", combined_efficiency_matches_reference},
      {"Otsu equals exhaustive oracle", otsu_matches_oracle},
      {"gradients match finite differences", gradients_match_finite_differences},
      {"architecture shape trace", architecture_shapes},
      {"synthetic corpus learned end to end", learns_synthetic_corpus},
      {"transfer learning with frozen conv", transfer_learning_contract},
      {"determinism", determinism},
      {"round trips", round_trips},
      {"bridge contracts", bridge_contracts},
      {"contrastive loss properties", contrastive_properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %-40s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
