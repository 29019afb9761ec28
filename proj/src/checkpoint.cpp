#include "glyphocr/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>
#include <string_view>

#include "glyphocr/errors.hpp"
#include "glyphocr/raster.hpp"

namespace glyphocr {

namespace {

constexpr std::string_view kMagic = "GLYPHNET";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::CorruptCheckpoint, "checkpoint truncated");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t u32() {
    const auto b = take(4);
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
  }

  bool at_end() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint) {
  const NetParams& p = checkpoint.params;
  if (p.geometry != NetGeometry::standard()) {
    fail(ErrorCode::ShapeMismatch, "only the standard 28x28 network geometry can be serialized");
  }
  p.check_shapes();
  if (checkpoint.labels.size() != p.num_classes) {
    fail(ErrorCode::ShapeMismatch, "label map has " + std::to_string(checkpoint.labels.size()) + " classes, network has " +
                                       std::to_string(p.num_classes));
  }

  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(p.num_classes));
  out.reserve(out.size() + 4 * p.parameter_count() + 256);
  for (const auto& block : p.blocks()) {
    for (double v : block) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  const std::string labels = checkpoint.labels.to_json();
  put_u32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes, std::optional<int> expected_classes) {
  Reader in(bytes);
  const auto magic = in.take(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) fail(ErrorCode::CorruptCheckpoint, "bad magic");
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) fail(ErrorCode::CorruptCheckpoint, "unsupported version " + std::to_string(version));
  const std::uint32_t k = in.u32();
  if (k == 0 || k > 1'000'000) fail(ErrorCode::CorruptCheckpoint, "implausible class count " + std::to_string(k));
  if (expected_classes && static_cast<int>(k) != *expected_classes) {
    fail(ErrorCode::ShapeMismatch, "checkpoint has " + std::to_string(k) + " classes, expected " +
                                       std::to_string(*expected_classes));
  }

  Checkpoint cp;
  cp.params = NetParams::zeros(NetGeometry::standard(), static_cast<int>(k));
  for (auto block : cp.params.blocks()) {
    for (double& v : block) v = static_cast<double>(std::bit_cast<float>(in.u32()));
  }
  const std::uint32_t json_len = in.u32();
  const auto json = in.take(json_len);
  if (!in.at_end()) fail(ErrorCode::CorruptCheckpoint, "trailing bytes after label map");
  try {
    cp.labels = LabelMap::from_json(std::string_view(reinterpret_cast<const char*>(json.data()), json.size()));
  } catch (const Error& e) {
    fail(ErrorCode::CorruptCheckpoint, std::string("label map: ") + e.what());
  }
  if (cp.labels.size() != static_cast<int>(k)) fail(ErrorCode::CorruptCheckpoint, "label map size disagrees with header");
  return cp;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_classes) {
  return parse_checkpoint(read_file(path), expected_classes);
}

}  // namespace glyphocr
