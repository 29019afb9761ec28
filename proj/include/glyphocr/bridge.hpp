#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace glyphocr {

enum class EngineKind { ocr, tts };

std::string_view to_string(EngineKind kind) noexcept;

inline constexpr std::chrono::seconds kDefaultBridgeTimeout{30};

/// An external engine invoked through `/bin/sh -c`. The template's
/// `{input}` and `{output}` placeholders are replaced by single-quoted paths.
/// OCR templates need `{input}`; TTS templates need both.
class EngineBridge {
 public:
  EngineBridge(EngineKind kind, std::string command_template,
               std::chrono::milliseconds timeout = kDefaultBridgeTimeout);

  EngineKind kind() const noexcept { return kind_; }
  const std::string& command_template() const noexcept { return template_; }
  std::chrono::milliseconds timeout() const noexcept { return timeout_; }

  std::string expand(const std::filesystem::path& input, const std::filesystem::path& output = {}) const;

 private:
  EngineKind kind_;
  std::string template_;
  std::chrono::milliseconds timeout_;
};

struct CommandOutcome {
  int exit_code = -1;     // -1 when killed or not started
  bool timed_out = false;
  std::string stdout_text;

  bool ok() const noexcept { return exit_code == 0 && !timed_out; }
};

/// Runs `command` under `/bin/sh -c` in its own process group, capturing
/// stdout. The whole group is killed once `timeout` elapses.
CommandOutcome run_command(const std::string& command, std::chrono::milliseconds timeout);

std::string shell_quote(std::string_view text);

}  // namespace glyphocr
