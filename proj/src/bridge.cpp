#include "glyphocr/bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>

#include "glyphocr/errors.hpp"

namespace glyphocr {

namespace {

constexpr std::string_view kInput = "{input}";
constexpr std::string_view kOutput = "{output}";

void replace_all(std::string& text, std::string_view from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string_view to_string(EngineKind kind) noexcept { return kind == EngineKind::tts ? "tts" : "ocr"; }

EngineBridge::EngineBridge(EngineKind kind, std::string command_template, std::chrono::milliseconds timeout)
    : kind_(kind), template_(std::move(command_template)), timeout_(timeout) {
  if (template_.find(kInput) == std::string::npos) {
    fail(ErrorCode::InvalidArgument, std::string(to_string(kind)) + " command needs an {input} placeholder");
  }
  if (kind == EngineKind::tts && template_.find(kOutput) == std::string::npos) {
    fail(ErrorCode::InvalidArgument, "tts command needs an {output} placeholder");
  }
  if (timeout_.count() <= 0) fail(ErrorCode::InvalidArgument, "bridge timeout must be positive");
}

std::string EngineBridge::expand(const std::filesystem::path& input, const std::filesystem::path& output) const {
  std::string cmd = template_;
  replace_all(cmd, kInput, shell_quote(input.string()));
  replace_all(cmd, kOutput, shell_quote(output.string()));
  return cmd;
}

std::string shell_quote(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

CommandOutcome run_command(const std::string& command, std::chrono::milliseconds timeout) {
  int fds[2];
  if (pipe(fds) != 0) fail(ErrorCode::BridgeFailure, std::string("pipe: ") + std::strerror(errno));

  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    fail(ErrorCode::BridgeFailure, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    const int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);

  CommandOutcome outcome;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  bool open_pipe = true;
  while (open_pipe) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      outcome.timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = read(fds[0], buf, sizeof(buf));
    if (n > 0) {
      outcome.stdout_text.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      open_pipe = false;
    }
  }
  close(fds[0]);

  int status = 0;
  if (outcome.timed_out) {
    kill(-pid, SIGKILL);
    waitpid(pid, &status, 0);
    return outcome;
  }
  // Stdout closed; the child may still be finishing. Bound that wait too.
  while (true) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) return outcome;
    if (std::chrono::steady_clock::now() >= deadline) {
      outcome.timed_out = true;
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      return outcome;
    }
    usleep(2000);
  }
  if (WIFEXITED(status)) outcome.exit_code = WEXITSTATUS(status);
  return outcome;
}

}  // namespace glyphocr
