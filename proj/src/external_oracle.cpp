#include "popqc/external_oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "popqc/qasm.hpp"

namespace popqc {

namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

struct RunResult {
  int exit_code{-1};
  bool timed_out{false};
  std::string output;
};

// Run `command` through /bin/sh, feeding `input` on stdin and capturing
// stdout, with a hard wall-clock deadline. On timeout the whole process
// group is killed. stderr is inherited so oracle diagnostics stay visible.
RunResult run_process(const std::string& command, const std::string& working_directory,
                      std::string_view input, double timeout_seconds) {
  ignore_sigpipe_once();

  // O_CLOEXEC is load-bearing: concurrent calls fork in parallel, and a
  // child must not inherit another call's pipe ends or that call would
  // never see EOF on its streams.
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw OracleError("pipe2() failed: " + std::string(std::strerror(errno)));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw OracleError("pipe2() failed: " + std::string(std::strerror(errno)));
  }

  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw OracleError("fork() failed: " + std::string(std::strerror(errno)));
  }

  if (pid == 0) {
    ::setpgid(0, 0);  // own process group, so a timeout can kill helpers too
    ::dup2(in_pipe[0], STDIN_FILENO);   // dup2 clears O_CLOEXEC on 0 and 1
    ::dup2(out_pipe[1], STDOUT_FILENO);
    if (!working_directory.empty() && ::chdir(working_directory.c_str()) != 0) {
      std::fprintf(stderr, "popqc: cannot chdir to %s\n", working_directory.c_str());
      ::_exit(126);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  int to_child = in_pipe[1];
  int from_child = out_pipe[0];
  set_nonblocking(to_child);
  set_nonblocking(from_child);

  RunResult result;
  std::size_t written = 0;
  auto deadline = Clock::now() + std::chrono::duration<double>(timeout_seconds);

  while (to_child >= 0 || from_child >= 0) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      break;
    }

    struct pollfd fds[2];
    ::nfds_t nfds = 0;
    int to_child_slot = -1, from_child_slot = -1;
    if (to_child >= 0) {
      to_child_slot = static_cast<int>(nfds);
      fds[nfds++] = {to_child, POLLOUT, 0};
    }
    if (from_child >= 0) {
      from_child_slot = static_cast<int>(nfds);
      fds[nfds++] = {from_child, POLLIN, 0};
    }
    int rc = ::poll(fds, nfds, static_cast<int>(remaining.count()) + 1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }

    if (to_child >= 0) {
      short re = fds[to_child_slot].revents;
      if (re & (POLLOUT | POLLERR | POLLHUP)) {
        if (written < input.size() && (re & POLLOUT)) {
          ssize_t n = ::write(to_child, input.data() + written, input.size() - written);
          if (n > 0) {
            written += static_cast<std::size_t>(n);
          } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
            written = input.size();  // child closed its stdin; stop feeding
          }
        }
        if (written >= input.size() || (re & (POLLERR | POLLHUP))) {
          ::close(to_child);
          to_child = -1;
        }
      }
    }
    if (from_child >= 0) {
      short re = fds[from_child_slot].revents;
      if (re & (POLLIN | POLLHUP | POLLERR)) {
        char buf[16384];
        ssize_t n = ::read(from_child, buf, sizeof(buf));
        if (n > 0) {
          result.output.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0) {
          ::close(from_child);
          from_child = -1;
        } else if (errno != EAGAIN && errno != EINTR) {
          ::close(from_child);
          from_child = -1;
        }
      }
    }
  }

  if (to_child >= 0) ::close(to_child);
  if (from_child >= 0) ::close(from_child);

  if (result.timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = -1;
  }
  return result;
}

std::string make_temp_file(const char* tag) {
  const char* dir = std::getenv("TMPDIR");
  std::string path = std::string(dir && *dir ? dir : "/tmp") + "/popqc-" + tag + "-XXXXXX";
  std::vector<char> buf(path.begin(), path.end());
  buf.push_back('\0');
  int fd = ::mkstemp(buf.data());
  if (fd < 0) {
    throw OracleError("mkstemp failed: " + std::string(std::strerror(errno)));
  }
  ::close(fd);
  return std::string(buf.data());
}

bool replace_all(std::string& text, std::string_view needle, std::string_view value) {
  bool any = false;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
    any = true;
  }
  return any;
}

}  // namespace

ExternalOracle::ExternalOracle(ExternalOracleConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) {
    throw std::invalid_argument("external oracle needs a command");
  }
  if (!(config_.timeout_seconds > 0.0)) {
    throw std::invalid_argument("external oracle timeout must be positive");
  }
}

void ExternalOracle::acquire_slot() const {
  if (config_.max_concurrent == 0) return;
  std::unique_lock<std::mutex> lock(mutex_);
  slot_free_.wait(lock, [&] { return in_flight_ < config_.max_concurrent; });
  ++in_flight_;
}

void ExternalOracle::release_slot() const {
  if (config_.max_concurrent == 0) return;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    --in_flight_;
  }
  slot_free_.notify_one();
}

std::vector<Gate> ExternalOracle::optimize_segment(std::uint32_t num_qubits,
                                                   std::span<const Gate> segment) const {
  if (segment.empty()) {
    throw std::invalid_argument("external oracle segment must be nonempty");
  }
  std::string request =
      serialize_qasm(ParsedProgram{num_qubits, {segment.begin(), segment.end()}});

  acquire_slot();
  struct SlotGuard {
    const ExternalOracle* self;
    ~SlotGuard() { self->release_slot(); }
  } guard{this};

  std::string reply_text;
  if (config_.transport == OracleTransport::StdinStdout) {
    RunResult run = run_process(config_.command, config_.working_directory, request,
                                config_.timeout_seconds);
    if (run.timed_out) {
      std::fprintf(stderr,
                   "popqc: warning: oracle '%s' timed out after %.1fs, keeping segment\n",
                   config_.command.c_str(), config_.timeout_seconds);
      return {segment.begin(), segment.end()};
    }
    if (run.exit_code != 0) {
      throw OracleError("oracle '" + config_.command + "' exited with code " +
                        std::to_string(run.exit_code));
    }
    reply_text = std::move(run.output);
  } else {
    std::string in_path = make_temp_file("in");
    std::string out_path = make_temp_file("out");
    struct FileGuard {
      const std::string &a, &b;
      ~FileGuard() {
        ::unlink(a.c_str());
        ::unlink(b.c_str());
      }
    } files{in_path, out_path};

    write_text_file(in_path, request);
    std::string command = config_.command;
    bool used_in = replace_all(command, "{in}", in_path);
    bool used_out = replace_all(command, "{out}", out_path);
    if (!used_in || !used_out) {
      command += " '" + in_path + "' '" + out_path + "'";
    }
    RunResult run =
        run_process(command, config_.working_directory, "", config_.timeout_seconds);
    if (run.timed_out) {
      std::fprintf(stderr,
                   "popqc: warning: oracle '%s' timed out after %.1fs, keeping segment\n",
                   config_.command.c_str(), config_.timeout_seconds);
      return {segment.begin(), segment.end()};
    }
    if (run.exit_code != 0) {
      throw OracleError("oracle '" + config_.command + "' exited with code " +
                        std::to_string(run.exit_code));
    }
    try {
      reply_text = read_text_file(out_path);
    } catch (const std::exception& e) {
      throw OracleError("oracle reply file missing: " + std::string(e.what()));
    }
  }

  ParsedProgram reply;
  try {
    reply = parse_qasm(reply_text);
  } catch (const QasmError& e) {
    throw OracleError("unparseable oracle reply: " + std::string(e.what()));
  }
  if (reply.num_qubits > num_qubits) {
    throw OracleError("oracle reply declares " + std::to_string(reply.num_qubits) +
                      " qubits, request declared " + std::to_string(num_qubits));
  }
  return std::move(reply.gates);
}

}  // namespace popqc
