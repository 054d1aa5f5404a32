#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>

#include "popqc/oracle.hpp"

namespace popqc {

enum class OracleTransport { StdinStdout, TempFiles };

struct ExternalOracleConfig {
  /// Command line, run through /bin/sh -c. With the temp-file transport the
  /// placeholders {in} and {out} are replaced by the request and reply
  /// paths; if absent, both paths are appended as extra arguments.
  std::string command;
  /// Working directory for the child; empty inherits the caller's.
  std::string working_directory;
  double timeout_seconds{60.0};
  OracleTransport transport{OracleTransport::StdinStdout};
  /// Maximum concurrent oracle processes; 0 means no cap.
  unsigned max_concurrent{0};
};

/// Adapter that drives one external optimizer process per segment.
///
/// Protocol: the request is a complete OpenQASM 2.0 program carrying the
/// segment at full circuit width (original qubit indices); the reply is a
/// complete program on stdout or in the reply temp file. Exit code 0 means
/// success and the environment is passed through unchanged.
///
/// A timed-out call is reported as "no improvement" with a warning on
/// stderr, so a slow oracle degrades quality, never liveness. Spawn
/// failures, nonzero exits, malformed replies, and replies declaring more
/// qubits than the request throw OracleError.
class ExternalOracle final : public Oracle {
 public:
  explicit ExternalOracle(ExternalOracleConfig config);

  std::vector<Gate> optimize_segment(std::uint32_t num_qubits,
                                     std::span<const Gate> segment) const override;
  std::string name() const override { return "exec:" + config_.command; }

  const ExternalOracleConfig& config() const { return config_; }

 private:
  void acquire_slot() const;
  void release_slot() const;

  ExternalOracleConfig config_;
  mutable std::mutex mutex_;
  mutable std::condition_variable slot_free_;
  mutable unsigned in_flight_{0};
};

}  // namespace popqc
