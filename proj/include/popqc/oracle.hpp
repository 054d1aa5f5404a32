#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "popqc/gate.hpp"

namespace popqc {

class OracleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A segment optimizer treated as a black box: gate sequence in, an
/// equivalent gate sequence out. Implementations must tolerate concurrent
/// calls from many threads.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::vector<Gate> optimize_segment(std::uint32_t num_qubits,
                                             std::span<const Gate> segment) const = 0;

  /// Cost of a gate sequence; the optimizer accepts a rewrite only when the
  /// cost strictly drops. Default: gate count.
  virtual std::size_t cost(std::span<const Gate> gates) const {
    return gates.size();
  }

  virtual std::string name() const = 0;
};

/// Deterministic rewrite-rule oracle so the whole pipeline runs with no
/// external processes. Scans left to right and restarts after every
/// rewrite, applying until fixpoint:
///
///   - inverse cancellation of H.H, X.X and CNOT.CNOT pairs whose operands
///     match and that meet after commuting the left gate rightward;
///   - RZ(a).RZ(b) on one qubit fuses to RZ(a+b mod 2pi); an RZ within
///     1e-12 of a full turn is dropped;
///   - allowed commutations: gates on disjoint qubits, X across a CNOT
///     acting on its target, RZ across a CNOT acting on its control.
///
/// Output never has more gates than the input, and a second call returns
/// its input unchanged.
class BuiltinOracle final : public Oracle {
 public:
  std::vector<Gate> optimize_segment(std::uint32_t num_qubits,
                                     std::span<const Gate> segment) const override;
  std::string name() const override { return "builtin"; }

  /// RZ angles closer than this to a multiple of 2pi are treated as zero.
  static constexpr double kZeroAngleTolerance = 1e-12;
};

/// Leaves every segment untouched. Useful as a baseline and in tests.
class IdentityOracle final : public Oracle {
 public:
  std::vector<Gate> optimize_segment(std::uint32_t,
                                     std::span<const Gate> segment) const override {
    return {segment.begin(), segment.end()};
  }
  std::string name() const override { return "identity"; }
};

/// One failure found by `is_well_behaved_sample`: a sub-window of an
/// oracle output that the same oracle shrinks further.
struct WellBehavedCounterexample {
  std::vector<Gate> segment;       // the randomly drawn input
  std::vector<Gate> output;        // oracle(segment)
  std::size_t window_start{0};     // offending window within `output`
  std::size_t window_length{0};
  std::size_t reduced_to{0};       // size after the second oracle call
};

struct WellBehavedReport {
  int trials{0};
  std::size_t windows_checked{0};
  std::vector<WellBehavedCounterexample> counterexamples;

  bool ok() const { return counterexamples.empty(); }
};

/// Sample-based check of the well-behaved property: optimize random
/// segments once, then assert no contiguous window of the output can be
/// shrunk by a second oracle call.
WellBehavedReport is_well_behaved_sample(const Oracle& oracle, int trials,
                                         std::uint64_t seed,
                                         std::uint32_t num_qubits = 6,
                                         std::size_t segment_length = 64);

}  // namespace popqc
