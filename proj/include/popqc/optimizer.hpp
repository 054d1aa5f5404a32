#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "popqc/circuit.hpp"
#include "popqc/oracle.hpp"

namespace popqc {

/// Sorted, duplicate-free slot indices marking regions of the circuit that
/// may still be optimizable. Invariant maintained by the round loop: every
/// width-omega window of live gates that the oracle would shrink is covered
/// by some finger.
using FingerSet = std::vector<std::size_t>;

struct OptimizerConfig {
  /// Segment radius: the oracle sees windows of up to 2*omega gates.
  std::size_t omega{200};
  /// Safety cap on rounds; unset means run until no fingers remain (the
  /// potential argument guarantees termination).
  std::optional<std::size_t> max_rounds;
  /// Worker threads for the per-round parallel phase; unset uses the
  /// hardware thread count.
  std::optional<unsigned> threads;
  bool collect_stats{true};
  /// After every round, rescan all windows with the oracle and fail if a
  /// reducible window has no covering finger. Exhaustive and slow; meant
  /// for tests and debugging on small circuits.
  bool check_tracking_invariant{false};
};

struct RoundStats {
  std::size_t round{0};
  std::size_t fingers_total{0};     // |F| entering the round
  std::size_t fingers_selected{0};
  std::size_t oracle_calls{0};
  std::size_t gates_removed{0};
  std::size_t live_gates{0};        // after the round
  std::size_t potential{0};         // L = |F| + 2*live, after the round
  double wall_seconds{0.0};
  double oracle_seconds{0.0};       // time spent inside the oracle this round
};

struct OptimizeResult {
  std::vector<Gate> gates;
  std::vector<RoundStats> rounds;
  std::size_t total_oracle_calls{0};
  double oracle_seconds{0.0};
  /// False when max_rounds fired with fingers still pending; the gate list
  /// is then a valid equivalent circuit but not necessarily locally optimal.
  bool converged{true};
};

/// Entry point: round-based locally-optimal circuit optimization.
///
/// Fingers start at {0, omega, 2*omega, ...}; each round selects a
/// non-interfering subset, optimizes the 2*omega-gate windows around them
/// in parallel, applies all rewrites in one batch, and maintains the finger
/// invariant. Runs until no fingers remain, at which point no width-omega
/// window of the result can be shrunk by the oracle.
///
/// With a deterministic oracle the result is identical for every thread
/// count. Two internal guarantees are checked on every round and throw
/// std::logic_error when violated: the potential |F| + 2*|circuit| drops by
/// at least one per oracle call, and selected fingers are pairwise at least
/// 2*omega ranks apart.
OptimizeResult optimize(const Oracle& oracle, std::span<const Gate> gates,
                        std::uint32_t num_qubits,
                        const OptimizerConfig& config = {});

/// One round: select fingers, optimize their segments in parallel, batch
/// the slot updates, and return the maintained finger set.
///
/// A segment whose oracle call fails is kept unchanged so the round
/// completes with a consistent circuit; the first failure is rethrown
/// after the updates land. Timeouts never reach this layer (the external
/// adapter already reports them as "no improvement").
FingerSet optimize_segments(Circuit& circuit, const FingerSet& fingers,
                            const Oracle& oracle, std::size_t omega,
                            unsigned threads = 1, RoundStats* stats = nullptr);

/// Partition fingers into (selected, remaining). Fingers are grouped by
/// floor(rank / 2*omega); the first finger of each group enters the even or
/// odd bucket by group parity, and the larger bucket is selected. Selected
/// fingers are pairwise non-interfering (>= 2*omega ranks apart) and number
/// at least |fingers| / (4*omega).
std::pair<FingerSet, FingerSet> select_fingers(const FingerSet& fingers,
                                               const Circuit& circuit,
                                               std::size_t omega,
                                               unsigned threads = 1);

/// Sorted union of two sorted duplicate-free index lists, O(|a| + |b|).
FingerSet merge_dedup(const FingerSet& a, const FingerSet& b);

/// {0, omega, 2*omega, ...} restricted to [0, num_gates).
FingerSet initial_fingers(std::size_t num_gates, std::size_t omega);

struct TrackingViolation {
  std::size_t start_rank{0};
  std::size_t window_length{0};
};

/// Debug scan behind OptimizerConfig::check_tracking_invariant: every
/// reducible window of width <= omega must be covered by a finger whose
/// 2*omega extraction window contains it.
std::vector<TrackingViolation> tracking_invariant_violations(
    const Circuit& circuit, const FingerSet& fingers, const Oracle& oracle,
    std::size_t omega, unsigned threads = 1);

}  // namespace popqc
