#include "popqc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <stdexcept>
#include <string>

#include "popqc/parallel.hpp"

namespace popqc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_sorted_unique(const FingerSet& fingers, const char* what) {
  for (std::size_t i = 0; i + 1 < fingers.size(); ++i) {
    if (fingers[i] >= fingers[i + 1]) {
      throw std::invalid_argument(std::string(what) +
                                  ": indices must be sorted and distinct");
    }
  }
}

}  // namespace

FingerSet initial_fingers(std::size_t num_gates, std::size_t omega) {
  if (omega == 0) {
    throw std::invalid_argument("omega must be at least 1");
  }
  FingerSet fingers;
  for (std::size_t f = 0; f < num_gates; f += omega) {
    fingers.push_back(f);
  }
  return fingers;
}

FingerSet merge_dedup(const FingerSet& a, const FingerSet& b) {
  require_sorted_unique(a, "merge_dedup lhs");
  require_sorted_unique(b, "merge_dedup rhs");
  FingerSet out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else if (b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
  return out;
}

std::pair<FingerSet, FingerSet> select_fingers(const FingerSet& fingers,
                                               const Circuit& circuit,
                                               std::size_t omega,
                                               unsigned threads) {
  if (omega == 0) {
    throw std::invalid_argument("omega must be at least 1");
  }
  require_sorted_unique(fingers, "select_fingers input");
  const std::size_t n = fingers.size();
  if (n == 0) {
    return {};
  }

  std::vector<std::size_t> ranks(n);
  parallel_for(threads, n, 1024, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ranks[i] = circuit.before(fingers[i]);
    }
  });

  // First finger of each 2*omega-rank group, split by group parity.
  const std::size_t group_width = 2 * omega;
  std::vector<std::size_t> even_idx, odd_idx;
  std::size_t prev_group = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t group = ranks[i] / group_width;
    if (i == 0 || group > prev_group) {
      (group % 2 == 0 ? even_idx : odd_idx).push_back(i);
    }
    prev_group = group;
  }

  const std::vector<std::size_t>& sel_idx =
      even_idx.size() > odd_idx.size() ? even_idx : odd_idx;

  FingerSet selected;
  selected.reserve(sel_idx.size());
  bool have_prev = false;
  std::size_t prev_rank = 0;
  for (std::size_t idx : sel_idx) {
    selected.push_back(fingers[idx]);
    if (have_prev && ranks[idx] - prev_rank < group_width) {
      throw std::logic_error("select_fingers: selected fingers interfere");
    }
    prev_rank = ranks[idx];
    have_prev = true;
  }

  FingerSet remaining;
  remaining.reserve(n - selected.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < sel_idx.size() && sel_idx[k] == i) {
      ++k;
      continue;
    }
    remaining.push_back(fingers[i]);
  }
  return {std::move(selected), std::move(remaining)};
}

namespace {

struct StagedSegment {
  bool improved{false};
  std::vector<SlotUpdate> updates;
  std::size_t new_finger_left{0};
  std::size_t new_finger_right{0};
  std::size_t removed{0};
  double oracle_seconds{0.0};
  std::exception_ptr error;
};

}  // namespace

FingerSet optimize_segments(Circuit& circuit, const FingerSet& fingers,
                            const Oracle& oracle, std::size_t omega,
                            unsigned threads, RoundStats* stats) {
  auto [selected, remaining] = select_fingers(fingers, circuit, omega, threads);

  // Read-only parallel phase: each selected finger extracts its window,
  // runs the oracle, and stages replacement slots plus boundary fingers in
  // a private buffer. All ranks are relative to the pre-update circuit.
  std::vector<StagedSegment> staged(selected.size());
  const FingerSet& sel = selected;
  parallel_for(threads, selected.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      StagedSegment& s = staged[k];
      try {
        const std::size_t center = circuit.before(sel[k]);
        Segment segment = circuit.extract_segment(center, omega);
        auto t0 = Clock::now();
        std::vector<Gate> optimized =
            oracle.optimize_segment(circuit.num_qubits(), segment.gates);
        s.oracle_seconds = seconds_since(t0);
        if (optimized.size() >= segment.gates.size()) {
          continue;  // accept strictly smaller replacements only
        }
        s.improved = true;
        s.removed = segment.gates.size() - optimized.size();
        s.updates.reserve(segment.gates.size());
        for (std::size_t m = 0; m < segment.gates.size(); ++m) {
          std::size_t slot = circuit.index_of(segment.start_rank + m);
          if (m < optimized.size()) {
            s.updates.push_back(SlotUpdate{slot, optimized[m]});
          } else {
            s.updates.push_back(SlotUpdate{slot, std::nullopt});
          }
        }
        // Boundary fingers at ranks center +- omega, clamped, converted to
        // slots against the pre-update tree.
        const std::size_t live = circuit.size();
        std::size_t left_rank = center >= omega ? center - omega : 0;
        std::size_t right_rank = center + omega < live ? center + omega : live - 1;
        s.new_finger_left = circuit.index_of(left_rank);
        s.new_finger_right = circuit.index_of(right_rank);
      } catch (...) {
        s.improved = false;
        s.error = std::current_exception();
      }
    }
  });

  // Exclusive write phase: one batched substitute in canonical finger
  // order. Non-interference makes the slot ranges disjoint.
  std::vector<SlotUpdate> updates;
  std::size_t removed_total = 0;
  std::size_t improved_count = 0;
  for (const StagedSegment& s : staged) {
    if (!s.improved) continue;
    updates.insert(updates.end(), s.updates.begin(), s.updates.end());
    removed_total += s.removed;
    ++improved_count;
  }
  circuit.substitute(updates, threads);

  FingerSet fresh;
  fresh.reserve(2 * improved_count);
  for (const StagedSegment& s : staged) {
    if (!s.improved) continue;
    for (std::size_t f : {s.new_finger_left, s.new_finger_right}) {
      if (fresh.empty() || fresh.back() < f) {
        fresh.push_back(f);
      } else if (fresh.back() > f) {
        throw std::logic_error("optimize_segments: staged fingers out of order");
      }
    }
  }

  FingerSet merged = merge_dedup(remaining, fresh);

  // Re-anchor fingers whose slot was tombstoned onto the live gate at the
  // same rank. Coverage is unchanged (the rank is what windows are made
  // of), and bounding fingers per 2*omega-rank group at 2*omega keeps the
  // selection-fraction guarantee exact.
  const std::size_t live_after = circuit.size();
  FingerSet result;
  if (live_after > 0) {
    result.reserve(merged.size());
    for (std::size_t f : merged) {
      std::size_t anchored = f;
      if (circuit.is_tombstone(f)) {
        std::size_t rank = circuit.before(f);
        if (rank >= live_after) rank = live_after - 1;
        anchored = circuit.index_of(rank);
      }
      if (result.empty() || result.back() < anchored) {
        result.push_back(anchored);
      }
    }
  }

  if (stats) {
    stats->fingers_total = fingers.size();
    stats->fingers_selected = selected.size();
    stats->oracle_calls = selected.size();
    stats->gates_removed = removed_total;
    stats->live_gates = circuit.size();
    stats->potential = result.size() + 2 * circuit.size();
    double oracle_seconds = 0.0;
    for (const StagedSegment& s : staged) {
      oracle_seconds += s.oracle_seconds;
    }
    stats->oracle_seconds = oracle_seconds;
  }

  // Oracle failures were treated as "no improvement" so the round stayed
  // consistent; now surface the first one.
  for (const StagedSegment& s : staged) {
    if (s.error) {
      std::rethrow_exception(s.error);
    }
  }
  return result;
}

OptimizeResult optimize(const Oracle& oracle, std::span<const Gate> gates,
                        std::uint32_t num_qubits,
                        const OptimizerConfig& config) {
  if (gates.empty()) {
    throw std::invalid_argument("optimize needs a nonempty circuit");
  }
  if (config.omega == 0) {
    throw std::invalid_argument("omega must be at least 1");
  }
  unsigned threads = config.threads.value_or(default_thread_count());
  if (threads == 0) threads = 1;

  Circuit circuit(gates, num_qubits);
  FingerSet fingers = initial_fingers(gates.size(), config.omega);

  OptimizeResult result;
  std::size_t round = 0;
  while (!fingers.empty()) {
    if (config.max_rounds && round >= *config.max_rounds) {
      result.converged = false;
      break;
    }
    ++round;
    const std::size_t potential_before = fingers.size() + 2 * circuit.size();

    RoundStats rs;
    auto t0 = Clock::now();
    fingers = optimize_segments(circuit, fingers, oracle, config.omega, threads, &rs);
    rs.round = round;
    rs.wall_seconds = seconds_since(t0);

    const std::size_t potential_after = fingers.size() + 2 * circuit.size();
    if (potential_after + rs.oracle_calls > potential_before) {
      throw std::logic_error("optimize: potential dropped by less than one per oracle call");
    }
    // The fraction guarantee needs fingers with pairwise-distinct ranks,
    // which the round loop maintains by re-anchoring them to live slots.
    if (rs.fingers_selected * 4 * config.omega < rs.fingers_total) {
      throw std::logic_error("optimize: selected fraction below 1/(4*omega)");
    }

    if (config.check_tracking_invariant) {
      auto violations =
          tracking_invariant_violations(circuit, fingers, oracle, config.omega, threads);
      if (!violations.empty()) {
        throw std::logic_error("optimize: tracking invariant violated at rank " +
                               std::to_string(violations.front().start_rank));
      }
    }

    result.total_oracle_calls += rs.oracle_calls;
    result.oracle_seconds += rs.oracle_seconds;
    if (config.collect_stats) {
      result.rounds.push_back(rs);
    }
  }

  // Exact consequence of the potential argument: L starts at
  // ceil(n / omega) + 2n and pays at least 1 per call.
  const std::size_t n = gates.size();
  const std::size_t call_budget = (n + config.omega - 1) / config.omega + 2 * n;
  if (result.total_oracle_calls > call_budget) {
    throw std::logic_error("optimize: oracle call count exceeded the potential bound");
  }

  result.gates = circuit.gates();
  return result;
}

std::vector<TrackingViolation> tracking_invariant_violations(
    const Circuit& circuit, const FingerSet& fingers, const Oracle& oracle,
    std::size_t omega, unsigned threads) {
  std::vector<Gate> gates = circuit.gates();
  const std::size_t n = gates.size();
  if (n == 0) return {};

  std::vector<std::size_t> ranks(fingers.size());
  for (std::size_t i = 0; i < fingers.size(); ++i) {
    ranks[i] = circuit.before(fingers[i]);
  }

  const std::size_t grain = 128;
  std::vector<std::vector<TrackingViolation>> found((n + grain - 1) / grain);
  parallel_for(threads, n, grain, [&](std::size_t begin, std::size_t end) {
    auto& out = found[begin / grain];
    for (std::size_t start = begin; start < end; ++start) {
      std::size_t len = omega < n - start ? omega : n - start;
      std::span<const Gate> window(gates.data() + start, len);
      std::vector<Gate> reduced = oracle.optimize_segment(circuit.num_qubits(), window);
      if (reduced.size() >= len) continue;
      // Reducible: some finger's 2*omega window must contain [start, start+len).
      std::size_t stop = start + len;
      std::size_t lo = stop >= omega ? stop - omega : 0;
      std::size_t hi = start + omega;
      auto it = std::lower_bound(ranks.begin(), ranks.end(), lo);
      if (it == ranks.end() || *it > hi) {
        out.push_back(TrackingViolation{start, len});
      }
    }
  });

  std::vector<TrackingViolation> violations;
  for (auto& chunk : found) {
    violations.insert(violations.end(), chunk.begin(), chunk.end());
  }
  return violations;
}

}  // namespace popqc
