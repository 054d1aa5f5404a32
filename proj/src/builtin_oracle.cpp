#include "popqc/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "popqc/synthetic.hpp"

namespace popqc {

namespace {

bool is_zero_rz(double angle) {
  // Distance to the nearest multiple of 2*pi.
  return std::fabs(std::remainder(angle, 2.0 * std::numbers::pi)) <=
         BuiltinOracle::kZeroAngleTolerance;
}

bool cancels(const Gate& a, const Gate& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case GateKind::H:
    case GateKind::X:
      return a.q0 == b.q0;
    case GateKind::Cnot:
      return a.q0 == b.q0 && a.q1 == b.q1;
    case GateKind::Rz:
      return false;  // handled by fusion
  }
  return false;
}

// True when [a, b] == [b, a] as operators under the allowed moves:
// disjoint supports, X across a CNOT's target, RZ across a CNOT's control.
bool commutes_past(const Gate& a, const Gate& b) {
  if (a.disjoint_from(b)) return true;
  if (a.kind == GateKind::X && b.kind == GateKind::Cnot && a.q0 == b.q1) return true;
  if (b.kind == GateKind::X && a.kind == GateKind::Cnot && b.q0 == a.q1) return true;
  if (a.kind == GateKind::Rz && b.kind == GateKind::Cnot && a.q0 == b.q0) return true;
  if (b.kind == GateKind::Rz && a.kind == GateKind::Cnot && b.q0 == a.q0) return true;
  return false;
}

}  // namespace

std::vector<Gate> BuiltinOracle::optimize_segment(std::uint32_t num_qubits,
                                                  std::span<const Gate> segment) const {
  for (const Gate& g : segment) {
    if (g.max_qubit() >= num_qubits) {
      throw std::invalid_argument("segment gate operand " +
                                  std::to_string(g.max_qubit()) +
                                  " out of range for " +
                                  std::to_string(num_qubits) + " qubits");
    }
  }
  std::vector<Gate> gates(segment.begin(), segment.end());

  // Left-to-right scan; every rewrite shrinks the list by at least one
  // gate and restarts the scan, so the loop terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < gates.size() && !changed; ++i) {
      if (gates[i].kind == GateKind::Rz && is_zero_rz(gates[i].angle)) {
        gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
      for (std::size_t j = i + 1; j < gates.size(); ++j) {
        if (cancels(gates[i], gates[j])) {
          gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(j));
          gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
        if (gates[i].kind == GateKind::Rz && gates[j].kind == GateKind::Rz &&
            gates[i].q0 == gates[j].q0) {
          gates[i] = Gate::rz(gates[i].q0, gates[i].angle + gates[j].angle);
          gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
        if (!commutes_past(gates[i], gates[j])) {
          break;
        }
      }
    }
  }
  return gates;
}

WellBehavedReport is_well_behaved_sample(const Oracle& oracle, int trials,
                                         std::uint64_t seed,
                                         std::uint32_t num_qubits,
                                         std::size_t segment_length) {
  if (trials <= 0) {
    throw std::invalid_argument("is_well_behaved_sample needs trials > 0");
  }
  Rng rng(seed);
  WellBehavedReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    std::vector<Gate> segment = random_gates(rng, num_qubits, segment_length);
    std::vector<Gate> output = oracle.optimize_segment(num_qubits, segment);
    for (std::size_t start = 0; start < output.size(); ++start) {
      for (std::size_t stop = start + 1; stop <= output.size(); ++stop) {
        std::span<const Gate> window(output.data() + start, stop - start);
        std::vector<Gate> reduced = oracle.optimize_segment(num_qubits, window);
        ++report.windows_checked;
        if (reduced.size() < window.size()) {
          report.counterexamples.push_back(WellBehavedCounterexample{
              segment, output, start, stop - start, reduced.size()});
          if (report.counterexamples.size() >= 16) {
            return report;  // enough evidence
          }
        }
      }
    }
  }
  return report;
}

}  // namespace popqc
