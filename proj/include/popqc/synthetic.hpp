#pragma once

#include <cstdint>
#include <vector>

#include "popqc/gate.hpp"

namespace popqc {

/// splitmix64. Hand-rolled so that seeded streams are identical across
/// platforms and standard libraries, which keeps benchmark manifests and
/// test fixtures reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw from [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct SyntheticConfig {
  std::uint32_t num_qubits{8};
  std::size_t num_gates{10000};
  /// Probability that the generator emits a planted cancellation pair
  /// (two identical involutive gates, possibly separated by gates on
  /// disjoint qubits) instead of one independent random gate.
  double pair_density{0.3};
  std::uint64_t seed{1};
};

/// Seeded random circuit with planted cancellation opportunities, used by
/// the bench subcommand and the test corpus.
std::vector<Gate> generate_synthetic(const SyntheticConfig& config);

/// One uniformly drawn gate (H, X, RZ with a random angle, or CNOT when
/// two qubits are available).
Gate random_gate(Rng& rng, std::uint32_t num_qubits);

std::vector<Gate> random_gates(Rng& rng, std::uint32_t num_qubits,
                               std::size_t count);

}  // namespace popqc
