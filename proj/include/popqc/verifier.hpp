#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "popqc/gate.hpp"
#include "popqc/oracle.hpp"

namespace popqc {

/// Largest qubit count the dense checks accept by default. A 12-qubit
/// unitary is a 4096 x 4096 complex matrix (~256 MB); anything bigger has
/// to be verified structurally instead.
inline constexpr std::uint32_t kDefaultQubitCap = 12;

/// Dense 2^q x 2^q complex matrix, row-major. Qubit 0 owns the most
/// significant index bit, i.e. a gate on qubit i is I^(i) (x) U (x) I^(q-i-1).
class Unitary {
 public:
  static Unitary identity(std::uint32_t num_qubits);

  std::uint32_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dim_; }

  std::complex<double>& at(std::size_t row, std::size_t col) {
    return m_[row * dim_ + col];
  }
  const std::complex<double>& at(std::size_t row, std::size_t col) const {
    return m_[row * dim_ + col];
  }

  /// Left-multiply by the gate's matrix: U <- [g] U.
  void apply(const Gate& gate);

 private:
  Unitary(std::uint32_t num_qubits, std::size_t dim)
      : num_qubits_(num_qubits), dim_(dim), m_(dim * dim) {}

  std::uint32_t num_qubits_;
  std::size_t dim_;
  std::vector<std::complex<double>> m_;
};

/// Product of the gates' matrices in circuit order (first gate applied
/// first). Throws when num_qubits exceeds the cap.
Unitary circuit_unitary(std::uint32_t num_qubits, std::span<const Gate> gates,
                        std::uint32_t qubit_cap = kDefaultQubitCap);

struct EquivalenceResult {
  bool equivalent{false};
  /// Max-norm of U_a - phase * U_b after factoring out the global phase at
  /// the largest-magnitude entry.
  double deviation{0.0};
};

EquivalenceResult check_equivalence(std::uint32_t num_qubits,
                                    std::span<const Gate> a,
                                    std::span<const Gate> b,
                                    double tolerance = 1e-9,
                                    std::uint32_t qubit_cap = kDefaultQubitCap);

struct OptimalityViolation {
  std::size_t start_rank{0};
  std::size_t window_length{0};
  std::size_t reduced_to{0};
};

struct LocalOptimalityReport {
  std::size_t windows_checked{0};
  std::vector<OptimalityViolation> violations;

  bool locally_optimal() const { return violations.empty(); }
};

/// Exhaustive scan for the local-optimality property: slides a width-omega
/// window over every start rank (the shorter suffix windows near the end
/// are scanned too, so every contiguous window of length <= omega sits
/// inside some scanned window) and records each window the oracle strictly
/// shrinks. Pure; parallelizes over start ranks when threads > 1.
LocalOptimalityReport check_local_optimality(const Oracle& oracle,
                                             std::uint32_t num_qubits,
                                             std::span<const Gate> gates,
                                             std::size_t omega,
                                             unsigned threads = 1);

/// max |U U^dagger - I|; O(dim^3), intended for small test matrices.
double unitarity_deviation(const Unitary& u);

}  // namespace popqc
