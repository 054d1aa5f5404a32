#include "popqc/verifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "popqc/parallel.hpp"

namespace popqc {

Unitary Unitary::identity(std::uint32_t num_qubits) {
  if (num_qubits == 0 || num_qubits > 30) {
    throw std::invalid_argument("unsupported qubit count");
  }
  std::size_t dim = std::size_t{1} << num_qubits;
  Unitary u(num_qubits, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    u.at(i, i) = 1.0;
  }
  return u;
}

void Unitary::apply(const Gate& gate) {
  if (gate.max_qubit() >= num_qubits_) {
    throw std::invalid_argument("gate operand out of range");
  }
  const std::size_t dim = dim_;
  std::complex<double>* m = m_.data();

  switch (gate.kind) {
    case GateKind::H: {
      const std::size_t mask = dim >> (gate.q0 + 1);
      const double s = 1.0 / std::sqrt(2.0);
      for (std::size_t r = 0; r < dim; ++r) {
        if (r & mask) continue;
        std::complex<double>* a = m + r * dim;
        std::complex<double>* b = m + (r | mask) * dim;
        for (std::size_t c = 0; c < dim; ++c) {
          std::complex<double> top = a[c], bot = b[c];
          a[c] = s * (top + bot);
          b[c] = s * (top - bot);
        }
      }
      break;
    }
    case GateKind::X: {
      const std::size_t mask = dim >> (gate.q0 + 1);
      for (std::size_t r = 0; r < dim; ++r) {
        if (r & mask) continue;
        std::complex<double>* a = m + r * dim;
        std::complex<double>* b = m + (r | mask) * dim;
        for (std::size_t c = 0; c < dim; ++c) {
          std::swap(a[c], b[c]);
        }
      }
      break;
    }
    case GateKind::Rz: {
      // Phase convention: rz(theta) = diag(1, e^{i theta}), matching the
      // qelib1 u1 gate. Global phase is factored out by the equivalence
      // check, so the convention choice is unobservable there.
      const std::size_t mask = dim >> (gate.q0 + 1);
      const std::complex<double> phase =
          std::polar(1.0, gate.angle);
      for (std::size_t r = 0; r < dim; ++r) {
        if (!(r & mask)) continue;
        std::complex<double>* row = m + r * dim;
        for (std::size_t c = 0; c < dim; ++c) {
          row[c] *= phase;
        }
      }
      break;
    }
    case GateKind::Cnot: {
      const std::size_t cmask = dim >> (gate.q0 + 1);
      const std::size_t tmask = dim >> (gate.q1 + 1);
      for (std::size_t r = 0; r < dim; ++r) {
        if (!(r & cmask) || (r & tmask)) continue;
        std::complex<double>* a = m + r * dim;
        std::complex<double>* b = m + (r | tmask) * dim;
        for (std::size_t c = 0; c < dim; ++c) {
          std::swap(a[c], b[c]);
        }
      }
      break;
    }
  }
}

Unitary circuit_unitary(std::uint32_t num_qubits, std::span<const Gate> gates,
                        std::uint32_t qubit_cap) {
  if (num_qubits > qubit_cap) {
    throw std::invalid_argument("circuit_unitary: " + std::to_string(num_qubits) +
                                " qubits exceeds cap " + std::to_string(qubit_cap));
  }
  Unitary u = Unitary::identity(num_qubits);
  for (const Gate& g : gates) {
    u.apply(g);
  }
  return u;
}

EquivalenceResult check_equivalence(std::uint32_t num_qubits,
                                    std::span<const Gate> a,
                                    std::span<const Gate> b,
                                    double tolerance,
                                    std::uint32_t qubit_cap) {
  Unitary ua = circuit_unitary(num_qubits, a, qubit_cap);
  Unitary ub = circuit_unitary(num_qubits, b, qubit_cap);
  const std::size_t dim = ua.dim();

  // Factor out the global phase at the largest-magnitude entry. Ranking
  // entries by |ua| + |ub| keeps the anchor (and hence the deviation)
  // symmetric in the two arguments.
  std::size_t br = 0, bc = 0;
  double best = -1.0;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      double mag = std::abs(ua.at(r, c)) + std::abs(ub.at(r, c));
      if (mag > best) {
        best = mag;
        br = r;
        bc = c;
      }
    }
  }
  std::complex<double> phase{1.0, 0.0};
  if (std::abs(ub.at(br, bc)) > 0.0 && std::abs(ua.at(br, bc)) > 0.0) {
    phase = ua.at(br, bc) / ub.at(br, bc);
    phase /= std::abs(phase);
  }

  double deviation = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      double d = std::abs(ua.at(r, c) - phase * ub.at(r, c));
      if (d > deviation) deviation = d;
    }
  }
  return EquivalenceResult{deviation <= tolerance, deviation};
}

LocalOptimalityReport check_local_optimality(const Oracle& oracle,
                                             std::uint32_t num_qubits,
                                             std::span<const Gate> gates,
                                             std::size_t omega,
                                             unsigned threads) {
  if (gates.empty()) {
    throw std::invalid_argument("check_local_optimality needs a nonempty circuit");
  }
  if (omega == 0) {
    throw std::invalid_argument("omega must be at least 1");
  }
  const std::size_t n = gates.size();
  LocalOptimalityReport report;
  report.windows_checked = n;

  std::vector<std::vector<OptimalityViolation>> found(
      threads > 1 ? (n + 255) / 256 : 1);

  auto scan = [&](std::size_t begin, std::size_t end, std::vector<OptimalityViolation>& out) {
    for (std::size_t start = begin; start < end; ++start) {
      std::size_t len = omega < n - start ? omega : n - start;
      std::span<const Gate> window = gates.subspan(start, len);
      std::vector<Gate> reduced = oracle.optimize_segment(num_qubits, window);
      if (reduced.size() < len) {
        out.push_back(OptimalityViolation{start, len, reduced.size()});
      }
    }
  };

  if (threads <= 1) {
    scan(0, n, found[0]);
    report.violations = std::move(found[0]);
    return report;
  }

  parallel_for(threads, n, 256, [&](std::size_t begin, std::size_t end) {
    scan(begin, end, found[begin / 256]);
  });
  for (auto& chunk : found) {
    report.violations.insert(report.violations.end(), chunk.begin(), chunk.end());
  }
  return report;
}

double unitarity_deviation(const Unitary& u) {
  const std::size_t dim = u.dim();
  double worst = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      std::complex<double> dot{0.0, 0.0};
      for (std::size_t k = 0; k < dim; ++k) {
        dot += u.at(r, k) * std::conj(u.at(c, k));
      }
      if (r == c) dot -= 1.0;
      double mag = std::abs(dot);
      if (mag > worst) worst = mag;
    }
  }
  return worst;
}

}  // namespace popqc
