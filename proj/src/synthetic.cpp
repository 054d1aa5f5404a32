#include "popqc/synthetic.hpp"

#include <numbers>
#include <stdexcept>

namespace popqc {

Gate random_gate(Rng& rng, std::uint32_t num_qubits) {
  if (num_qubits == 0) {
    throw std::invalid_argument("random_gate needs at least one qubit");
  }
  std::uint64_t kinds = num_qubits >= 2 ? 4 : 3;
  std::uint32_t q = static_cast<std::uint32_t>(rng.below(num_qubits));
  switch (rng.below(kinds)) {
    case 0:
      return Gate::h(q);
    case 1:
      return Gate::x(q);
    case 2:
      return Gate::rz(q, rng.unit() * 2.0 * std::numbers::pi);
    default: {
      std::uint32_t t = static_cast<std::uint32_t>(rng.below(num_qubits - 1));
      if (t >= q) ++t;
      return Gate::cnot(q, t);
    }
  }
}

std::vector<Gate> random_gates(Rng& rng, std::uint32_t num_qubits,
                               std::size_t count) {
  std::vector<Gate> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_gate(rng, num_qubits));
  }
  return out;
}

namespace {

// A self-inverse gate for planting: H, X, or (given >= 2 qubits) CNOT.
Gate random_involution(Rng& rng, std::uint32_t num_qubits) {
  std::uint64_t kinds = num_qubits >= 2 ? 3 : 2;
  std::uint32_t q = static_cast<std::uint32_t>(rng.below(num_qubits));
  switch (rng.below(kinds)) {
    case 0:
      return Gate::h(q);
    case 1:
      return Gate::x(q);
    default: {
      std::uint32_t t = static_cast<std::uint32_t>(rng.below(num_qubits - 1));
      if (t >= q) ++t;
      return Gate::cnot(q, t);
    }
  }
}

// A single-qubit gate on a qubit the pair gate does not touch, so the
// planted pair stays net-adjacent. Returns false when no qubit is free.
bool random_disjoint_filler(Rng& rng, std::uint32_t num_qubits, const Gate& avoid,
                            Gate& out) {
  std::uint32_t used = avoid.kind == GateKind::Cnot ? 2 : 1;
  if (num_qubits <= used) return false;
  std::uint32_t q;
  do {
    q = static_cast<std::uint32_t>(rng.below(num_qubits));
  } while (avoid.acts_on(q));
  switch (rng.below(3)) {
    case 0:
      out = Gate::h(q);
      break;
    case 1:
      out = Gate::x(q);
      break;
    default:
      out = Gate::rz(q, rng.unit() * 2.0 * std::numbers::pi);
  }
  return true;
}

}  // namespace

std::vector<Gate> generate_synthetic(const SyntheticConfig& config) {
  if (config.num_gates == 0) {
    throw std::invalid_argument("synthetic circuit needs at least one gate");
  }
  if (config.num_qubits == 0) {
    throw std::invalid_argument("synthetic circuit needs at least one qubit");
  }
  Rng rng(config.seed);
  std::vector<Gate> out;
  out.reserve(config.num_gates + 4);
  while (out.size() < config.num_gates) {
    if (rng.unit() < config.pair_density) {
      Gate g = random_involution(rng, config.num_qubits);
      out.push_back(g);
      std::uint64_t fillers = rng.below(3);
      for (std::uint64_t i = 0; i < fillers; ++i) {
        Gate filler;
        if (random_disjoint_filler(rng, config.num_qubits, g, filler)) {
          out.push_back(filler);
        }
      }
      out.push_back(g);
    } else {
      out.push_back(random_gate(rng, config.num_qubits));
    }
  }
  out.resize(config.num_gates);
  return out;
}

}  // namespace popqc
