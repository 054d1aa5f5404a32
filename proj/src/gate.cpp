#include "popqc/gate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace popqc {

double normalize_angle(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("gate angle must be finite");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double reduced = std::fmod(radians, two_pi);
  if (reduced < 0.0) {
    reduced += two_pi;
  }
  // Adding two_pi to a tiny negative remainder can round up to two_pi
  // itself, which is outside the canonical range.
  if (reduced >= two_pi) {
    reduced = 0.0;
  }
  if (reduced == 0.0) {
    reduced = 0.0;  // fold -0.0 into +0.0
  }
  return reduced;
}

Gate Gate::cnot(std::uint32_t control, std::uint32_t target) {
  if (control == target) {
    throw std::invalid_argument("cnot control and target must differ");
  }
  return Gate{GateKind::Cnot, control, target, 0.0};
}

Gate Gate::rz(std::uint32_t q, double radians) {
  return Gate{GateKind::Rz, q, 0, normalize_angle(radians)};
}

bool Gate::disjoint_from(const Gate& other) const {
  if (acts_on(other.q0)) return false;
  if (other.kind == GateKind::Cnot && acts_on(other.q1)) return false;
  return true;
}

const char* gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Cnot: return "cx";
    case GateKind::Rz: return "rz";
  }
  return "?";
}

std::string Gate::to_string() const {
  char buf[64];
  switch (kind) {
    case GateKind::Cnot:
      std::snprintf(buf, sizeof(buf), "cx(%u,%u)", q0, q1);
      break;
    case GateKind::Rz:
      std::snprintf(buf, sizeof(buf), "rz(%.17g)@%u", angle, q0);
      break;
    default:
      std::snprintf(buf, sizeof(buf), "%s@%u", gate_kind_name(kind), q0);
  }
  return buf;
}

}  // namespace popqc
