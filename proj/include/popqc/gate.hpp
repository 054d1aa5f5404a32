#pragma once

#include <cstdint>
#include <string>

namespace popqc {

enum class GateKind : std::uint8_t { H, X, Cnot, Rz };

/// Reduce an angle into the canonical range [0, 2*pi).
double normalize_angle(double radians);

/// One quantum gate over the {H, X, CNOT, RZ} gate set.
///
/// `q0` is the acted-on qubit for single-qubit gates and the control for
/// CNOT; `q1` is the CNOT target. RZ stores its rotation in `angle`,
/// always normalized into [0, 2*pi) so that equal gates compare equal
/// bit-for-bit.
struct Gate {
  GateKind kind{GateKind::H};
  std::uint32_t q0{0};
  std::uint32_t q1{0};
  double angle{0.0};

  static Gate h(std::uint32_t q) { return Gate{GateKind::H, q, 0, 0.0}; }
  static Gate x(std::uint32_t q) { return Gate{GateKind::X, q, 0, 0.0}; }
  static Gate cnot(std::uint32_t control, std::uint32_t target);
  static Gate rz(std::uint32_t q, double radians);

  bool is_single_qubit() const { return kind != GateKind::Cnot; }

  /// True if the two gates act on disjoint qubit sets.
  bool disjoint_from(const Gate& other) const;

  /// True if `q` is one of this gate's operands.
  bool acts_on(std::uint32_t q) const {
    return q0 == q || (kind == GateKind::Cnot && q1 == q);
  }

  std::uint32_t max_qubit() const {
    return kind == GateKind::Cnot ? (q0 > q1 ? q0 : q1) : q0;
  }

  bool operator==(const Gate& other) const {
    return kind == other.kind && q0 == other.q0 && q1 == other.q1 &&
           angle == other.angle;
  }

  std::string to_string() const;
};

const char* gate_kind_name(GateKind kind);

}  // namespace popqc
