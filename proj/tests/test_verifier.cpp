#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "popqc/synthetic.hpp"
#include "popqc/verifier.hpp"

using namespace popqc;

TEST_CASE("empty circuit is the identity") {
  Unitary u = circuit_unitary(2, std::vector<Gate>{});
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(u.at(r, c) == std::complex<double>(r == c ? 1.0 : 0.0, 0.0));
    }
  }
}

TEST_CASE("hadamard matrix on one qubit") {
  Unitary u = circuit_unitary(1, std::vector<Gate>{Gate::h(0)});
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(u.at(0, 0).real() == doctest::Approx(s));
  CHECK(u.at(0, 1).real() == doctest::Approx(s));
  CHECK(u.at(1, 0).real() == doctest::Approx(s));
  CHECK(u.at(1, 1).real() == doctest::Approx(-s));
}

TEST_CASE("cnot is self-inverse") {
  std::vector<Gate> gates{Gate::cnot(0, 1), Gate::cnot(0, 1)};
  Unitary u = circuit_unitary(2, gates);
  double dev = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      dev = std::max(dev, std::abs(u.at(r, c) - std::complex<double>(r == c ? 1.0 : 0.0)));
    }
  }
  CHECK(dev < 1e-12);
}

TEST_CASE("cnot truth table") {
  // Control is qubit 0 (most significant index bit).
  Unitary u = circuit_unitary(2, std::vector<Gate>{Gate::cnot(0, 1)});
  // |10> -> |11>: column 2 has its 1 at row 3.
  CHECK(std::abs(u.at(3, 2) - std::complex<double>(1.0)) < 1e-15);
  CHECK(std::abs(u.at(2, 3) - std::complex<double>(1.0)) < 1e-15);
  CHECK(std::abs(u.at(0, 0) - std::complex<double>(1.0)) < 1e-15);
  CHECK(std::abs(u.at(1, 1) - std::complex<double>(1.0)) < 1e-15);
}

TEST_CASE("every gate matrix is unitary") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    Gate g = random_gate(rng, 3);
    Unitary u = Unitary::identity(3);
    u.apply(g);
    CHECK(unitarity_deviation(u) < 1e-12);
  }
}

TEST_CASE("rz composes additively") {
  std::vector<Gate> two{Gate::rz(0, 0.7), Gate::rz(0, 1.1)};
  std::vector<Gate> one{Gate::rz(0, 1.8)};
  EquivalenceResult r = check_equivalence(1, two, one, 1e-12);
  CHECK(r.equivalent);
}

TEST_CASE("equivalence is reflexive with zero deviation") {
  Rng rng(7);
  std::vector<Gate> gates = random_gates(rng, 4, 60);
  EquivalenceResult r = check_equivalence(4, gates, gates);
  CHECK(r.equivalent);
  CHECK(r.deviation == 0.0);
}

TEST_CASE("x pair equals empty circuit") {
  std::vector<Gate> a{Gate::x(0), Gate::x(0)};
  std::vector<Gate> b;
  EquivalenceResult r = check_equivalence(1, a, b);
  CHECK(r.equivalent);
}

TEST_CASE("equivalence detects a dropped gate") {
  Rng rng(12);
  std::vector<Gate> a = random_gates(rng, 3, 40);
  std::vector<Gate> b(a.begin(), a.end() - 1);
  // Dropping the last gate changes the unitary unless that gate was an
  // RZ with a tiny angle; the generator draws angles uniformly so this is
  // astronomically unlikely.
  EquivalenceResult r = check_equivalence(3, a, b);
  CHECK(!r.equivalent);
}

TEST_CASE("equivalence is symmetric") {
  Rng rng(0x515);
  BuiltinOracle oracle;
  for (int i = 0; i < 20; ++i) {
    std::vector<Gate> a = random_gates(rng, 3, 25);
    // Alternate between unrelated pairs and equivalent pairs.
    std::vector<Gate> b =
        i % 2 == 0 ? random_gates(rng, 3, 25) : oracle.optimize_segment(3, a);
    EquivalenceResult ab = check_equivalence(3, a, b);
    EquivalenceResult ba = check_equivalence(3, b, a);
    CHECK(ab.equivalent == ba.equivalent);
    double scale = std::max(ab.deviation, ba.deviation);
    CHECK(std::abs(ab.deviation - ba.deviation) <= 1e-12 + 1e-6 * scale);
  }
}

TEST_CASE("equivalence is invariant under appending the same gate") {
  Rng rng(21);
  std::vector<Gate> a = random_gates(rng, 3, 30);
  std::vector<Gate> b = a;
  // A global phase on one side must not matter: rz contributes a phase on
  // matched entries only, so instead apply an identical suffix to both.
  Gate suffix = random_gate(rng, 3);
  a.push_back(suffix);
  b.push_back(suffix);
  EquivalenceResult r = check_equivalence(3, a, b);
  CHECK(r.equivalent);
}

TEST_CASE("qubit cap is enforced") {
  std::vector<Gate> gates{Gate::h(0)};
  CHECK_THROWS_AS(circuit_unitary(13, gates), std::invalid_argument);
  CHECK_THROWS_AS(check_equivalence(13, gates, gates), std::invalid_argument);
  CHECK_NOTHROW(circuit_unitary(13, gates, 13));
}

TEST_CASE("global phase is factored out") {
  // rz(theta) vs the same rotation written as a fused pair differs by no
  // phase; instead compare rz against itself shifted by a full turn.
  std::vector<Gate> a{Gate::rz(0, 1.25)};
  std::vector<Gate> b{Gate::rz(0, 1.25 + 2 * std::numbers::pi)};
  EquivalenceResult r = check_equivalence(1, a, b, 1e-9);
  CHECK(r.equivalent);
}

TEST_CASE("local-optimality scan: single gate, omega = 1") {
  BuiltinOracle oracle;
  std::vector<Gate> one{Gate::h(0)};
  LocalOptimalityReport report = check_local_optimality(oracle, 1, one, 1);
  CHECK(report.windows_checked == 1);
  CHECK(report.locally_optimal());

  std::vector<Gate> zero_rz{Gate::rz(0, 0.0)};
  report = check_local_optimality(oracle, 1, zero_rz, 1);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].start_rank == 0);
  CHECK(report.violations[0].reduced_to == 0);
}

TEST_CASE("local-optimality scan flags a window-straddling pair") {
  BuiltinOracle oracle;
  // The H pair sits at positions 3 and 4; only windows covering both see it.
  std::vector<Gate> gates{Gate::x(1),    Gate::rz(2, 1.0), Gate::cnot(1, 2),
                          Gate::h(0),    Gate::h(0),       Gate::x(2),
                          Gate::rz(1, 2.0)};
  LocalOptimalityReport report = check_local_optimality(oracle, 3, gates, 3);
  CHECK(!report.locally_optimal());
  bool covers_pair = false;
  for (const auto& v : report.violations) {
    if (v.start_rank <= 3 && v.start_rank + v.window_length > 4) covers_pair = true;
  }
  CHECK(covers_pair);

  SUBCASE("parallel scan finds the same violations") {
    LocalOptimalityReport par = check_local_optimality(oracle, 3, gates, 3, 4);
    REQUIRE(par.violations.size() == report.violations.size());
    for (std::size_t i = 0; i < par.violations.size(); ++i) {
      CHECK(par.violations[i].start_rank == report.violations[i].start_rank);
      CHECK(par.violations[i].window_length == report.violations[i].window_length);
    }
  }
}
