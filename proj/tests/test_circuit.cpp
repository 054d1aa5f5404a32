#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "popqc/circuit.hpp"
#include "popqc/synthetic.hpp"
#include "reference.hpp"

using namespace popqc;
using popqc::testing::ScanCircuit;

namespace {

// The worked example: h q0, x q2, cx q1 q2, x q2, h q1. Removing the two
// X gates leaves 3 gates.
std::vector<Gate> five_gate_circuit() {
  return {Gate::h(0), Gate::x(2), Gate::cnot(1, 2), Gate::x(2), Gate::h(1)};
}

}  // namespace

TEST_CASE("create populates weights") {
  Circuit c(five_gate_circuit(), 3);
  CHECK(c.size() == 5);
  CHECK(c.slot_count() == 5);
  CHECK(c.audit());

  SUBCASE("single gate circuit") {
    std::vector<Gate> one{Gate::h(0)};
    Circuit c1(one, 1);
    CHECK(c1.size() == 1);
    CHECK(c1.before(0) == 0);
    CHECK(c1.before(1) == 1);
    CHECK(c1.audit());
  }

  SUBCASE("large random circuit has all-ones leaves") {
    Rng rng(11);
    std::vector<Gate> gates = random_gates(rng, 8, 10000);
    Circuit big(gates, 8);
    CHECK(big.size() == 10000);
    for (std::size_t i = 0; i < 10000; ++i) {
      CHECK(!big.is_tombstone(i));
    }
    CHECK(big.audit());
  }

  SUBCASE("empty gate list is rejected") {
    std::vector<Gate> none;
    CHECK_THROWS_AS(Circuit(none, 1), std::invalid_argument);
  }
}

TEST_CASE("before counts live gates left of a slot") {
  Circuit c(five_gate_circuit(), 3);
  // Tombstone the two X gates (slots 1 and 3), as in the worked example.
  c.substitute(std::vector<SlotUpdate>{{1, std::nullopt}, {3, std::nullopt}});
  CHECK(c.size() == 3);
  CHECK(c.audit());

  // Two live gates precede the CNOT at slot 2 before removal; after
  // removal only one (h q0) does.
  Circuit fresh(five_gate_circuit(), 3);
  CHECK(fresh.before(2) == 2);
  CHECK(c.before(2) == 1);
  CHECK(c.before(0) == 0);
  CHECK(c.before(5) == 3);
  CHECK_THROWS_AS(c.before(6), std::out_of_range);
}

TEST_CASE("get and index_of skip tombstones") {
  Circuit c(five_gate_circuit(), 3);
  c.substitute(std::vector<SlotUpdate>{{1, std::nullopt}, {3, std::nullopt}});
  CHECK(c.get(0) == Gate::h(0));
  CHECK(c.get(1) == Gate::cnot(1, 2));
  CHECK(c.get(2) == Gate::h(1));
  CHECK(c.index_of(1) == 2);
  CHECK(c.before(c.index_of(1)) == 1);
  CHECK_THROWS_AS(c.get(3), std::out_of_range);
  CHECK_THROWS_AS(c.index_of(3), std::out_of_range);

  SUBCASE("no tombstones means rank equals slot") {
    Circuit fresh(five_gate_circuit(), 3);
    for (std::size_t r = 0; r < 5; ++r) {
      CHECK(fresh.index_of(r) == r);
      CHECK(fresh.get(r) == five_gate_circuit()[r]);
    }
  }
}

TEST_CASE("substitute rejects bad batches") {
  Circuit c(five_gate_circuit(), 3);
  CHECK_THROWS_AS(
      c.substitute(std::vector<SlotUpdate>{{5, std::nullopt}}),
      std::out_of_range);
  CHECK_THROWS_AS(
      c.substitute(std::vector<SlotUpdate>{{1, std::nullopt}, {1, Gate::h(0)}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      c.substitute(std::vector<SlotUpdate>{{0, Gate::h(7)}}),
      std::invalid_argument);
  // Failed batches left the circuit untouched.
  CHECK(c.size() == 5);
  CHECK(c.audit());

  SUBCASE("empty batch is a no-op") {
    c.substitute(std::vector<SlotUpdate>{});
    CHECK(c.size() == 5);
    CHECK(c.gates() == five_gate_circuit());
  }
}

TEST_CASE("extract_segment clamps at both ends") {
  Rng rng(5);
  std::vector<Gate> gates = random_gates(rng, 4, 8);
  Circuit c(gates, 4);

  Segment mid = c.extract_segment(2, 2);
  CHECK(mid.start_rank == 0);
  REQUIRE(mid.gates.size() == 4);  // ranks [0, 4)
  for (int i = 0; i < 4; ++i) CHECK(mid.gates[i] == gates[i]);

  Segment left = c.extract_segment(0, 2);
  CHECK(left.start_rank == 0);
  CHECK(left.gates.size() == 2);  // ranks [0, 2)

  Segment right = c.extract_segment(8, 2);
  CHECK(right.start_rank == 6);
  CHECK(right.gates.size() == 2);  // ranks [6, 8)
}

TEST_CASE("randomized operations agree with the scan reference") {
  Rng rng(0xC1FC);
  const std::uint32_t qubits = 6;
  const std::size_t slots = 300;
  std::vector<Gate> gates = random_gates(rng, qubits, slots);
  Circuit c(gates, qubits);
  ScanCircuit ref(gates, qubits);

  std::size_t ops = 0;
  for (int batch = 0; batch < 1000; ++batch) {
    // Random substitute batch over distinct slots.
    std::size_t k = 1 + rng.below(8);
    std::vector<SlotUpdate> updates;
    std::vector<bool> used(slots, false);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t slot = rng.below(slots);
      if (used[slot]) continue;
      used[slot] = true;
      if (rng.below(2) == 0) {
        updates.push_back({slot, std::nullopt});
      } else {
        updates.push_back({slot, random_gate(rng, qubits)});
      }
    }
    c.substitute(updates);
    ref.substitute(updates);
    REQUIRE(c.audit());
    REQUIRE(c.size() == ref.size());

    for (std::size_t slot = 0; slot <= slots; ++slot, ++ops) {
      REQUIRE(c.before(slot) == ref.before(slot));
    }
    std::size_t live = ref.size();
    for (std::size_t r = 0; r < live; ++r, ++ops) {
      REQUIRE(c.index_of(r) == ref.index_of(r));
      REQUIRE(c.get(r) == ref.get(r));
      REQUIRE(c.before(c.index_of(r)) == r);
    }
    if (live > 0) {
      std::size_t center = rng.below(live + 1);
      std::size_t radius = 1 + rng.below(6);
      Segment seg = c.extract_segment(center, radius);
      REQUIRE(seg.gates == ref.window(center, radius));
      ++ops;
    }
    REQUIRE(c.gates() == ref.gates());
  }
  CHECK(ops > 100000);  // the equivalence sweep really did cover 1e5+ queries
}

TEST_CASE("bulk substitute matches the serial path-walk version") {
  Rng rng(0xB17);
  const std::uint32_t qubits = 5;
  const std::size_t slots = 9000;
  std::vector<Gate> gates = random_gates(rng, qubits, slots);
  Circuit serial(gates, qubits);
  Circuit bulk(gates, qubits);

  for (int round = 0; round < 6; ++round) {
    // Large sorted batch, the shape the optimizer produces.
    std::vector<SlotUpdate> updates;
    for (std::size_t slot = rng.below(3); slot < slots; slot += 1 + rng.below(3)) {
      if (rng.below(2) == 0) {
        updates.push_back({slot, std::nullopt});
      } else {
        updates.push_back({slot, random_gate(rng, qubits)});
      }
    }
    REQUIRE(updates.size() >= 2048);
    serial.substitute(updates, 1);
    bulk.substitute(updates, 4);
    REQUIRE(bulk.audit());
    REQUIRE(bulk.size() == serial.size());
    REQUIRE(bulk.gates() == serial.gates());
    for (std::size_t slot = 0; slot <= slots; slot += 97) {
      REQUIRE(bulk.before(slot) == serial.before(slot));
    }
  }
}

TEST_CASE("index_of is strictly increasing and inverts before") {
  Rng rng(99);
  std::vector<Gate> gates = random_gates(rng, 5, 128);
  Circuit c(gates, 5);
  std::vector<SlotUpdate> kill;
  for (std::size_t i = 0; i < 128; i += 3) kill.push_back({i, std::nullopt});
  c.substitute(kill);

  std::size_t prev = 0;
  for (std::size_t r = 0; r < c.size(); ++r) {
    std::size_t slot = c.index_of(r);
    if (r > 0) CHECK(slot > prev);
    prev = slot;
    CHECK(c.before(slot) == r);
  }
}
