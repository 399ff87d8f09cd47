#include <catch2/catch_amalgamated.hpp>

#include "steaneft/circuit.hpp"

using namespace steaneft;

namespace {

ScheduledCircuit two_qubit(std::vector<Layer> layers) {
  ScheduledCircuit c;
  c.n_qubits = 2;
  for (auto& l : layers) c.add_layer(std::move(l));
  return c;
}

}  // namespace

TEST_CASE("validate enforces scheduling invariants") {
  SECTION("idle live qubit without wait") {
    auto c = two_qubit({{prep_z(0), prep_z(1)}, {wait(0)}});
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  }
  SECTION("prep on a live qubit") {
    auto c = two_qubit({{prep_z(0)}, {prep_z(0)}});
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  }
  SECTION("measurement on a dead qubit") {
    auto c = two_qubit({{meas_z(0)}});
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  }
  SECTION("gate on a dead qubit") {
    auto c = two_qubit({{prep_z(0)}, {cnot(0, 1)}});
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  }
  SECTION("qubit used twice in one layer") {
    auto c = two_qubit({{prep_z(0), wait(0)}});
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  }
  SECTION("cnot with equal endpoints") {
    auto c = two_qubit({{prep_z(0), prep_z(1)}, {cnot(0, 0), wait(1)}});
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  }
  SECTION("well-formed circuit returns final live mask") {
    auto c = two_qubit({{prep_z(0), prep_z(1)}, {cnot(0, 1)}, {meas_z(1), wait(0)}});
    CHECK(c.validate() == 0b01u);
  }
}

TEST_CASE("cnot frame propagation moves x forward and z backward") {
  auto c = two_qubit(
      {{prep_z(0), prep_z(1)}, {wait(0), wait(1)}, {cnot(0, 1)}, {meas_z(0), meas_z(1)}});
  c.validate();

  // X on the control before the cnot copies onto the target.
  PropagationResult r = propagate(c, {FaultEvent{1, 0, 1}});
  CHECK(r.record.flip_at(3, 0) == 1);
  CHECK(r.record.flip_at(3, 1) == 1);

  // Z on the target before the cnot copies onto the control; MeasZ never
  // sees pure Z.
  r = propagate(c, {FaultEvent{1, 1, 2}});
  CHECK(r.record.all_clear());
  CHECK(((r.frame.z_bits >> 0) & 1) == 1);
  CHECK(((r.frame.z_bits >> 1) & 1) == 1);
}

TEST_CASE("cnot fault codes address control and target halves") {
  auto c = two_qubit({{prep_z(0), prep_z(1)}, {cnot(0, 1)}, {meas_z(0), meas_z(1)}});
  c.validate();
  // Fault acts after the gate: X on the target only (code bit 2).
  PropagationResult r = propagate(c, {FaultEvent{1, 0, 0b0100}});
  CHECK(r.record.flip_at(2, 0) == 0);
  CHECK(r.record.flip_at(2, 1) == 1);
  // X on control after the cnot does not reach the target.
  r = propagate(c, {FaultEvent{1, 0, 0b0001}});
  CHECK(r.record.flip_at(2, 0) == 1);
  CHECK(r.record.flip_at(2, 1) == 0);
}

TEST_CASE("preps clear the frame and fault to the orthogonal state") {
  ScheduledCircuit c;
  c.n_qubits = 1;
  c.add_layer({prep_z(0)});
  c.add_layer({wait(0)});
  c.add_layer({meas_z(0)});
  c.add_layer({prep_x(0)});
  c.add_layer({meas_x(0)});
  c.validate();

  // A y hit during the wait flips the first readout; the fresh prep wipes it.
  PropagationResult r = propagate(c, {FaultEvent{1, 0, 3}});
  CHECK(r.record.flip_at(2, 0) == 1);
  CHECK(r.record.flip_at(4, 0) == 0);

  // Prep fault = orthogonal state: X on |0>, Z on |+>.
  r = propagate(c, {FaultEvent{0, 0, 1}});
  CHECK(r.record.flip_at(2, 0) == 1);
  r = propagate(c, {FaultEvent{3, 0, 1}});
  CHECK(r.record.flip_at(4, 0) == 1);
}

TEST_CASE("measurement faults flip outcomes without touching the frame") {
  ScheduledCircuit c;
  c.n_qubits = 1;
  c.add_layer({prep_z(0)});
  c.add_layer({meas_z(0)});
  c.validate();
  PropagationResult r = propagate(c, {FaultEvent{1, 0, 1}});
  CHECK(r.record.flip_at(1, 0) == 1);
  CHECK(r.frame.is_identity());
}

TEST_CASE("measurement record lookups") {
  ScheduledCircuit c;
  c.n_qubits = 2;
  c.add_layer({prep_z(0), prep_z(1)});
  c.add_layer({meas_z(0), meas_z(1)});
  c.validate();
  PropagationResult r = propagate(c, {});
  CHECK(r.record.entries.size() == 2);
  CHECK(r.record.all_clear());
  CHECK_THROWS_AS(r.record.flip_at(0, 0), ContractViolation);
}

TEST_CASE("fault location enumeration is layer-major and complete") {
  auto c = two_qubit({{prep_z(0), prep_z(1)}, {cnot(0, 1)}, {meas_z(0), meas_z(1)}});
  c.validate();
  auto locs = enumerate_fault_locations(c);
  REQUIRE(locs.size() == 5);
  CHECK(locs[0].kind == GateKind::PrepZ);
  CHECK(locs[2].kind == GateKind::Cnot);
  CHECK(locs[2].layer == 1);
  CHECK(locs[4].kind == GateKind::MeasZ);
}

TEST_CASE("two-qubit pauli codes enumerate all non-identity pairs") {
  bool seen[16] = {};
  for (int i = 1; i <= 15; ++i) {
    uint8_t code = two_qubit_pauli_code(i);
    REQUIRE(code >= 1);
    REQUIRE(code <= 15);
    seen[code] = true;
  }
  for (int c = 1; c < 16; ++c) CHECK(seen[c]);
}
