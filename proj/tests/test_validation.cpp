#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "steaneft/validation.hpp"

using namespace steaneft;

TEST_CASE("the gadget library covers every distinct shape once") {
  std::vector<NamedCircuit> lib = gadget_library();
  CHECK(lib.size() == 17);
  std::set<std::string> names;
  for (const NamedCircuit& nc : lib) {
    names.insert(nc.name);
    CHECK(nc.circuit.n_qubits == kTotalQubits);
    CHECK_FALSE(nc.circuit.layers.empty());
    CHECK_NOTHROW(nc.circuit.validate());
  }
  CHECK(names.size() == lib.size());
}

TEST_CASE("segment concatenation pads idle live qubits with waits") {
  Gadgets nonft(ProtocolKind::NonFT);
  const RoundSet& rs = nonft.rounds[0];
  ScheduledCircuit c =
      concat_segments({&rs.encode, &rs.interact_q1, &rs.measure_q1}, block7(kData));
  // First layer preps the held data block.
  CHECK(c.layers[0].size() == 7);
  for (const GateOp& op : c.layers[0]) CHECK(op.kind == GateKind::PrepZ);
  // During ancilla encoding the data block is idle, so each encoder layer
  // gains seven data waits on top of its own gates.
  size_t bare = rs.encode.circuit.layers[1].size();
  CHECK(c.layers[2].size() == bare + 7);
  int data_waits = 0;
  for (const GateOp& op : c.layers[2])
    if (op.kind == GateKind::Wait && op.q0 < 7) ++data_waits;
  CHECK(data_waits == 7);
}

TEST_CASE("random circuits respect the scheduling discipline") {
  RandomStream rs(123);
  int total_meas = 0;
  for (int i = 0; i < 25; ++i) {
    int n_q = 2 + static_cast<int>(rs.next_below(13));
    int n_l = 1 + static_cast<int>(rs.next_below(30));
    ScheduledCircuit c = make_random_circuit(rs, n_q, n_l);
    CHECK_NOTHROW(c.validate());
    total_meas += c.count_kind(GateKind::MeasZ) + c.count_kind(GateKind::MeasX);
  }
  CHECK(total_meas > 0);
}

TEST_CASE("flip comparison counts each measurement once") {
  ScheduledCircuit c;
  c.n_qubits = 2;
  c.add_layer({prep_z(0), prep_z(1)});
  c.add_layer({cnot(0, 1)});
  c.add_layer({meas_z(0), meas_z(1)});
  c.validate();
  int comparisons = 0;
  CHECK(compare_flips(c, {FaultEvent{1, 0, 0b0001}}, 9, &comparisons) == 0);
  CHECK(comparisons == 2);
}

TEST_CASE("both engines agree across the library and random circuits") {
  ValidationSummary s = run_validation(60, 20260814);
  CHECK(s.circuits == 17 + 60);
  CHECK(s.fault_sets == s.circuits * 9);
  CHECK(s.comparisons > s.fault_sets);
  CHECK(s.mismatches == 0);
}
