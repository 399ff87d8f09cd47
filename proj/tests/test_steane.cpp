#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <set>

#include "steaneft/steane.hpp"
#include "steaneft/tableau.hpp"

using namespace steaneft;

namespace {

// Locate an encoder cnot (a, b) in either direction; returns (layer, gate).
std::pair<int, int> find_cnot(const ScheduledCircuit& c, int a, int b) {
  for (size_t li = 0; li < c.layers.size(); ++li)
    for (size_t gi = 0; gi < c.layers[li].size(); ++gi) {
      const GateOp& op = c.layers[li][gi];
      if (op.kind == GateKind::Cnot &&
          ((op.q0 == a && op.q1 == b) || (op.q0 == b && op.q1 == a)))
        return {static_cast<int>(li), static_cast<int>(gi)};
    }
  throw std::runtime_error("cnot not present");
}

int parity_mask(const TableauRun& run, const std::vector<int>& order, uint8_t mask) {
  int p = 0;
  for (int q = 0; q < 7; ++q)
    if ((mask >> q) & 1) p ^= run.clean[static_cast<size_t>(order[static_cast<size_t>(q)])];
  return p;
}

}  // namespace

TEST_CASE("syndromes separate the seven single-qubit errors") {
  std::set<int> seen;
  for (int q = 0; q < 7; ++q) {
    int s = syndrome_of_mask(static_cast<uint8_t>(1u << q));
    CHECK(s != 0);
    seen.insert(s);
    CHECK(single_qubit_correction(s) == (1u << q));
  }
  CHECK(seen.size() == 7);
  CHECK(syndrome_of_mask(0) == 0);
  CHECK(single_qubit_correction(0) == 0);
}

TEST_CASE("stabilizer masks are syndrome-free and even on the logical support") {
  for (uint8_t g : kStabilizerMasks) {
    CHECK(syndrome_of_mask(g) == 0);
    CHECK_FALSE(logical_parity(g));
    CHECK(reduce_mod_stabilizers(g) == 0);
  }
}

TEST_CASE("coset reduction finds minimal-weight representatives") {
  CHECK(reduce_mod_stabilizers(0x55 ^ 0x01) == 0x01);
  CHECK(reduce_mod_stabilizers(0x7F) == reduce_mod_stabilizers(0x7F));
  CHECK(std::popcount(static_cast<unsigned>(reduce_mod_stabilizers(0x7F))) == 3);
  // Reduction never changes syndrome or logical parity.
  for (int m = 0; m < 128; ++m) {
    uint8_t r = reduce_mod_stabilizers(static_cast<uint8_t>(m));
    CHECK(syndrome_of_mask(r) == syndrome_of_mask(static_cast<uint8_t>(m)));
    CHECK(logical_parity(r) == logical_parity(static_cast<uint8_t>(m)));
  }
}

TEST_CASE("ideal decode flips only on logical cosets") {
  for (int q = 0; q < 7; ++q) CHECK_FALSE(logical_flip_after_ideal_decode(1u << q));
  CHECK_FALSE(logical_flip_after_ideal_decode(0));
  CHECK(logical_flip_after_ideal_decode(0x7F));
  for (uint8_t g : kStabilizerMasks) {
    CHECK_FALSE(logical_flip_after_ideal_decode(g));
    CHECK(logical_flip_after_ideal_decode(static_cast<uint8_t>(0x7F ^ g)));
  }
}

TEST_CASE("encoder outputs satisfy the code's parity structure") {
  // Transversal readout of the encoded state: stabilizer-support parities
  // and the logical parity are deterministic even though single bits are not.
  for (bool plus : {false, true}) {
    ScheduledCircuit c = encoder_circuit(plus);
    Layer meas;
    std::vector<int> order(7);
    for (int q = 0; q < 7; ++q) meas.push_back(plus ? meas_x(q) : meas_z(q));
    c.add_layer(std::move(meas));
    c.validate();
    // Measurement entries appear sorted by qubit within the layer.
    for (int q = 0; q < 7; ++q) order[static_cast<size_t>(q)] = q;
    for (uint64_t key : {1ull, 2ull, 3ull, 99ull}) {
      TableauRun run = run_tableau(c, {}, key);
      REQUIRE(run.clean.size() == 7);
      for (uint8_t g : kStabilizerMasks) CHECK(parity_mask(run, order, g) == 0);
      CHECK(parity_mask(run, order, 0x7F) == 0);
    }
  }
}

TEST_CASE("conjugate-basis readout of an encoded state is uniformly random") {
  ScheduledCircuit c = encode_zero_circuit();
  Layer meas;
  for (int q = 0; q < 7; ++q) meas.push_back(meas_x(q));
  c.add_layer(std::move(meas));
  c.validate();
  int ones = 0;
  for (uint64_t key = 0; key < 64; ++key) {
    TableauRun run = run_tableau(c, {}, key);
    ones += run.clean[0];
    for (uint8_t g : kStabilizerMasks) {
      int p = 0;
      for (int q = 0; q < 7; ++q)
        if ((g >> q) & 1) p ^= run.clean[static_cast<size_t>(q)];
      CHECK(p == 0);  // x-type stabilizers still fix these parities
    }
  }
  CHECK(ones > 10);
  CHECK(ones < 54);
}

TEST_CASE("x-x spread after each encoder cnot lands in the expected coset") {
  // Propagated two-qubit hits after cnot k, reduced mod the stabilizers.
  // The first three are stabilizer generators themselves.
  constexpr std::array<uint8_t, 9> expected = {0x55, 0x78, 0x66, 0x51, 0x58,
                                               0x26, 0x06, 0x18, 0x41};
  ScheduledCircuit zero = encode_zero_circuit();
  zero.validate();
  ScheduledCircuit plus = encode_plus_circuit();
  plus.validate();
  for (int k = 0; k < 9; ++k) {
    auto [a, b] = kEncoderCnots[static_cast<size_t>(k)];
    auto [lz, gz] = find_cnot(zero, a, b);
    PropagationResult r = propagate(zero, {FaultEvent{lz, gz, 0b0101}});
    CHECK(reduce_mod_stabilizers(static_cast<uint8_t>(r.frame.x_bits)) ==
          reduce_mod_stabilizers(expected[static_cast<size_t>(k)]));
    CHECK(r.frame.z_bits == 0);

    auto [lp, gp] = find_cnot(plus, a, b);
    PropagationResult rp = propagate(plus, {FaultEvent{lp, gp, 0b1010}});
    CHECK(reduce_mod_stabilizers(static_cast<uint8_t>(rp.frame.z_bits)) ==
          reduce_mod_stabilizers(expected[static_cast<size_t>(k)]));
    CHECK(rp.frame.x_bits == 0);
    if (k < 3) {
      CHECK(reduce_mod_stabilizers(static_cast<uint8_t>(r.frame.x_bits)) == 0);
      CHECK(reduce_mod_stabilizers(static_cast<uint8_t>(rp.frame.z_bits)) == 0);
    }
  }
}
