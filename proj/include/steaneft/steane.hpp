#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "steaneft/circuit.hpp"
#include "steaneft/pauli.hpp"

namespace steaneft {

// -------------------------------------------------------------------------
// [[7,1,3]] code data. Bit q of a mask is data qubit q (0-based); the
// conventional 1-based labels are q+1.
// -------------------------------------------------------------------------

inline constexpr int kNumDataQubits = 7;
inline constexpr uint8_t kDataMask = 0x7F;

// Parity-check supports, identical for the X and Z generator sets.
inline constexpr std::array<uint8_t, 3> kStabilizerMasks = {0x55, 0x78, 0x66};

inline int syndrome_of_mask(uint8_t mask) {
  int s = 0;
  for (int j = 0; j < 3; ++j)
    s |= static_cast<int>(parity64(mask & kStabilizerMasks[j])) << j;
  return s;
}

// Weight <= 1 representative for each syndrome value.
inline uint8_t single_qubit_correction(int syndrome) {
  static const std::array<uint8_t, 8> table = [] {
    std::array<uint8_t, 8> t{};
    for (int q = 0; q < kNumDataQubits; ++q) {
      uint8_t m = static_cast<uint8_t>(1u << q);
      t[static_cast<size_t>(syndrome_of_mask(m))] = m;
    }
    return t;
  }();
  return table[static_cast<size_t>(syndrome & 7)];
}

// Lexicographic order on sorted support lists: {0,6} precedes {1,3}.
inline bool support_lex_less(uint8_t a, uint8_t b) {
  while (a != 0 && b != 0) {
    int la = std::countr_zero(a), lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a = static_cast<uint8_t>(a & (a - 1));
    b = static_cast<uint8_t>(b & (b - 1));
  }
  return a == 0 && b != 0;
}

// Canonical coset representative mod the stabilizer group: minimal weight,
// ties broken by support_lex_less. Preserves syndrome and logical parity.
inline uint8_t reduce_mod_stabilizers(uint8_t mask) {
  uint8_t best = static_cast<uint8_t>(mask & kDataMask);
  for (int combo = 1; combo < 8; ++combo) {
    uint8_t g = 0;
    for (int j = 0; j < 3; ++j)
      if ((combo >> j) & 1) g ^= kStabilizerMasks[j];
    uint8_t cand = static_cast<uint8_t>((mask ^ g) & kDataMask);
    int wc = std::popcount(cand), wb = std::popcount(best);
    if (wc < wb || (wc == wb && support_lex_less(cand, best))) best = cand;
  }
  return best;
}

// All-ones support implements the logical operator on either component.
inline bool logical_parity(uint8_t mask) { return parity64(mask & kDataMask); }

// Ideal end-of-trial decode of one Pauli component: correct the syndrome,
// then report whether a logical operator remains.
inline bool logical_flip_after_ideal_decode(uint8_t mask) {
  uint8_t corrected = static_cast<uint8_t>(mask ^ single_qubit_correction(syndrome_of_mask(mask)));
  return logical_parity(corrected);
}

// -------------------------------------------------------------------------
// Encoders. |0_L>: |+> seeds on qubits 0,1,3, |0> elsewhere, then three
// CNOT layers; each layer leaves one qubit idle (explicit Wait). The |+_L>
// encoder is the transversal-H conjugate: seed bases swapped, CNOTs
// reversed.
// -------------------------------------------------------------------------

inline constexpr std::array<std::pair<int, int>, 9> kEncoderCnots = {{
    {0, 2}, {3, 5}, {1, 6},   // layer 1, qubit 4 idle
    {0, 4}, {3, 6}, {1, 5},   // layer 2, qubit 2 idle
    {1, 2}, {3, 4}, {0, 6},   // layer 3, qubit 5 idle
}};
inline constexpr std::array<int, 3> kEncoderIdle = {4, 2, 5};
inline constexpr uint8_t kSeedMask = 0x0B;  // qubits 0, 1, 3

inline ScheduledCircuit encoder_circuit(bool plus_basis, int base = 0, int n_qubits = kNumDataQubits) {
  ScheduledCircuit c;
  c.n_qubits = n_qubits;
  Layer prep;
  for (int q = 0; q < kNumDataQubits; ++q) {
    bool seed = (kSeedMask >> q) & 1;
    prep.push_back(seed != plus_basis ? prep_x(base + q) : prep_z(base + q));
  }
  c.add_layer(std::move(prep));
  for (int layer = 0; layer < 3; ++layer) {
    Layer l;
    for (int g = 3 * layer; g < 3 * layer + 3; ++g) {
      auto [a, b] = kEncoderCnots[static_cast<size_t>(g)];
      l.push_back(plus_basis ? cnot(base + b, base + a) : cnot(base + a, base + b));
    }
    l.push_back(wait(base + kEncoderIdle[static_cast<size_t>(layer)]));
    c.add_layer(std::move(l));
  }
  return c;
}

inline ScheduledCircuit encode_zero_circuit(int base = 0, int n_qubits = kNumDataQubits) {
  return encoder_circuit(false, base, n_qubits);
}
inline ScheduledCircuit encode_plus_circuit(int base = 0, int n_qubits = kNumDataQubits) {
  return encoder_circuit(true, base, n_qubits);
}

}  // namespace steaneft
