#pragma once

#include <cstdint>
#include <vector>

#include "steaneft/circuit.hpp"
#include "steaneft/pauli.hpp"
#include "steaneft/rng.hpp"

namespace steaneft {

// Full stabilizer-state simulator (destabilizer/stabilizer row tableau with
// phase tracking). Used as an independent check on frame propagation, so it
// shares no code with it beyond the circuit structures.
class Tableau {
 public:
  explicit Tableau(int n) : n_(n), x_(2 * static_cast<size_t>(n), 0), z_(2 * static_cast<size_t>(n), 0), r_(2 * static_cast<size_t>(n), 0) {
    if (n < 1 || n > 64) throw ContractViolation("tableau qubit count out of range");
    for (int i = 0; i < n; ++i) {
      x_[static_cast<size_t>(i)] = 1ull << i;               // destabilizer X_i
      z_[static_cast<size_t>(n + i)] = 1ull << i;           // stabilizer Z_i
    }
  }

  int n_qubits() const { return n_; }

  void h(int q) {
    uint64_t bit = 1ull << q;
    for (size_t i = 0; i < x_.size(); ++i) {
      uint64_t xb = x_[i] & bit, zb = z_[i] & bit;
      if (xb && zb) r_[i] ^= 1;
      x_[i] ^= xb ^ zb;
      z_[i] ^= xb ^ zb;
    }
  }

  void cnot(int c, int t) {
    uint64_t cb = 1ull << c, tb = 1ull << t;
    for (size_t i = 0; i < x_.size(); ++i) {
      bool xc = x_[i] & cb, zc = z_[i] & cb, xt = x_[i] & tb, zt = z_[i] & tb;
      if (xc && zt && (xt == zc)) r_[i] ^= 1;
      if (xc) x_[i] ^= tb;
      if (zt) z_[i] ^= cb;
    }
  }

  // Conjugation by a Pauli only flips signs of anticommuting rows.
  void pauli(int q, bool px, bool pz) {
    uint64_t bit = 1ull << q;
    for (size_t i = 0; i < x_.size(); ++i) {
      bool anti = (px && (z_[i] & bit)) != (pz && (x_[i] & bit));
      if (anti) r_[i] ^= 1;
    }
  }

  bool z_deterministic(int q) const {
    uint64_t bit = 1ull << q;
    for (int i = n_; i < 2 * n_; ++i)
      if (x_[static_cast<size_t>(i)] & bit) return false;
    return true;
  }

  // random_bit is consumed only when the outcome is not determined.
  int meas_z(int q, int random_bit, bool* was_random = nullptr) {
    uint64_t bit = 1ull << q;
    int p = -1;
    for (int i = n_; i < 2 * n_; ++i)
      if (x_[static_cast<size_t>(i)] & bit) { p = i; break; }
    if (p >= 0) {
      if (was_random) *was_random = true;
      for (int i = 0; i < 2 * n_; ++i)
        if (i != p && (x_[static_cast<size_t>(i)] & bit)) rowsum(i, p);
      x_[static_cast<size_t>(p - n_)] = x_[static_cast<size_t>(p)];
      z_[static_cast<size_t>(p - n_)] = z_[static_cast<size_t>(p)];
      r_[static_cast<size_t>(p - n_)] = r_[static_cast<size_t>(p)];
      x_[static_cast<size_t>(p)] = 0;
      z_[static_cast<size_t>(p)] = bit;
      r_[static_cast<size_t>(p)] = static_cast<uint8_t>(random_bit & 1);
      return random_bit & 1;
    }
    if (was_random) *was_random = false;
    // Determined outcome: accumulate stabilizer rows indexed by destabilizers.
    uint64_t sx = 0, sz = 0;
    int phase = 0;
    for (int i = 0; i < n_; ++i)
      if (x_[static_cast<size_t>(i)] & bit) phase = accumulate(sx, sz, phase, i + n_);
    if (phase & 1) throw ContractViolation("tableau phase accumulation out of Z/2");
    return (phase >> 1) & 1;
  }

  int meas_x(int q, int random_bit, bool* was_random = nullptr) {
    h(q);
    int v = meas_z(q, random_bit, was_random);
    h(q);
    return v;
  }

  bool x_deterministic(int q) {
    h(q);
    bool det = z_deterministic(q);
    h(q);
    return det;
  }

  bool row_x_bit(int i, int q) const { return (x_[static_cast<size_t>(i)] >> q) & 1u; }
  bool row_z_bit(int i, int q) const { return (z_[static_cast<size_t>(i)] >> q) & 1u; }
  uint8_t row_sign(int i) const { return r_[static_cast<size_t>(i)]; }

  void prep_z(int q, int random_bit) {
    int outcome = meas_z(q, random_bit);
    if (outcome) pauli(q, true, false);
  }

  void prep_x(int q, int random_bit) {
    prep_z(q, random_bit);
    h(q);
  }

 private:
  // Phase exponent contribution of multiplying row-op (x1,z1) into (x2,z2).
  static int g(bool x1, bool z1, bool x2, bool z2) {
    if (!x1 && !z1) return 0;
    if (x1 && z1) return static_cast<int>(z2) - static_cast<int>(x2);
    if (x1) return z2 ? (x2 ? 1 : -1) : 0;  // row op X
    return x2 ? (z2 ? -1 : 1) : 0;          // row op Z
  }

  int accumulate(uint64_t& hx, uint64_t& hz, int phase, int i) const {
    phase += 2 * r_[static_cast<size_t>(i)];
    for (int j = 0; j < n_; ++j) {
      uint64_t bit = 1ull << j;
      phase += g(x_[static_cast<size_t>(i)] & bit, z_[static_cast<size_t>(i)] & bit, hx & bit, hz & bit);
    }
    hx ^= x_[static_cast<size_t>(i)];
    hz ^= z_[static_cast<size_t>(i)];
    return ((phase % 4) + 4) % 4;
  }

  void rowsum(int h, int i) {
    uint64_t hx = x_[static_cast<size_t>(h)], hz = z_[static_cast<size_t>(h)];
    int phase = 2 * r_[static_cast<size_t>(h)];
    phase = accumulate(hx, hz, phase, i);
    // A destabilizer may anticommute with the pivot row it absorbs; its phase
    // bit is never read back, so Hermiticity is only enforced on stabilizers.
    if (h >= n_ && (phase & 1)) throw ContractViolation("tableau phase accumulation out of Z/2");
    x_[static_cast<size_t>(h)] = hx;
    z_[static_cast<size_t>(h)] = hz;
    r_[static_cast<size_t>(h)] = static_cast<uint8_t>((phase >> 1) & 1);
  }

  int n_;
  std::vector<uint64_t> x_, z_;
  std::vector<uint8_t> r_;
};

struct TableauRun {
  std::vector<int> clean;             // per measurement, scan order
  std::vector<int> faulted;
  std::vector<bool> deterministic;
};

// Coupled clean/faulted runs of one circuit, sharing a single projection-
// randomness stream. Pauli faults never touch the x/z parts, so both tableaux
// keep identical row structure and branch at the same points; only the sign
// vectors diverge. At a nondeterministic measurement the faulted outcome is
// the shared drawn bit XOR the relative anticommutation of the accumulated
// fault with the measured operator, recovered from the sign differences
// against the (de)stabilizer rows: a Pauli F expands over the symplectic row
// basis with coefficients anticommute(F, row), so
//   anticommute(F, Z_q) = sum_i dsign(stab_i)*x_q(destab_i)
//                       + dsign(destab_i)*x_q(stab_i)   (mod 2).
inline TableauRun run_tableau(const ScheduledCircuit& c, const std::vector<FaultEvent>& faults,
                              uint64_t key) {
  Tableau tc(c.n_qubits), tf(c.n_qubits);
  TableauRun out;
  uint64_t ordinal = 0;
  auto next_bit = [&]() { return static_cast<int>(mix64(derive_key(key, ordinal++)) & 1u); };
  const int n = c.n_qubits;
  auto rel_flip_z = [&](int q) {
    int a = 0;
    for (int i = 0; i < n; ++i) {
      if (tc.row_x_bit(i, q) && (tc.row_sign(n + i) ^ tf.row_sign(n + i))) a ^= 1;
      if (tc.row_x_bit(n + i, q) && (tc.row_sign(i) ^ tf.row_sign(i))) a ^= 1;
    }
    return a;
  };
  auto rel_flip_x = [&](int q) {  // Z component of the relative fault at q
    int a = 0;
    for (int i = 0; i < n; ++i) {
      if (tc.row_z_bit(i, q) && (tc.row_sign(n + i) ^ tf.row_sign(n + i))) a ^= 1;
      if (tc.row_z_bit(n + i, q) && (tc.row_sign(i) ^ tf.row_sign(i))) a ^= 1;
    }
    return a;
  };
  struct MeasPair {
    int clean, faulted;
    bool det;
  };
  auto coupled_meas_z = [&](int q) {
    bool det = tc.z_deterministic(q);
    int a = rel_flip_z(q);
    int u = det ? 0 : next_bit();
    int vc = tc.meas_z(q, u);
    int vf = tf.meas_z(q, u ^ a);
    if (det && (vc ^ vf) != a)
      throw ContractViolation("tableau sign difference off the dual-basis expansion");
    return MeasPair{vc, vf, det};
  };
  auto coupled_prep_z = [&](int q) {
    MeasPair m = coupled_meas_z(q);
    if (m.clean) tc.pauli(q, true, false);
    if (m.faulted) tf.pauli(q, true, false);
    // The corrections cancel any relative X on q; a leftover relative Z acts
    // trivially on the fresh |0> and is dropped so preps leave no frame, the
    // same representative the reference propagation uses.
    if (rel_flip_x(q)) tf.pauli(q, false, true);
  };
  for (size_t li = 0; li < c.layers.size(); ++li) {
    for (size_t gi = 0; gi < c.layers[li].size(); ++gi) {
      const GateOp& op = c.layers[li][gi];
      uint8_t fault_code = 0;
      for (const auto& fe : faults)
        if (fe.layer == static_cast<int>(li) && fe.gate == static_cast<int>(gi)) fault_code ^= fe.pauli;
      switch (op.kind) {
        case GateKind::PrepZ:
          coupled_prep_z(op.q0);
          if (fault_code) tf.pauli(op.q0, true, false);
          break;
        case GateKind::PrepX:
          coupled_prep_z(op.q0);
          tc.h(op.q0);
          tf.h(op.q0);
          if (fault_code) tf.pauli(op.q0, false, true);
          break;
        case GateKind::MeasZ: {
          MeasPair m = coupled_meas_z(op.q0);
          out.clean.push_back(m.clean);
          out.faulted.push_back(m.faulted ^ (fault_code ? 1 : 0));
          out.deterministic.push_back(m.det);
          break;
        }
        case GateKind::MeasX: {
          tc.h(op.q0);
          tf.h(op.q0);
          MeasPair m = coupled_meas_z(op.q0);
          tc.h(op.q0);
          tf.h(op.q0);
          out.clean.push_back(m.clean);
          out.faulted.push_back(m.faulted ^ (fault_code ? 1 : 0));
          out.deterministic.push_back(m.det);
          break;
        }
        case GateKind::Cnot:
          tc.cnot(op.q0, op.q1);
          tf.cnot(op.q0, op.q1);
          if (fault_code) {
            if (fault_code & 3u) tf.pauli(op.q0, fault_code & 1u, (fault_code >> 1) & 1u);
            if ((fault_code >> 2) & 3u)
              tf.pauli(op.q1, (fault_code >> 2) & 1u, (fault_code >> 3) & 1u);
          }
          break;
        case GateKind::Wait:
          if (fault_code) tf.pauli(op.q0, fault_code & 1u, (fault_code >> 1) & 1u);
          break;
      }
    }
  }
  return out;
}

}  // namespace steaneft
