#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "steaneft/pauli.hpp"

namespace steaneft {

enum class GateKind : uint8_t { PrepZ, PrepX, MeasZ, MeasX, Cnot, Wait };

inline const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::PrepZ: return "PrepZ";
    case GateKind::PrepX: return "PrepX";
    case GateKind::MeasZ: return "MeasZ";
    case GateKind::MeasX: return "MeasX";
    case GateKind::Cnot: return "Cnot";
    case GateKind::Wait: return "Wait";
  }
  return "?";
}

// One elementary operation. Cnot uses q0 = control, q1 = target; all other
// kinds act on q0 alone.
struct GateOp {
  GateKind kind;
  uint8_t q0 = 0;
  uint8_t q1 = 0;
};

inline GateOp cnot(int control, int target) {
  return GateOp{GateKind::Cnot, static_cast<uint8_t>(control), static_cast<uint8_t>(target)};
}
inline GateOp prep_z(int q) { return GateOp{GateKind::PrepZ, static_cast<uint8_t>(q), 0}; }
inline GateOp prep_x(int q) { return GateOp{GateKind::PrepX, static_cast<uint8_t>(q), 0}; }
inline GateOp meas_z(int q) { return GateOp{GateKind::MeasZ, static_cast<uint8_t>(q), 0}; }
inline GateOp meas_x(int q) { return GateOp{GateKind::MeasX, static_cast<uint8_t>(q), 0}; }
inline GateOp wait(int q) { return GateOp{GateKind::Wait, static_cast<uint8_t>(q), 0}; }

using Layer = std::vector<GateOp>;

// A layered circuit over a fixed qubit index space. Within a layer every
// live qubit appears in exactly one op; idleness is an explicit Wait so
// that it is a fault location like any other.
struct ScheduledCircuit {
  int n_qubits = 0;
  uint64_t initially_live = 0;
  std::vector<Layer> layers;

  void add_layer(Layer ops) {
    // Canonical in-layer order: by lowest touched qubit.
    std::sort(ops.begin(), ops.end(), [](const GateOp& a, const GateOp& b) {
      int qa = a.kind == GateKind::Cnot ? std::min(a.q0, a.q1) : a.q0;
      int qb = b.kind == GateKind::Cnot ? std::min(b.q0, b.q1) : b.q0;
      return qa < qb;
    });
    layers.push_back(std::move(ops));
  }

  uint64_t qubit_mask() const {
    uint64_t m = initially_live;
    for (const auto& layer : layers)
      for (const auto& op : layer) {
        m |= 1ull << op.q0;
        if (op.kind == GateKind::Cnot) m |= 1ull << op.q1;
      }
    return m;
  }

  int count_kind(GateKind k) const {
    int n = 0;
    for (const auto& layer : layers)
      for (const auto& op : layer)
        if (op.kind == k) ++n;
    return n;
  }

  // Checks the scheduling invariants; throws ContractViolation on failure.
  // Returns the live mask after the final layer.
  uint64_t validate() const {
    if (n_qubits < 0 || n_qubits > 64) throw ContractViolation("circuit qubit count out of range");
    uint64_t live = initially_live;
    for (size_t li = 0; li < layers.size(); ++li) {
      uint64_t touched = 0;
      uint64_t next_live = live;
      for (const auto& op : layers[li]) {
        uint64_t bits = 1ull << op.q0;
        if (op.kind == GateKind::Cnot) {
          if (op.q0 == op.q1) throw ContractViolation("cnot with equal control and target");
          bits |= 1ull << op.q1;
        }
        if (op.q0 >= n_qubits || (op.kind == GateKind::Cnot && op.q1 >= n_qubits))
          throw ContractViolation("gate touches qubit outside circuit");
        if (touched & bits) throw ContractViolation("qubit appears twice in one layer");
        touched |= bits;
        switch (op.kind) {
          case GateKind::PrepZ:
          case GateKind::PrepX:
            if (live & bits) throw ContractViolation("prep on a live qubit");
            next_live |= bits;
            break;
          case GateKind::MeasZ:
          case GateKind::MeasX:
            if (!(live & bits)) throw ContractViolation("measurement on a dead qubit");
            next_live &= ~bits;
            break;
          case GateKind::Cnot:
          case GateKind::Wait:
            if ((live & bits) != bits) throw ContractViolation("gate on a dead qubit");
            break;
        }
      }
      if ((live & ~touched) != 0) throw ContractViolation("live qubit idle without explicit Wait");
      live = next_live;
    }
    return live;
  }
};

// Two-qubit Pauli code for CNOT faults: bit0/bit1 = X/Z on the control,
// bit2/bit3 = X/Z on the target. Codes 1..15 are the non-identity pairs.
// Single-qubit fault codes reuse bit0/bit1. Measurement faults use code 1
// meaning "flip the reported value"; prep faults use code 1 meaning "the
// orthogonal state was prepared".
struct FaultEvent {
  int layer = 0;
  int gate = 0;  // index into layers[layer]
  uint8_t pauli = 0;
};

// Canonical enumeration order of two-qubit Pauli codes: (control, target)
// pairs in I,X,Y,Z base-4 order with identity skipped.
inline uint8_t two_qubit_pauli_code(int index1to15) {
  static constexpr uint8_t comp_bits[4] = {0, 1, 3, 2};  // I X Y Z -> xz bits
  int a = index1to15 / 4, b = index1to15 % 4;
  return static_cast<uint8_t>(comp_bits[a] | (comp_bits[b] << 2));
}

// A place where the error model may act, addressed structurally.
struct FaultLoc {
  int layer = 0;
  int gate = 0;
  GateKind kind = GateKind::Wait;
  uint8_t q0 = 0;
  uint8_t q1 = 0;
};

inline std::vector<FaultLoc> enumerate_fault_locations(const ScheduledCircuit& c) {
  std::vector<FaultLoc> locs;
  for (size_t li = 0; li < c.layers.size(); ++li)
    for (size_t gi = 0; gi < c.layers[li].size(); ++gi) {
      const GateOp& op = c.layers[li][gi];
      locs.push_back(FaultLoc{static_cast<int>(li), static_cast<int>(gi), op.kind, op.q0, op.q1});
    }
  return locs;
}

// Flip bits of the measurements in a circuit, relative to the ideal
// (noiseless) outcomes, keyed by (layer, qubit).
struct MeasurementRecord {
  struct Entry {
    int layer;
    int qubit;
    int flip;
  };
  std::vector<Entry> entries;  // circuit scan order
  // Set when a segment was skipped as provably flip-free; entries is empty
  // but every would-be measurement reads as unflipped.
  bool all_zero = false;

  int flip_at(int layer, int qubit) const {
    for (const auto& e : entries)
      if (e.layer == layer && e.qubit == qubit) return e.flip;
    throw ContractViolation("no measurement at requested (layer, qubit)");
  }

  bool all_clear() const {
    for (const auto& e : entries)
      if (e.flip) return false;
    return true;
  }
};

struct PropagationResult {
  PauliFrame frame;
  MeasurementRecord record;
};

inline void apply_fault_to_frame(PauliFrame& f, const GateOp& op, uint8_t pauli) {
  switch (op.kind) {
    case GateKind::Cnot:
      f.x_bits ^= static_cast<uint64_t>(pauli & 1u) << op.q0;
      f.z_bits ^= static_cast<uint64_t>((pauli >> 1) & 1u) << op.q0;
      f.x_bits ^= static_cast<uint64_t>((pauli >> 2) & 1u) << op.q1;
      f.z_bits ^= static_cast<uint64_t>((pauli >> 3) & 1u) << op.q1;
      break;
    case GateKind::Wait:
      f.x_bits ^= static_cast<uint64_t>(pauli & 1u) << op.q0;
      f.z_bits ^= static_cast<uint64_t>((pauli >> 1) & 1u) << op.q0;
      break;
    case GateKind::PrepZ:
      f.x_bits ^= 1ull << op.q0;  // orthogonal |1> = X error on |0>
      break;
    case GateKind::PrepX:
      f.z_bits ^= 1ull << op.q0;  // orthogonal |-> = Z error on |+>
      break;
    case GateKind::MeasZ:
    case GateKind::MeasX:
      throw ContractViolation("measurement faults flip outcomes, not frames");
  }
}

// Reference frame propagation. Faults act after their gate's ideal action;
// measurement flips report x bits for MeasZ and z bits for MeasX; preps
// clear both components.
inline PropagationResult propagate(const ScheduledCircuit& c, const std::vector<FaultEvent>& faults,
                                   PauliFrame initial = PauliFrame{}) {
  PauliFrame f(c.n_qubits);
  if (initial.n_qubits != 0) {
    if (initial.n_qubits != c.n_qubits) throw ContractViolation("initial frame size mismatch");
    f = initial;
  }
  MeasurementRecord rec;
  for (size_t li = 0; li < c.layers.size(); ++li) {
    for (size_t gi = 0; gi < c.layers[li].size(); ++gi) {
      const GateOp& op = c.layers[li][gi];
      switch (op.kind) {
        case GateKind::Cnot:
          f.x_bits ^= ((f.x_bits >> op.q0) & 1u) << op.q1;
          f.z_bits ^= ((f.z_bits >> op.q1) & 1u) << op.q0;
          break;
        case GateKind::PrepZ:
        case GateKind::PrepX:
          f.x_bits &= ~(1ull << op.q0);
          f.z_bits &= ~(1ull << op.q0);
          break;
        case GateKind::MeasZ:
          rec.entries.push_back({static_cast<int>(li), op.q0,
                                 static_cast<int>((f.x_bits >> op.q0) & 1u)});
          break;
        case GateKind::MeasX:
          rec.entries.push_back({static_cast<int>(li), op.q0,
                                 static_cast<int>((f.z_bits >> op.q0) & 1u)});
          break;
        case GateKind::Wait:
          break;
      }
      for (const auto& fe : faults) {
        if (fe.layer == static_cast<int>(li) && fe.gate == static_cast<int>(gi)) {
          if (fe.pauli == 0) throw ContractViolation("identity fault event");
          if (op.kind == GateKind::MeasZ || op.kind == GateKind::MeasX)
            rec.entries.back().flip ^= 1;
          else
            apply_fault_to_frame(f, op, fe.pauli);
        }
      }
    }
  }
  return PropagationResult{f, std::move(rec)};
}

// Inverse of the unitary part: reversed layer order with preps and
// measurements dropped (CNOT and Wait are self-inverse).
inline ScheduledCircuit unitary_inverse(const ScheduledCircuit& c) {
  ScheduledCircuit inv;
  inv.n_qubits = c.n_qubits;
  inv.initially_live = c.qubit_mask();
  for (auto it = c.layers.rbegin(); it != c.layers.rend(); ++it) {
    Layer l;
    uint64_t touched = 0;
    for (const auto& op : *it) {
      if (op.kind == GateKind::Cnot) {
        l.push_back(op);
        touched |= (1ull << op.q0) | (1ull << op.q1);
      } else if (op.kind == GateKind::Wait) {
        l.push_back(op);
        touched |= 1ull << op.q0;
      }
    }
    if (l.empty()) continue;
    uint64_t idle = inv.initially_live & ~touched;
    for (int q = 0; q < inv.n_qubits; ++q)
      if ((idle >> q) & 1u) l.push_back(wait(q));
    inv.add_layer(std::move(l));
  }
  return inv;
}

}  // namespace steaneft
