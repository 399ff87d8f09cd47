#pragma once

#include <string>
#include <utility>
#include <vector>

#include "steaneft/protocols.hpp"
#include "steaneft/tableau.hpp"

namespace steaneft {

// Joins segments into one standalone circuit, adding explicit waits wherever
// a live qubit would otherwise idle across segment boundaries. `prep_first`
// optionally |0>-prepares qubits (e.g. the data block) in a leading layer.
// The result is a validation vehicle only; its wait padding does not exist
// in the protocol proper.
inline ScheduledCircuit concat_segments(const std::vector<const Segment*>& segs,
                                        uint64_t prep_first = 0) {
  ScheduledCircuit c;
  c.n_qubits = kTotalQubits;
  c.initially_live = 0;
  uint64_t live = 0;
  if (prep_first) {
    Layer l;
    for (int q = 0; q < kTotalQubits; ++q)
      if ((prep_first >> q) & 1u) l.push_back(prep_z(q));
    c.add_layer(std::move(l));
    live = prep_first;
  }
  for (const Segment* s : segs)
    for (const Layer& src_layer : s->circuit.layers) {
      Layer l = src_layer;
      uint64_t touched = 0, next_live = live;
      for (const GateOp& op : src_layer) {
        uint64_t bits = 1ull << op.q0;
        if (op.kind == GateKind::Cnot) bits |= 1ull << op.q1;
        touched |= bits;
        switch (op.kind) {
          case GateKind::PrepZ:
          case GateKind::PrepX:
            next_live |= bits;
            break;
          case GateKind::MeasZ:
          case GateKind::MeasX:
            next_live &= ~bits;
            break;
          default:
            break;
        }
      }
      for (int q = 0; q < kTotalQubits; ++q)
        if (((live >> q) & 1u) && !((touched >> q) & 1u)) l.push_back(wait(q));
      c.add_layer(std::move(l));
      live = next_live;
    }
  c.validate();
  return c;
}

struct NamedCircuit {
  std::string name;
  ScheduledCircuit circuit;
};

// Every distinct gadget shape the protocols use, as standalone circuits.
inline std::vector<NamedCircuit> gadget_library() {
  std::vector<NamedCircuit> lib;
  Gadgets nonft(ProtocolKind::NonFT);
  Gadgets simple(ProtocolKind::SimpleSeries);
  Gadgets series2(ProtocolKind::TwoAncillaSeries);
  Gadgets parallel(ProtocolKind::TwoAncillaParallel);
  Gadgets decoding(ProtocolKind::Decoding);
  const uint64_t data = block7(kData);
  for (int r = 0; r < 2; ++r) {
    const char* tag = r == 0 ? "zero" : "plus";
    const RoundSet& nf = nonft.rounds[static_cast<size_t>(r)];
    const RoundSet& sm = simple.rounds[static_cast<size_t>(r)];
    const RoundSet& s2 = series2.rounds[static_cast<size_t>(r)];
    const RoundSet& pl = parallel.rounds[static_cast<size_t>(r)];
    const RoundSet& dc = decoding.rounds[static_cast<size_t>(r)];
    lib.push_back({std::string("encode-") + tag, concat_segments({&nf.encode})});
    lib.push_back({std::string("create-verify-") + tag, concat_segments({&sm.create_verify})});
    lib.push_back(
        {std::string("create-verify-pair-") + tag, concat_segments({&pl.create_verify_both})});
    lib.push_back({std::string("nonft-round-") + tag,
                   concat_segments({&nf.encode, &nf.interact_q1, &nf.measure_q1}, data)});
    lib.push_back(
        {std::string("simple-series-round-") + tag,
         concat_segments({&sm.create_verify, &sm.interact_q1, &sm.measure_q1}, data)});
    lib.push_back({std::string("two-ancilla-round-") + tag,
                   concat_segments(
                       {&s2.create_verify, &s2.ancilla_wait, &s2.interact_q1, &s2.measure_q1},
                       data)});
    lib.push_back({std::string("parallel-round-") + tag,
                   concat_segments(
                       {&pl.create_verify_both, &pl.ancilla_wait, &pl.interact_q1, &pl.measure_q1},
                       data)});
    lib.push_back(
        {std::string("decode-round-") + tag,
         concat_segments({&dc.encode, &dc.s_prep, &dc.interact_q1, &dc.couple, &dc.decode_measure},
                         data)});
  }
  lib.push_back({"swap", concat_segments({&parallel.rounds[0].swap_direct},
                                         block7(kQ1) | block7(kQ2))});
  return lib;
}

// Random layered circuit with the same scheduling discipline the protocols
// obey. All live qubits end measured.
inline ScheduledCircuit make_random_circuit(RandomStream& rs, int n_qubits, int n_layers) {
  ScheduledCircuit c;
  c.n_qubits = n_qubits;
  c.initially_live = 0;
  uint64_t live = 0;
  for (int li = 0; li < n_layers; ++li) {
    Layer l;
    uint64_t next_live = live;
    for (int q = 0; q < n_qubits; ++q)
      if (!((live >> q) & 1u) && rs.next_unit() < (li == 0 ? 0.8 : 0.3)) {
        l.push_back(rs.next_unit() < 0.5 ? prep_z(q) : prep_x(q));
        next_live |= 1ull << q;
      }
    std::vector<int> act;
    for (int q = 0; q < n_qubits; ++q)
      if ((live >> q) & 1u) act.push_back(q);
    for (size_t i = act.size(); i > 1; --i)
      std::swap(act[i - 1], act[rs.next_below(i)]);
    while (!act.empty()) {
      int q = act.back();
      act.pop_back();
      double r = rs.next_unit();
      if (r < 0.15) {
        l.push_back(rs.next_unit() < 0.5 ? meas_z(q) : meas_x(q));
        next_live &= ~(1ull << q);
      } else if (r < 0.60 && !act.empty()) {
        int p = act.back();
        act.pop_back();
        l.push_back(rs.next_unit() < 0.5 ? cnot(q, p) : cnot(p, q));
      } else {
        l.push_back(wait(q));
      }
    }
    if (!l.empty()) c.add_layer(std::move(l));
    live = next_live;
  }
  if (live) {
    Layer l;
    for (int q = 0; q < n_qubits; ++q)
      if ((live >> q) & 1u) l.push_back(rs.next_unit() < 0.5 ? meas_z(q) : meas_x(q));
    c.add_layer(std::move(l));
  }
  c.validate();
  return c;
}

inline std::vector<FaultEvent> random_faults(RandomStream& rs, const ScheduledCircuit& c, int n) {
  std::vector<FaultLoc> locs = enumerate_fault_locations(c);
  std::vector<FaultEvent> out;
  if (locs.empty()) return out;
  for (int i = 0; i < n; ++i) {
    const FaultLoc& loc = locs[rs.next_below(locs.size())];
    FaultKind k = fault_kind_of(loc.kind);
    uint8_t code = branch_code(k, static_cast<int>(rs.next_below(
                                      static_cast<uint64_t>(branch_count(k)))));
    out.push_back(FaultEvent{loc.layer, loc.gate, code});
  }
  return out;
}

// Compares the frame engine's measurement flips against the full stabilizer
// simulation: the flip of each measurement equals the XOR of coupled faulted
// and fault-free tableau runs. Returns the number of disagreements.
inline int compare_flips(const ScheduledCircuit& c, const std::vector<FaultEvent>& faults,
                         uint64_t key, int* comparisons = nullptr) {
  PropagationResult frame = propagate(c, faults);
  TableauRun runs = run_tableau(c, faults, key);
  if (runs.clean.size() != runs.faulted.size() ||
      runs.clean.size() != frame.record.entries.size())
    throw ContractViolation("engines disagree on the measurement count");
  int mismatches = 0;
  for (size_t i = 0; i < frame.record.entries.size(); ++i) {
    if (comparisons) ++*comparisons;
    if (frame.record.entries[i].flip != (runs.faulted[i] ^ runs.clean[i])) ++mismatches;
  }
  return mismatches;
}

struct ValidationSummary {
  uint64_t circuits = 0;
  uint64_t fault_sets = 0;
  uint64_t comparisons = 0;
  uint64_t mismatches = 0;
};

// Flip-equivalence sweep: the full gadget library plus `n_random` random
// circuits (2..14 qubits, up to 30 layers), each exercised fault-free and
// under random order-1 and order-2 fault sets.
inline ValidationSummary run_validation(int n_random, uint64_t seed) {
  ValidationSummary s;
  RandomStream rs(derive_key(seed, 0x76616c6964ull));
  auto check = [&](const ScheduledCircuit& c) {
    std::vector<std::vector<FaultEvent>> sets;
    sets.emplace_back();
    for (int i = 0; i < 4; ++i) sets.push_back(random_faults(rs, c, 1));
    for (int i = 0; i < 4; ++i) sets.push_back(random_faults(rs, c, 2));
    for (const auto& fs : sets) {
      int comparisons = 0;
      s.mismatches += static_cast<uint64_t>(compare_flips(c, fs, rs.next_u64(), &comparisons));
      s.comparisons += static_cast<uint64_t>(comparisons);
      ++s.fault_sets;
    }
    ++s.circuits;
  };
  for (const NamedCircuit& nc : gadget_library()) check(nc.circuit);
  for (int i = 0; i < n_random; ++i) {
    int n_q = 2 + static_cast<int>(rs.next_below(13));
    int n_l = 1 + static_cast<int>(rs.next_below(30));
    check(make_random_circuit(rs, n_q, n_l));
  }
  return s;
}

}  // namespace steaneft
