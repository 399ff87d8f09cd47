#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "steaneft/protocols.hpp"

namespace steaneft {

// Exact second-order failure polynomial: sum over failing fault pairs of
// (p_a / branches_a)(p_b / branches_b). Numerators are integers in units of
// p_a p_b / 225, so accumulation is exact (225 = lcm of branch-count
// products).
struct C2Accumulator {
  std::array<std::array<int64_t, kNumFaultKinds>, kNumFaultKinds> scaled{};

  void add(FaultKind a, FaultKind b) {
    int ia = static_cast<int>(a), ib = static_cast<int>(b);
    if (ia > ib) std::swap(ia, ib);
    scaled[static_cast<size_t>(ia)][static_cast<size_t>(ib)] +=
        225 / (branch_count(a) * branch_count(b));
  }

  double eval(const ErrorRates& r) const {
    double sum = 0;
    for (int a = 0; a < kNumFaultKinds; ++a)
      for (int b = a; b < kNumFaultKinds; ++b)
        if (scaled[static_cast<size_t>(a)][static_cast<size_t>(b)])
          sum += static_cast<double>(scaled[static_cast<size_t>(a)][static_cast<size_t>(b)]) *
                 r.rate(static_cast<FaultKind>(a)) * r.rate(static_cast<FaultKind>(b));
    return sum / 225.0;
  }

  // Coefficient (at unit rates) of pairs whose two kinds both belong to the
  // given error class.
  double class_diagonal(int cls) const {
    double sum = 0;
    for (int a = 0; a < kNumFaultKinds; ++a)
      for (int b = a; b < kNumFaultKinds; ++b)
        if (error_class_of(static_cast<FaultKind>(a)) == cls &&
            error_class_of(static_cast<FaultKind>(b)) == cls)
          sum += static_cast<double>(scaled[static_cast<size_t>(a)][static_cast<size_t>(b)]);
    return sum / 225.0;
  }

  double total_unit() const { return eval(ErrorRates::uniform(1.0)); }
};

// Runs the fault-free trial and returns the location list it presents.
inline std::vector<LocationInfo> happy_path_locations(
    const Gadgets& g, std::vector<std::pair<FaultKind, int>>* shape = nullptr) {
  NullSource null;
  RecordingSource rec(null);
  Workspace ws;
  rec.begin_trial(0);
  TrialResult tr = run_protocol_trial(g, rec, ws);
  if (tr.skipped || tr.lx || tr.lz || tr.verification_failures)
    throw ContractViolation("fault-free trial was not clean");
  if (shape) *shape = rec.group_shape;
  return rec.locations;
}

struct Order1Term {
  uint64_t ordinal;
  uint8_t code;
  LocationInfo loc;
  bool lx, lz;
};

struct Order1Result {
  std::vector<Order1Term> failing;  // single faults causing a logical error
  uint64_t locations = 0;
  uint64_t branches = 0;
  uint64_t skipped = 0;

  // First-order failure probability (exact when failing is nonempty).
  double c1(const ErrorRates& r) const {
    double s = 0;
    for (const Order1Term& t : failing) s += r.rate(t.loc.kind) * branch_unit_weight(t.loc.kind);
    return s;
  }
};

inline Order1Result enumerate_order1(const Gadgets& g) {
  Order1Result res;
  std::vector<LocationInfo> locs = happy_path_locations(g);
  res.locations = locs.size();
  Workspace ws;
  for (uint64_t l = 0; l < locs.size(); ++l) {
    FaultKind k = locs[l].kind;
    for (int b = 0; b < branch_count(k); ++b) {
      uint8_t code = branch_code(k, b);
      InjectingSource inj;
      inj.add(l, code);
      inj.begin_trial(0);
      TrialResult tr = run_protocol_trial(g, inj, ws);
      ++res.branches;
      if (tr.skipped) {
        ++res.skipped;
        continue;
      }
      if (tr.lx || tr.lz) res.failing.push_back({l, code, locs[l], tr.lx, tr.lz});
    }
  }
  return res;
}

struct Order2Result {
  C2Accumulator any;      // either logical component survives
  C2Accumulator basis_z;  // residual logical X (corrupts a Z-basis run)
  C2Accumulator basis_x;  // residual logical Z
  C2Accumulator basis_y;  // exactly one component (X xor Z)
  uint64_t pairs = 0;
  uint64_t failing_pairs = 0;
  uint64_t skipped_pairs = 0;
};

// Exhausts ordered fault pairs: the first fault is placed on the fault-free
// location list, the second on the location list of the branch that first
// fault induces. These events partition all exactly-two-fault trials, so the
// accumulated polynomial is the exact p^2 coefficient.
inline Order2Result enumerate_order2(const Gadgets& g) {
  Order2Result res;
  std::vector<LocationInfo> base = happy_path_locations(g);
  NullSource null;
  Workspace ws;
  for (uint64_t l1 = 0; l1 < base.size(); ++l1) {
    FaultKind k1 = base[l1].kind;
    for (int b1 = 0; b1 < branch_count(k1); ++b1) {
      uint8_t c1 = branch_code(k1, b1);
      InjectingSource single;
      single.add(l1, c1);
      RecordingSource rec(single);
      rec.begin_trial(0);
      run_protocol_trial(g, rec, ws);
      const std::vector<LocationInfo>& branch_locs = rec.locations;
      if (branch_locs.size() <= l1)
        throw ContractViolation("faulty branch ended before its own fault location");
      for (uint64_t i = 0; i <= l1; ++i)
        if (branch_locs[i].kind != base[i].kind || branch_locs[i].gate_kind != base[i].gate_kind ||
            branch_locs[i].q0 != base[i].q0 || branch_locs[i].q1 != base[i].q1)
          throw ContractViolation("branch diverged before its first fault");
      for (uint64_t l2 = l1 + 1; l2 < branch_locs.size(); ++l2) {
        FaultKind k2 = branch_locs[l2].kind;
        for (int b2 = 0; b2 < branch_count(k2); ++b2) {
          InjectingSource pair_src;
          pair_src.add(l1, c1);
          pair_src.add(l2, branch_code(k2, b2));
          pair_src.begin_trial(0);
          TrialResult tr = run_protocol_trial(g, pair_src, ws);
          ++res.pairs;
          if (tr.skipped) {
            ++res.skipped_pairs;
            continue;
          }
          if (tr.lx || tr.lz) {
            ++res.failing_pairs;
            res.any.add(k1, k2);
          }
          if (tr.lx) res.basis_z.add(k1, k2);
          if (tr.lz) res.basis_x.add(k1, k2);
          if (tr.lx != tr.lz) res.basis_y.add(k1, k2);
        }
      }
    }
  }
  return res;
}

// Single faults over one create-and-verify attempt that make verification
// reject, bucketed by kind. The first-order rejection probability is
// sum_k rejecting[k] * p_k / branches_k.
struct AncillaEnumResult {
  std::array<uint64_t, kNumFaultKinds> rejecting{};
  uint64_t locations = 0;
  uint64_t branches = 0;

  double slope(const ErrorRates& r) const {
    double s = 0;
    for (int k = 0; k < kNumFaultKinds; ++k)
      s += static_cast<double>(rejecting[static_cast<size_t>(k)]) *
           r.rate(static_cast<FaultKind>(k)) / branch_count(static_cast<FaultKind>(k));
    return s;
  }
};

inline AncillaEnumResult enumerate_ancilla_rejects(const Segment& cv) {
  AncillaEnumResult res;
  NullSource null;
  RecordingSource rec(null);
  Workspace ws;
  rec.begin_trial(0);
  if (run_ancilla_attempt(cv, rec, ws))
    throw ContractViolation("fault-free verification must accept");
  std::vector<LocationInfo> locs = rec.locations;
  res.locations = locs.size();
  for (uint64_t l = 0; l < locs.size(); ++l) {
    FaultKind k = locs[l].kind;
    for (int b = 0; b < branch_count(k); ++b) {
      InjectingSource inj;
      inj.add(l, branch_code(k, b));
      inj.begin_trial(0);
      ++res.branches;
      if (run_ancilla_attempt(cv, inj, ws)) ++res.rejecting[static_cast<size_t>(k)];
    }
  }
  return res;
}

}  // namespace steaneft
