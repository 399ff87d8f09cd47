#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <vector>

#include "steaneft/circuit.hpp"
#include "steaneft/pauli.hpp"
#include "steaneft/rng.hpp"

namespace steaneft {

// -------------------------------------------------------------------------
// Fault kinds and rates. Kinds bucket gate ops by their error channel:
// preps flip to the orthogonal state, measurements flip the reported value,
// waits depolarize (X/Y/Z each p/3), CNOTs draw one of the 15 non-identity
// two-qubit Paulis (each p/15), applied after the ideal gate.
// -------------------------------------------------------------------------

enum class FaultKind : uint8_t { Prep = 0, Meas = 1, Wait = 2, Cnot = 3 };
inline constexpr int kNumFaultKinds = 4;

inline FaultKind fault_kind_of(GateKind g) {
  switch (g) {
    case GateKind::PrepZ:
    case GateKind::PrepX: return FaultKind::Prep;
    case GateKind::MeasZ:
    case GateKind::MeasX: return FaultKind::Meas;
    case GateKind::Wait: return FaultKind::Wait;
    case GateKind::Cnot: return FaultKind::Cnot;
  }
  return FaultKind::Wait;
}

// Error classes group locations by gate type: 0 = prep+measure, 1 = wait,
// 2 = CNOT.
inline int error_class_of(FaultKind k) {
  switch (k) {
    case FaultKind::Prep:
    case FaultKind::Meas: return 0;
    case FaultKind::Wait: return 1;
    case FaultKind::Cnot: return 2;
  }
  return 0;
}

inline int branch_count(FaultKind k) {
  switch (k) {
    case FaultKind::Prep:
    case FaultKind::Meas: return 1;
    case FaultKind::Wait: return 3;
    case FaultKind::Cnot: return 15;
  }
  return 0;
}

// Canonical branch order: Wait = X, Y, Z; Cnot = (control, target) pairs in
// I,X,Y,Z base-4 order with II skipped.
inline uint8_t branch_code(FaultKind k, int branch) {
  switch (k) {
    case FaultKind::Prep:
    case FaultKind::Meas: return 1;
    case FaultKind::Wait: {
      constexpr uint8_t codes[3] = {1, 3, 2};
      return codes[branch];
    }
    case FaultKind::Cnot: return two_qubit_pauli_code(branch + 1);
  }
  return 0;
}

struct ErrorRates {
  double p_prep = 0, p_meas = 0, p_wait = 0, p_cnot = 0;

  double rate(FaultKind k) const {
    switch (k) {
      case FaultKind::Prep: return p_prep;
      case FaultKind::Meas: return p_meas;
      case FaultKind::Wait: return p_wait;
      case FaultKind::Cnot: return p_cnot;
    }
    return 0;
  }

  void check() const {
    for (double p : {p_prep, p_meas, p_wait, p_cnot})
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("error rate outside [0, 1]");
  }

  static ErrorRates uniform(double p) { return ErrorRates{p, p, p, p}; }
};

enum class ClassFilter : uint8_t { All = 0, Class0 = 1, Class1 = 2, Class2 = 3 };

inline double effective_rate(const ErrorRates& r, ClassFilter f, FaultKind k) {
  if (f != ClassFilter::All && static_cast<int>(f) - 1 != error_class_of(k)) return 0.0;
  return r.rate(k);
}

// Weight of one fault branch in units where its kind's rate is 1
// (wait branches carry 1/3, CNOT branches 1/15).
inline double branch_unit_weight(FaultKind k) {
  return 1.0 / branch_count(k);
}

// -------------------------------------------------------------------------
// Fault sources. Protocol execution asks a source for fault codes one group
// at a time, where a group is all same-kind locations of one circuit layer
// in canonical order. This single interface serves Monte Carlo sampling,
// exhaustive enumeration (recording + injection), and no-fault dry runs.
// -------------------------------------------------------------------------

struct Segment;  // defined in protocols.hpp

struct GroupRef {
  const Segment* segment;
  int layer;
  FaultKind kind;
  const uint16_t* gates;  // indices into the layer, n entries
  int count;
};

class FaultSource {
 public:
  virtual ~FaultSource() = default;
  virtual void begin_trial(uint64_t /*trial_key*/) {}
  // When true, the entire trial is guaranteed fault-free and the caller may
  // skip execution (a fault-free run changes nothing and fails nothing).
  virtual bool trial_certainly_clean() { return false; }
  // Fills codes[0..count) and reports whether any entry is nonzero.
  virtual bool draw_group(const GroupRef& g, uint8_t* codes) = 0;
};

class NullSource final : public FaultSource {
 public:
  bool draw_group(const GroupRef&, uint8_t*) override { return false; }
};

// Reference sampler: one uniform per location. Slow but obviously correct;
// the fast sampler is tested against it distributionally.
class PlainSamplingSource final : public FaultSource {
 public:
  PlainSamplingSource(const ErrorRates& rates, ClassFilter filter)
      : rates_(rates), filter_(filter) {}

  void begin_trial(uint64_t trial_key) override { rs_ = RandomStream(trial_key); }

  bool draw_group(const GroupRef& g, uint8_t* codes) override {
    double p = effective_rate(rates_, filter_, g.kind);
    bool any = false;
    for (int i = 0; i < g.count; ++i) {
      if (p > 0.0 && rs_.next_unit() < p) {
        codes[i] = branch_code(g.kind, static_cast<int>(rs_.next_below(static_cast<uint64_t>(branch_count(g.kind)))));
        any = true;
      } else {
        codes[i] = 0;
      }
    }
    return any;
  }

 private:
  ErrorRates rates_;
  ClassFilter filter_;
  RandomStream rs_{0};
};

// The group sequence of a fault-free trial. Control flow only diverges
// after a fault manifests, so every trial's group sequence agrees with this
// schedule up to and including its first faulty group.
struct HappyPathSchedule {
  struct Group {
    FaultKind kind;
    int count;
    double p;        // effective rate
    double q;        // (1-p)^count
    double first_cum;  // cumulative P(first faulty group is <= this one)
  };
  std::vector<Group> groups;
  double q_clean = 1.0;  // probability of a completely fault-free trial
};

inline HappyPathSchedule finalize_schedule(std::vector<std::pair<FaultKind, int>> raw,
                                           const ErrorRates& rates, ClassFilter filter) {
  HappyPathSchedule s;
  s.groups.reserve(raw.size());
  for (auto [kind, n] : raw) {
    HappyPathSchedule::Group g;
    g.kind = kind;
    g.count = n;
    g.p = effective_rate(rates, filter, kind);
    g.q = std::pow(1.0 - g.p, n);
    s.groups.push_back(g);
  }
  double prefix = 1.0, cum = 0.0;
  for (auto& g : s.groups) {
    cum += prefix * (1.0 - g.q);
    g.first_cum = cum;
    prefix *= g.q;
  }
  s.q_clean = prefix;
  return s;
}

// Two-stage sampler: one uniform decides whether the trial has any fault on
// the happy path; fault-free trials cost O(1). Otherwise the same uniform
// locates the first faulty group, whose count is drawn binomially
// conditioned on >= 1, and all later groups are sampled unconditionally.
// Groups encountered beyond the recorded schedule (retry branches, which are
// reachable only after a fault) are also sampled unconditionally.
class FastSamplingSource final : public FaultSource {
 public:
  FastSamplingSource(std::shared_ptr<const HappyPathSchedule> schedule, const ErrorRates& rates,
                     ClassFilter filter)
      : schedule_(std::move(schedule)), rates_(rates), filter_(filter) {}

  void begin_trial(uint64_t trial_key) override {
    rs_ = RandomStream(trial_key);
    next_group_ = 0;
    double u = rs_.next_unit();
    clean_ = u < schedule_->q_clean;
    if (clean_) return;
    double v = u - schedule_->q_clean;
    size_t lo = 0, hi = schedule_->groups.size();
    while (lo < hi) {  // first group with v < first_cum
      size_t mid = (lo + hi) / 2;
      if (v < schedule_->groups[mid].first_cum) hi = mid; else lo = mid + 1;
    }
    first_faulty_ = lo < schedule_->groups.size() ? lo : schedule_->groups.size() - 1;
  }

  bool trial_certainly_clean() override { return clean_; }

  bool draw_group(const GroupRef& g, uint8_t* codes) override {
    const size_t n = g.count > 0 ? static_cast<size_t>(g.count) : 0;
    size_t idx = next_group_++;
    if (clean_ || idx < first_faulty_) {
      if (idx < schedule_->groups.size()) check_schedule(idx, g);
      std::memset(codes, 0, n);
      return false;
    }
    double p = effective_rate(rates_, filter_, g.kind);
    int k;
    if (idx == first_faulty_) {
      check_schedule(idx, g);
      k = sample_binomial_at_least_one(rs_, g.count, p, schedule_->groups[idx].q);
    } else {
      // Past the first fault the trial may have diverged onto a retry
      // branch, so the scheduled q applies only while the shapes agree.
      const HappyPathSchedule::Group* sg =
          idx < schedule_->groups.size() ? &schedule_->groups[idx] : nullptr;
      double q = sg && sg->kind == g.kind && sg->count == g.count
                     ? sg->q
                     : std::pow(1.0 - p, g.count);
      k = sample_binomial(rs_, g.count, p, q);
    }
    std::memset(codes, 0, n);
    if (k == 0) return false;
    fill_faults(g, k, codes);
    return true;
  }

 private:
  void check_schedule(size_t idx, const GroupRef& g) const {
    const auto& sg = schedule_->groups[idx];
    if (sg.kind != g.kind || sg.count != g.count)
      throw ContractViolation("trial diverged from the fault-free schedule before its first fault");
  }

  void fill_faults(const GroupRef& g, int k, uint8_t* codes) {
    int n = g.count;
    if (k == 1) {
      int pos = static_cast<int>(rs_.next_below(static_cast<uint64_t>(n)));
      codes[pos] = branch_code(g.kind, static_cast<int>(rs_.next_below(static_cast<uint64_t>(branch_count(g.kind)))));
      return;
    }
    // Floyd's sampling of k distinct positions, then codes in ascending order.
    uint64_t chosen = 0;
    for (int j = n - k; j < n; ++j) {
      int t = static_cast<int>(rs_.next_below(static_cast<uint64_t>(j) + 1));
      if (chosen & (1ull << t)) t = j;
      chosen |= 1ull << t;
    }
    for (int pos = 0; pos < n; ++pos)
      if (chosen & (1ull << pos))
        codes[pos] = branch_code(g.kind, static_cast<int>(rs_.next_below(static_cast<uint64_t>(branch_count(g.kind)))));
  }

  std::shared_ptr<const HappyPathSchedule> schedule_;
  ErrorRates rates_;
  ClassFilter filter_;
  RandomStream rs_{0};
  bool clean_ = true;
  size_t first_faulty_ = 0;
  size_t next_group_ = 0;
};

// One concrete place a fault can act, flattened into the global per-trial
// location order (the order groups are presented in).
struct LocationInfo {
  FaultKind kind;
  GateKind gate_kind;
  int segment_seq;  // how many segments had started when this was drawn
  int layer;
  int gate;
  uint8_t q0, q1;
};

// Wraps another source and records every location presented, giving the
// flattened location list of whatever branch the inner source induces.
class RecordingSource final : public FaultSource {
 public:
  explicit RecordingSource(FaultSource& inner) : inner_(&inner) {}

  void begin_trial(uint64_t key) override {
    inner_->begin_trial(key);
    locations.clear();
    group_shape.clear();
    segment_seq_ = -1;
    last_segment_ = nullptr;
    last_layer_ = 0;
  }

  bool draw_group(const GroupRef& g, uint8_t* codes) override;  // protocols.hpp

  std::vector<LocationInfo> locations;
  std::vector<std::pair<FaultKind, int>> group_shape;

 private:
  FaultSource* inner_;
  int segment_seq_ = -1;
  const Segment* last_segment_ = nullptr;
  int last_layer_ = 0;
};

// Deterministically injects the given codes at given global location
// ordinals (positions in the flattened order of the branch actually taken).
class InjectingSource final : public FaultSource {
 public:
  InjectingSource() = default;
  InjectingSource(std::initializer_list<std::pair<uint64_t, uint8_t>> inj) {
    for (auto& [o, c] : inj) add(o, c);
  }

  void add(uint64_t ordinal, uint8_t code) { injections_.push_back({ordinal, code}); }
  void clear() { injections_.clear(); }

  void begin_trial(uint64_t) override { cursor_ = 0; }

  bool draw_group(const GroupRef& g, uint8_t* codes) override {
    std::memset(codes, 0, static_cast<size_t>(g.count));
    bool any = false;
    for (auto& [o, c] : injections_)
      if (o >= cursor_ && o < cursor_ + static_cast<uint64_t>(g.count)) {
        codes[o - cursor_] = c;
        any = true;
      }
    cursor_ += static_cast<uint64_t>(g.count);
    return any;
  }

 private:
  std::vector<std::pair<uint64_t, uint8_t>> injections_;
  uint64_t cursor_ = 0;
};

}  // namespace steaneft
