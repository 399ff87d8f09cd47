#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <thread>
#include <vector>

#include "steaneft/enumeration.hpp"
#include "steaneft/protocols.hpp"

namespace steaneft {

// Logical eigenbasis of the encoded data qubit a trial protects. A Z-basis
// eigenstate is spoiled by a residual logical X or Y (the x component), an
// X-basis eigenstate by Z or Y (the z component), a Y-basis eigenstate by
// X or Z (exactly one component).
enum class Basis : uint8_t { Z = 0, X = 1, Y = 2 };

inline bool basis_failure(const TrialResult& t, Basis b) {
  switch (b) {
    case Basis::Z: return t.lx;
    case Basis::X: return t.lz;
    case Basis::Y: return t.lx != t.lz;
  }
  return false;
}

struct AggregateResult {
  uint64_t trials = 0;
  uint64_t failures = 0;
  uint64_t reruns = 0;
  uint64_t verification_failures = 0;

  double rate() const { return trials ? static_cast<double>(failures) / static_cast<double>(trials) : 0.0; }

  void merge(const AggregateResult& o) {
    trials += o.trials;
    failures += o.failures;
    reruns += o.reruns;
    verification_failures += o.verification_failures;
  }
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

inline Interval wilson_interval(uint64_t failures, uint64_t trials,
                                double z = 1.959963984540054) {
  if (trials == 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double ph = static_cast<double>(failures) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (ph + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  // The exact endpoints at 0 and n would otherwise pick up rounding residue.
  double low = failures == 0 ? 0.0 : std::max(0.0, center - half);
  double high = failures == trials ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

struct RunSpec {
  ErrorRates rates;
  ClassFilter filter = ClassFilter::All;
  Basis basis = Basis::Z;
  uint64_t max_trials = 1000000;
  uint64_t target_failures = 0;  // 0 = run exactly max_trials
  int jobs = 1;
  int rerun_cap = 64;
  uint64_t batch_size = 1 << 20;
};

namespace detail {

// Trial i draws from streams keyed (stream_key, i, rerun); the outcome is a
// pure function of that key, so results are independent of batching and of
// how trials are spread over threads.
inline AggregateResult run_chunk(const Gadgets& g, const RunSpec& spec,
                                 std::shared_ptr<const HappyPathSchedule> schedule,
                                 uint64_t stream_key, uint64_t begin, uint64_t end) {
  AggregateResult local;
  FastSamplingSource src(std::move(schedule), spec.rates, spec.filter);
  Workspace ws;
  for (uint64_t i = begin; i < end; ++i) {
    uint64_t trial_key = derive_key(stream_key, i);
    for (int r = 0;; ++r) {
      if (r > spec.rerun_cap)
        throw ConfigError("rerun cap exceeded: skipped trials dominate at these rates");
      src.begin_trial(derive_key(trial_key, static_cast<uint64_t>(r)));
      TrialResult t = run_protocol_trial(g, src, ws);
      local.verification_failures += static_cast<uint64_t>(t.verification_failures);
      if (!t.skipped) {
        local.failures += basis_failure(t, spec.basis) ? 1u : 0u;
        break;
      }
      ++local.reruns;
    }
    ++local.trials;
  }
  return local;
}

inline AggregateResult run_batch(const Gadgets& g, const RunSpec& spec,
                                 const std::shared_ptr<const HappyPathSchedule>& schedule,
                                 uint64_t stream_key, uint64_t begin, uint64_t end) {
  uint64_t n = end - begin;
  int jobs = std::max(1, spec.jobs);
  if (static_cast<uint64_t>(jobs) > n) jobs = static_cast<int>(n);
  if (jobs <= 1) return run_chunk(g, spec, schedule, stream_key, begin, end);
  std::vector<AggregateResult> parts(static_cast<size_t>(jobs));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(jobs));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(jobs));
  uint64_t chunk = n / static_cast<uint64_t>(jobs);
  uint64_t rem = n % static_cast<uint64_t>(jobs);
  uint64_t s = begin;
  for (int t = 0; t < jobs; ++t) {
    uint64_t e = s + chunk + (static_cast<uint64_t>(t) < rem ? 1 : 0);
    threads.emplace_back([&g, &spec, &schedule, &parts, &errors, stream_key, t, s, e] {
      try {
        parts[static_cast<size_t>(t)] = run_chunk(g, spec, schedule, stream_key, s, e);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
    s = e;
  }
  for (auto& th : threads) th.join();
  for (auto& ep : errors)
    if (ep) std::rethrow_exception(ep);
  AggregateResult out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

}  // namespace detail

// Monte Carlo estimate of the basis failure rate at one parameter point.
// Stops at max_trials, or earlier once target_failures have accumulated
// (checked at batch boundaries).
inline AggregateResult run_point(const Gadgets& g, const RunSpec& spec, uint64_t stream_key) {
  spec.rates.check();
  if (spec.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (spec.rerun_cap < 0) throw ConfigError("rerun cap must be >= 0");
  if (spec.batch_size == 0) throw ConfigError("batch size must be >= 1");
  std::vector<std::pair<FaultKind, int>> shape;
  happy_path_locations(g, &shape);
  auto schedule = std::make_shared<const HappyPathSchedule>(
      finalize_schedule(std::move(shape), spec.rates, spec.filter));
  AggregateResult total;
  uint64_t next = 0;
  while (next < spec.max_trials) {
    if (spec.target_failures && total.failures >= spec.target_failures) break;
    uint64_t end = std::min(next + spec.batch_size, spec.max_trials);
    total.merge(detail::run_batch(g, spec, schedule, stream_key, next, end));
    next = end;
  }
  return total;
}

// Combined logical error rate from the three basis runs. With E_X the
// Z-basis rate, E_Y the X-basis rate and E_Z the Y-basis rate:
// E_X = P_X + P_Y, E_Y = P_Y + P_Z, E_Z = P_Z + P_X, and
// P_L = P_X + P_Y + P_Z = (E_X + E_Y + E_Z) / 2.
struct PLEstimate {
  AggregateResult z_run, x_run, y_run;
  double e_x = 0, e_y = 0, e_z = 0;
  double p_x = 0, p_y = 0, p_z = 0, p_l = 0;
  double ci_low = 0, ci_high = 0;  // on p_l, per-basis Wilson intervals in quadrature
};

inline PLEstimate make_pl_estimate(const AggregateResult& z_run, const AggregateResult& x_run,
                                   const AggregateResult& y_run) {
  PLEstimate e;
  e.z_run = z_run;
  e.x_run = x_run;
  e.y_run = y_run;
  e.e_x = z_run.rate();
  e.e_y = x_run.rate();
  e.e_z = y_run.rate();
  e.p_x = 0.5 * (e.e_x + e.e_z - e.e_y);
  e.p_y = 0.5 * (e.e_x + e.e_y - e.e_z);
  e.p_z = 0.5 * (e.e_y + e.e_z - e.e_x);
  e.p_l = 0.5 * (e.e_x + e.e_y + e.e_z);
  auto half = [](const AggregateResult& a) {
    Interval w = wilson_interval(a.failures, a.trials);
    return 0.5 * (w.high - w.low);
  };
  double hz = half(z_run), hx = half(x_run), hy = half(y_run);
  double h = 0.5 * std::sqrt(hz * hz + hx * hx + hy * hy);
  e.ci_low = std::max(0.0, e.p_l - h);
  e.ci_high = std::min(1.0, e.p_l + h);
  return e;
}

// Runs the three basis experiments of one (point, protocol, filter) cell.
inline PLEstimate measure_pl(const Gadgets& g, RunSpec spec, uint64_t cell_key) {
  AggregateResult r[3];
  for (int b = 0; b < 3; ++b) {
    spec.basis = static_cast<Basis>(b);
    r[b] = run_point(g, spec, derive_key(cell_key, static_cast<uint64_t>(b)));
  }
  return make_pl_estimate(r[0], r[1], r[2]);
}

// -------------------------------------------------------------------------
// Ancilla creation failure rate: repeated independent create-and-verify
// attempts, counting verification rejections.
// -------------------------------------------------------------------------

struct AncillaMC {
  uint64_t attempts = 0;
  uint64_t rejects = 0;

  double rate() const {
    return attempts ? static_cast<double>(rejects) / static_cast<double>(attempts) : 0.0;
  }
  Interval ci() const { return wilson_interval(rejects, attempts); }
};

inline AncillaMC run_ancilla_attempts(const Segment& cv, const ErrorRates& rates,
                                      uint64_t attempts, uint64_t stream_key, int jobs = 1) {
  rates.check();
  NullSource null;
  RecordingSource rec(null);
  Workspace ws0;
  rec.begin_trial(0);
  if (run_ancilla_attempt(cv, rec, ws0))
    throw ContractViolation("fault-free verification must accept");
  auto schedule = std::make_shared<const HappyPathSchedule>(
      finalize_schedule(rec.group_shape, rates, ClassFilter::All));
  auto chunk = [&](uint64_t begin, uint64_t end) {
    AncillaMC local;
    FastSamplingSource src(schedule, rates, ClassFilter::All);
    Workspace ws;
    for (uint64_t i = begin; i < end; ++i) {
      src.begin_trial(derive_key(stream_key, i));
      if (!src.trial_certainly_clean() && run_ancilla_attempt(cv, src, ws)) ++local.rejects;
      ++local.attempts;
    }
    return local;
  };
  jobs = std::max(1, jobs);
  if (static_cast<uint64_t>(jobs) > attempts) jobs = attempts ? static_cast<int>(attempts) : 1;
  if (jobs <= 1) return chunk(0, attempts);
  std::vector<AncillaMC> parts(static_cast<size_t>(jobs));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(jobs));
  std::vector<std::thread> threads;
  uint64_t per = attempts / static_cast<uint64_t>(jobs), rem = attempts % static_cast<uint64_t>(jobs);
  uint64_t s = 0;
  for (int t = 0; t < jobs; ++t) {
    uint64_t e = s + per + (static_cast<uint64_t>(t) < rem ? 1 : 0);
    threads.emplace_back([&, t, s, e] {
      try {
        parts[static_cast<size_t>(t)] = chunk(s, e);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
    s = e;
  }
  for (auto& th : threads) th.join();
  for (auto& ep : errors)
    if (ep) std::rethrow_exception(ep);
  AncillaMC out;
  for (const auto& p : parts) {
    out.attempts += p.attempts;
    out.rejects += p.rejects;
  }
  return out;
}

// -------------------------------------------------------------------------
// Sweep driver: one record per (point, protocol, filter, basis) plus one
// combined record per cell. Stream keys depend on the point index and the
// protocol/filter/basis enum values only, so results are reproducible and
// independent of scheduling.
// -------------------------------------------------------------------------

inline constexpr int kCombinedBasis = 3;

struct SweepRecord {
  ProtocolKind protocol;
  ErrorRates rates;
  ClassFilter filter;
  int basis;  // 0..2 = Basis, 3 = combined P_L
  uint64_t trials = 0, failures = 0, reruns = 0, verification_failures = 0;
  double rate = 0, ci_low = 0, ci_high = 0;
};

struct SweepRequest {
  std::vector<ErrorRates> grid;
  std::vector<ProtocolKind> protocols;
  std::vector<ClassFilter> filters{ClassFilter::All};
  uint64_t max_trials = 1000000;
  uint64_t target_failures = 0;
  uint64_t master_seed = 0;
  int jobs = 1;
  int rerun_cap = 64;
  ProtocolOptions options;
};

inline std::vector<SweepRecord> run_sweep(const SweepRequest& req) {
  if (req.grid.empty()) throw ConfigError("sweep grid is empty");
  if (req.protocols.empty()) throw ConfigError("no protocols selected");
  if (req.filters.empty()) throw ConfigError("no filters selected");
  std::vector<std::unique_ptr<Gadgets>> gads;
  for (ProtocolKind pk : req.protocols) gads.push_back(std::make_unique<Gadgets>(pk, req.options));
  std::vector<SweepRecord> out;
  for (size_t pi = 0; pi < req.grid.size(); ++pi)
    for (size_t gi = 0; gi < req.protocols.size(); ++gi)
      for (ClassFilter filt : req.filters) {
        const Gadgets& g = *gads[gi];
        RunSpec spec;
        spec.rates = req.grid[pi];
        spec.filter = filt;
        spec.max_trials = req.max_trials;
        spec.target_failures = req.target_failures;
        spec.jobs = req.jobs;
        spec.rerun_cap = req.rerun_cap;
        uint64_t cell_key = derive_key(
            derive_key(derive_key(req.master_seed, pi), static_cast<uint64_t>(g.kind)),
            static_cast<uint64_t>(filt));
        PLEstimate pl = measure_pl(g, spec, cell_key);
        const AggregateResult* runs[3] = {&pl.z_run, &pl.x_run, &pl.y_run};
        for (int b = 0; b < 3; ++b) {
          Interval w = wilson_interval(runs[b]->failures, runs[b]->trials);
          out.push_back(SweepRecord{g.kind, spec.rates, filt, b, runs[b]->trials,
                                    runs[b]->failures, runs[b]->reruns,
                                    runs[b]->verification_failures, runs[b]->rate(), w.low,
                                    w.high});
        }
        AggregateResult sum;
        for (const AggregateResult* r : runs) sum.merge(*r);
        out.push_back(SweepRecord{g.kind, spec.rates, filt, kCombinedBasis, sum.trials,
                                  sum.failures, sum.reruns, sum.verification_failures, pl.p_l,
                                  pl.ci_low, pl.ci_high});
      }
  return out;
}

}  // namespace steaneft
