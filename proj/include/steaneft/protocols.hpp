#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "steaneft/error_model.hpp"
#include "steaneft/steane.hpp"

namespace steaneft {

// Global qubit layout. Blocks of 7; measured blocks are re-prepared on
// reuse, so two rounds can share indices. The T block exists only for the
// optional two-SWAP variant.
inline constexpr int kTotalQubits = 42;
inline constexpr int kData = 0;
inline constexpr int kQ1 = 7;    // primary ancilla (also the decoded block)
inline constexpr int kV1 = 14;   // verifier / second decoder block
inline constexpr int kQ2 = 21;   // second primary ancilla
inline constexpr int kV2 = 28;   // second verifier
inline constexpr int kT = 35;    // two-SWAP intermediate

inline constexpr uint64_t block7(int base) { return 0x7Full << base; }

enum class ProtocolKind : uint8_t {
  NonFT = 0,
  SimpleSeries = 1,
  NaiveNoWait = 2,
  TwoAncillaSeries = 3,
  TwoAncillaParallel = 4,
  Decoding = 5,
};
inline constexpr int kNumProtocols = 6;

// Round 0 uses a |0_L> ancilla and corrects data Z errors; round 1 is the
// transversal-H dual correcting data X errors.
enum class RoundType : uint8_t { Zero = 0, Plus = 1 };

struct ProtocolOptions {
  int retry_cap = 100;          // consecutive failed verifications tolerated
  bool parallel_two_swap = false;  // route the parallel scheme through block T
  // Hold durations in time steps, one per scheme that holds a block live.
  int data_hold_steps = 6;      // simple series: data hold per creation attempt
  int series_wait_steps = 6;    // two-ancilla series: pass-branch ancilla wait
  int parallel_wait_steps = 3;  // two-ancilla parallel: pass-branch ancilla wait
};

// A schedulable chunk of a protocol with its fault groups precomputed.
// Only participating qubits appear; cross-segment idleness is not a fault
// location (ancillas are prepared just in time, data does not wait while
// an ancilla is measured).
struct Segment {
  ScheduledCircuit circuit;
  uint64_t touched_mask = 0;
  std::vector<std::array<std::vector<uint16_t>, kNumFaultKinds>> kind_groups;
  int total_locations = 0;

  static Segment build(ScheduledCircuit c) {
    c.validate();
    Segment s;
    s.touched_mask = c.qubit_mask();
    s.kind_groups.resize(c.layers.size());
    for (size_t li = 0; li < c.layers.size(); ++li)
      for (size_t gi = 0; gi < c.layers[li].size(); ++gi) {
        FaultKind k = fault_kind_of(c.layers[li][gi].kind);
        s.kind_groups[li][static_cast<size_t>(k)].push_back(static_cast<uint16_t>(gi));
        ++s.total_locations;
      }
    s.circuit = std::move(c);
    return s;
  }

  bool empty() const { return circuit.layers.empty(); }
};

inline bool RecordingSource::draw_group(const GroupRef& g, uint8_t* codes) {
  if (g.segment != last_segment_ || g.layer < last_layer_) {
    ++segment_seq_;
    last_segment_ = g.segment;
  }
  last_layer_ = g.layer;
  group_shape.push_back({g.kind, g.count});
  for (int i = 0; i < g.count; ++i) {
    const GateOp& op = g.segment->circuit.layers[static_cast<size_t>(g.layer)][g.gates[i]];
    locations.push_back(LocationInfo{g.kind, op.kind, segment_seq_, g.layer,
                                     static_cast<int>(g.gates[i]), op.q0, op.q1});
  }
  return inner_->draw_group(g, codes);
}

struct Workspace {
  std::vector<uint8_t> codes;
  std::vector<FaultEvent> faults;
  MeasurementRecord rec;

  Workspace() { codes.reserve(64); }
};

// Draws faults for every location of the segment (layer-major, kinds in
// Prep, Meas, Wait, Cnot order), then propagates. Segments whose qubits are
// untouched by both the frame and the drawn faults are skipped wholesale.
inline void run_segment(PauliFrame& f, const Segment& seg, FaultSource& src, Workspace& ws) {
  ws.faults.clear();
  for (size_t li = 0; li < seg.kind_groups.size(); ++li)
    for (int k = 0; k < kNumFaultKinds; ++k) {
      const auto& idx = seg.kind_groups[li][static_cast<size_t>(k)];
      if (idx.empty()) continue;
      GroupRef ref{&seg, static_cast<int>(li), static_cast<FaultKind>(k), idx.data(),
                   static_cast<int>(idx.size())};
      ws.codes.resize(idx.size());
      if (src.draw_group(ref, ws.codes.data()))
        for (size_t i = 0; i < idx.size(); ++i)
          if (ws.codes[i])
            ws.faults.push_back(FaultEvent{static_cast<int>(li), idx[i], ws.codes[i]});
    }
  if (ws.faults.empty() && ((f.x_bits | f.z_bits) & seg.touched_mask) == 0) {
    ws.rec.entries.clear();
    ws.rec.all_zero = true;
    return;
  }
  PropagationResult res = propagate(seg.circuit, ws.faults, f);
  f = res.frame;
  ws.rec = std::move(res.record);
  ws.rec.all_zero = false;
}

inline uint8_t block_flips(const MeasurementRecord& rec, int base) {
  if (rec.all_zero) return 0;
  uint8_t m = 0;
  for (const auto& e : rec.entries)
    if (e.flip && e.qubit >= base && e.qubit < base + 7)
      m |= static_cast<uint8_t>(1u << (e.qubit - base));
  return m;
}

// Accept iff every stabilizer parity and the logical parity of the verifier
// flips are trivial.
inline bool verification_accepts(uint8_t vflips) {
  return syndrome_of_mask(vflips) == 0 && !logical_parity(vflips);
}

// -------------------------------------------------------------------------
// Segment builders.
// -------------------------------------------------------------------------

namespace detail {

inline ScheduledCircuit blank_circuit(uint64_t initially_live) {
  ScheduledCircuit c;
  c.n_qubits = kTotalQubits;
  c.initially_live = initially_live;
  return c;
}

inline void append_encoder_layers(ScheduledCircuit& c, RoundType rt, const std::vector<int>& bases) {
  bool plus = rt == RoundType::Plus;
  Layer prep;
  for (int base : bases)
    for (int q = 0; q < kNumDataQubits; ++q) {
      bool seed = (kSeedMask >> q) & 1;
      prep.push_back(seed != plus ? prep_x(base + q) : prep_z(base + q));
    }
  c.add_layer(std::move(prep));
  for (int layer = 0; layer < 3; ++layer) {
    Layer l;
    for (int base : bases) {
      for (int g = 3 * layer; g < 3 * layer + 3; ++g) {
        auto [a, b] = kEncoderCnots[static_cast<size_t>(g)];
        l.push_back(plus ? cnot(base + b, base + a) : cnot(base + a, base + b));
      }
      l.push_back(wait(base + kEncoderIdle[static_cast<size_t>(layer)]));
    }
    c.add_layer(std::move(l));
  }
}

// Create-and-verify: both encoders run in parallel layers, one transversal
// CNOT couples them, and the verifier is measured while the ancilla waits.
// 6 time steps total per pair.
inline Segment make_create_verify(RoundType rt, const std::vector<std::pair<int, int>>& qv_pairs,
                                  bool prep_t_block) {
  ScheduledCircuit c = blank_circuit(0);
  std::vector<int> bases;
  for (auto [q, v] : qv_pairs) {
    bases.push_back(q);
    bases.push_back(v);
  }
  append_encoder_layers(c, rt, bases);
  Layer trans;
  for (auto [q, v] : qv_pairs)
    for (int i = 0; i < 7; ++i)
      trans.push_back(rt == RoundType::Zero ? cnot(q + i, v + i) : cnot(v + i, q + i));
  c.add_layer(std::move(trans));
  Layer meas;
  for (auto [q, v] : qv_pairs)
    for (int i = 0; i < 7; ++i) {
      meas.push_back(rt == RoundType::Zero ? meas_z(v + i) : meas_x(v + i));
      meas.push_back(wait(q + i));
    }
  if (prep_t_block)
    for (int i = 0; i < 7; ++i) meas.push_back(prep_z(kT + i));
  c.add_layer(std::move(meas));
  return Segment::build(std::move(c));
}

inline Segment make_encode(RoundType rt, int base) {
  ScheduledCircuit c = blank_circuit(0);
  append_encoder_layers(c, rt, {base});
  return Segment::build(std::move(c));
}

inline Segment make_interact(RoundType rt, int q_base) {
  ScheduledCircuit c = blank_circuit(block7(kData) | block7(q_base));
  Layer l;
  for (int i = 0; i < 7; ++i)
    l.push_back(rt == RoundType::Zero ? cnot(q_base + i, kData + i) : cnot(kData + i, q_base + i));
  c.add_layer(std::move(l));
  return Segment::build(std::move(c));
}

inline Segment make_measure_ancilla(RoundType rt, int q_base) {
  ScheduledCircuit c = blank_circuit(block7(q_base));
  Layer l;
  for (int i = 0; i < 7; ++i)
    l.push_back(rt == RoundType::Zero ? meas_x(q_base + i) : meas_z(q_base + i));
  c.add_layer(std::move(l));
  return Segment::build(std::move(c));
}

inline Segment make_wait(int base, int steps) {
  ScheduledCircuit c = blank_circuit(block7(base));
  for (int s = 0; s < steps; ++s) {
    Layer l;
    for (int i = 0; i < 7; ++i) l.push_back(wait(base + i));
    c.add_layer(std::move(l));
  }
  return Segment::build(std::move(c));
}

// Transversal SWAP, three CNOT layers, first and third with `from` as control.
inline Segment make_swap(int from, int to) {
  ScheduledCircuit c = blank_circuit(block7(from) | block7(to));
  for (int s = 0; s < 3; ++s) {
    Layer l;
    for (int i = 0; i < 7; ++i)
      l.push_back(s == 1 ? cnot(to + i, from + i) : cnot(from + i, to + i));
    c.add_layer(std::move(l));
  }
  return Segment::build(std::move(c));
}

inline Segment make_s_prep(RoundType rt, int base) {
  ScheduledCircuit c = blank_circuit(0);
  Layer l;
  for (int i = 0; i < 7; ++i)
    l.push_back(rt == RoundType::Zero ? prep_z(base + i) : prep_x(base + i));
  c.add_layer(std::move(l));
  return Segment::build(std::move(c));
}

inline Segment make_couple(RoundType rt, int a_base, int s_base) {
  ScheduledCircuit c = blank_circuit(block7(a_base) | block7(s_base));
  Layer l;
  for (int i = 0; i < 7; ++i)
    l.push_back(rt == RoundType::Zero ? cnot(a_base + i, s_base + i) : cnot(s_base + i, a_base + i));
  c.add_layer(std::move(l));
  return Segment::build(std::move(c));
}

// Reversed encoder on both blocks simultaneously, then transversal readout:
// seed qubits in the conjugate basis, the rest in the preparation basis.
inline Segment make_decode_measure(RoundType rt, int a_base, int s_base) {
  ScheduledCircuit c = blank_circuit(block7(a_base) | block7(s_base));
  bool plus = rt == RoundType::Plus;
  for (int layer = 2; layer >= 0; --layer) {
    Layer l;
    for (int base : {a_base, s_base}) {
      for (int g = 3 * layer; g < 3 * layer + 3; ++g) {
        auto [a, b] = kEncoderCnots[static_cast<size_t>(g)];
        l.push_back(plus ? cnot(base + b, base + a) : cnot(base + a, base + b));
      }
      l.push_back(wait(base + kEncoderIdle[static_cast<size_t>(layer)]));
    }
    c.add_layer(std::move(l));
  }
  Layer meas;
  for (int base : {a_base, s_base})
    for (int q = 0; q < 7; ++q) {
      bool seed = (kSeedMask >> q) & 1;
      bool x_basis = seed != plus;
      meas.push_back(x_basis ? meas_x(base + q) : meas_z(base + q));
    }
  c.add_layer(std::move(meas));
  return Segment::build(std::move(c));
}

}  // namespace detail

// -------------------------------------------------------------------------
// Decoding inference. The syndrome side maps the three decoded seed-pair
// parities (A xor second block) to a weight<=1 correction; the class side
// maps the eight non-seed readout bits to the canonical first-order error
// class transferred to the data. Both tables are built by probing the
// actual gadget, so they are independent of bit-order conventions and of
// the error rates.
// -------------------------------------------------------------------------

struct DecodeSignature {
  int sig = 0;    // seed-pair parities, bit j = j'th seed offset
  int arest = 0;  // decoded-ancilla non-seed flips, 4 bits
  int srest = 0;  // second-block non-seed flips, 4 bits
};

struct DecodingInference {
  std::array<uint8_t, 8> sig_corr{};     // syndrome side
  std::array<uint8_t, 256> class_corr{};  // transfer side, keyed arest<<4 | srest
  std::array<bool, 256> key_known{};
};

struct RoundResult {
  bool skipped = false;
  int verification_failures = 0;
};

class Gadgets;
inline RoundResult run_round(const Gadgets& g, RoundType rt, PauliFrame& f, FaultSource& src,
                             Workspace& ws);

// Segments and tables for one round type of one protocol.
struct RoundSet {
  Segment create_verify;       // pair 1
  Segment create_verify_2;     // pair 2 (series fallback)
  Segment create_verify_both;  // both pairs at once (parallel)
  Segment ancilla_wait;        // pass-branch wait on Q1
  Segment data_wait;           // per-failure data hold (simple series)
  Segment swap_direct;         // Q2 -> Q1
  Segment swap_via_t_1, swap_via_t_2;  // Q2 -> T -> Q1
  Segment encode;              // unverified primary (NonFT, Decoding)
  Segment s_prep, couple, decode_measure;
  Segment interact_q1, interact_q2, measure_q1, measure_q2;
  DecodingInference infer;
};

namespace detail {

inline const std::array<int, 3> kSeedOffsets = {0, 1, 3};
inline const std::array<int, 4> kRestOffsets = {2, 4, 5, 6};

inline DecodeSignature extract_signature(const MeasurementRecord& rec) {
  uint8_t a = block_flips(rec, kQ1), s = block_flips(rec, kV1);
  DecodeSignature d;
  for (int j = 0; j < 3; ++j)
    d.sig |= static_cast<int>(((a ^ s) >> kSeedOffsets[static_cast<size_t>(j)]) & 1u) << j;
  for (int j = 0; j < 4; ++j) {
    d.arest |= static_cast<int>((a >> kRestOffsets[static_cast<size_t>(j)]) & 1u) << j;
    d.srest |= static_cast<int>((s >> kRestOffsets[static_cast<size_t>(j)]) & 1u) << j;
  }
  return d;
}

}  // namespace detail

// Runs one decoding round. With infer == nullptr no corrections are applied
// (probe mode for table construction); sig_out, when given, receives the
// observed signature.
inline RoundResult run_decoding_round(const RoundSet& rs, RoundType rt, PauliFrame& f,
                                      FaultSource& src, Workspace& ws,
                                      const DecodingInference* infer,
                                      DecodeSignature* sig_out = nullptr) {
  run_segment(f, rs.encode, src, ws);
  run_segment(f, rs.s_prep, src, ws);
  run_segment(f, rs.interact_q1, src, ws);
  run_segment(f, rs.couple, src, ws);
  run_segment(f, rs.decode_measure, src, ws);
  DecodeSignature d = detail::extract_signature(ws.rec);
  if (sig_out) *sig_out = d;
  if (infer) {
    uint8_t syn_corr = infer->sig_corr[static_cast<size_t>(d.sig)];
    int key = (d.arest << 4) | d.srest;
    uint8_t cls_corr =
        infer->key_known[static_cast<size_t>(key)] ? infer->class_corr[static_cast<size_t>(key)] : 0;
    if (rt == RoundType::Zero) {
      f.z_bits ^= syn_corr;
      f.x_bits ^= cls_corr;
    } else {
      f.x_bits ^= syn_corr;
      f.z_bits ^= cls_corr;
    }
  }
  return RoundResult{};
}

inline RoundResult run_nonft_round(const RoundSet& rs, RoundType rt, PauliFrame& f,
                                   FaultSource& src, Workspace& ws) {
  run_segment(f, rs.encode, src, ws);
  run_segment(f, rs.interact_q1, src, ws);
  run_segment(f, rs.measure_q1, src, ws);
  uint8_t corr = single_qubit_correction(syndrome_of_mask(block_flips(ws.rec, kQ1)));
  if (rt == RoundType::Zero)
    f.z_bits ^= corr;
  else
    f.x_bits ^= corr;
  return RoundResult{};
}

inline RoundResult run_verification_round(ProtocolKind kind, const ProtocolOptions& opts,
                                          const RoundSet& rs, RoundType rt, PauliFrame& f,
                                          FaultSource& src, Workspace& ws) {
  RoundResult res;
  int use_base = kQ1;
  switch (kind) {
    case ProtocolKind::SimpleSeries:
    case ProtocolKind::NaiveNoWait: {
      int attempt = 0;
      for (;; ++attempt) {
        if (attempt > opts.retry_cap)
          throw ContractViolation("verification retry cap exceeded");
        run_segment(f, rs.create_verify, src, ws);
        if (verification_accepts(block_flips(ws.rec, kV1))) break;
        ++res.verification_failures;
        // The first ancilla is produced ahead of time; only a failed
        // verification makes the data sit out a fresh create-and-verify.
        if (kind == ProtocolKind::SimpleSeries) run_segment(f, rs.data_wait, src, ws);
      }
      break;
    }
    case ProtocolKind::TwoAncillaSeries: {
      run_segment(f, rs.create_verify, src, ws);
      if (verification_accepts(block_flips(ws.rec, kV1))) {
        run_segment(f, rs.ancilla_wait, src, ws);
      } else {
        ++res.verification_failures;
        run_segment(f, rs.create_verify_2, src, ws);
        if (!verification_accepts(block_flips(ws.rec, kV2))) {
          ++res.verification_failures;
          res.skipped = true;
          return res;
        }
        use_base = kQ2;
      }
      break;
    }
    case ProtocolKind::TwoAncillaParallel: {
      run_segment(f, rs.create_verify_both, src, ws);
      bool pass1 = verification_accepts(block_flips(ws.rec, kV1));
      bool pass2 = verification_accepts(block_flips(ws.rec, kV2));
      res.verification_failures += (pass1 ? 0 : 1) + (pass2 ? 0 : 1);
      if (pass1) {
        run_segment(f, rs.ancilla_wait, src, ws);
      } else if (pass2) {
        if (opts.parallel_two_swap) {
          run_segment(f, rs.swap_via_t_1, src, ws);
          run_segment(f, rs.swap_via_t_2, src, ws);
        } else {
          run_segment(f, rs.swap_direct, src, ws);
        }
      } else {
        res.skipped = true;
        return res;
      }
      break;
    }
    default:
      throw ContractViolation("not a verification protocol");
  }
  const Segment& interact = use_base == kQ1 ? rs.interact_q1 : rs.interact_q2;
  const Segment& measure = use_base == kQ1 ? rs.measure_q1 : rs.measure_q2;
  run_segment(f, interact, src, ws);
  run_segment(f, measure, src, ws);
  uint8_t corr = single_qubit_correction(syndrome_of_mask(block_flips(ws.rec, use_base)));
  if (rt == RoundType::Zero)
    f.z_bits ^= corr;
  else
    f.x_bits ^= corr;
  return res;
}

// -------------------------------------------------------------------------
// Gadgets: all prebuilt segments plus inference tables for one protocol.
// Construction is rate-independent; one instance serves every sweep point.
// -------------------------------------------------------------------------

class Gadgets {
 public:
  ProtocolKind kind;
  ProtocolOptions opts;
  std::array<RoundSet, 2> rounds;

  explicit Gadgets(ProtocolKind k, ProtocolOptions o = {}) : kind(k), opts(o) {
    using namespace detail;
    for (int r = 0; r < 2; ++r) {
      RoundType rt = static_cast<RoundType>(r);
      RoundSet& rs = rounds[static_cast<size_t>(r)];
      rs.interact_q1 = make_interact(rt, kQ1);
      rs.measure_q1 = make_measure_ancilla(rt, kQ1);
      switch (kind) {
        case ProtocolKind::NonFT:
          rs.encode = make_encode(rt, kQ1);
          break;
        case ProtocolKind::SimpleSeries:
        case ProtocolKind::NaiveNoWait:
          rs.create_verify = make_create_verify(rt, {{kQ1, kV1}}, false);
          rs.data_wait = make_wait(kData, opts.data_hold_steps);
          break;
        case ProtocolKind::TwoAncillaSeries:
          rs.create_verify = make_create_verify(rt, {{kQ1, kV1}}, false);
          rs.create_verify_2 = make_create_verify(rt, {{kQ2, kV2}}, false);
          rs.ancilla_wait = make_wait(kQ1, opts.series_wait_steps);
          rs.interact_q2 = make_interact(rt, kQ2);
          rs.measure_q2 = make_measure_ancilla(rt, kQ2);
          break;
        case ProtocolKind::TwoAncillaParallel:
          rs.create_verify_both =
              make_create_verify(rt, {{kQ1, kV1}, {kQ2, kV2}}, opts.parallel_two_swap);
          rs.ancilla_wait = make_wait(
              kQ1, opts.parallel_two_swap ? 2 * opts.parallel_wait_steps
                                          : opts.parallel_wait_steps);
          if (opts.parallel_two_swap) {
            rs.swap_via_t_1 = make_swap(kQ2, kT);
            rs.swap_via_t_2 = make_swap(kT, kQ1);
          } else {
            rs.swap_direct = make_swap(kQ2, kQ1);
          }
          break;
        case ProtocolKind::Decoding:
          rs.encode = make_encode(rt, kQ1);
          rs.s_prep = make_s_prep(rt, kV1);
          rs.couple = make_couple(rt, kQ1, kV1);
          rs.decode_measure = make_decode_measure(rt, kQ1, kV1);
          break;
      }
    }
    if (kind == ProtocolKind::Decoding)
      for (int r = 0; r < 2; ++r) build_inference(static_cast<RoundType>(r));
  }

 private:
  // Probe run of one decoding round: no corrections, optional initial frame.
  DecodeSignature probe_round(RoundType rt, FaultSource& src, PauliFrame f,
                              PauliFrame* final_frame = nullptr) const {
    Workspace ws;
    DecodeSignature d;
    PauliFrame frame = f;
    src.begin_trial(0);
    run_decoding_round(rounds[static_cast<size_t>(rt)], rt, frame, src, ws, nullptr, &d);
    if (final_frame) *final_frame = frame;
    return d;
  }

  void build_inference(RoundType rt) {
    DecodingInference& inf = rounds[static_cast<size_t>(rt)].infer;
    NullSource null;

    // Syndrome side: inject each weight-1 data error the round corrects and
    // read off its seed-pair signature.
    std::array<bool, 8> sig_used{};
    sig_used[0] = true;
    for (int q = 0; q < 7; ++q) {
      PauliFrame f(kTotalQubits);
      if (rt == RoundType::Zero)
        f.z_bits = 1ull << q;
      else
        f.x_bits = 1ull << q;
      DecodeSignature d = probe_round(rt, null, f);
      if (d.arest != 0 || d.srest != 0)
        throw ContractViolation("data error leaked into the class-side readout");
      if (d.sig == 0 || sig_used[static_cast<size_t>(d.sig)])
        throw ContractViolation("seed-pair signatures do not separate weight-1 data errors");
      sig_used[static_cast<size_t>(d.sig)] = true;
      inf.sig_corr[static_cast<size_t>(d.sig)] = static_cast<uint8_t>(1u << q);
    }

    // Class side: exhaust single faults of the round, group by readout key,
    // and pick per key the correction that minimizes rate-weighted residual
    // error, requiring every residual to stay correctable (weight <= 1).
    RecordingSource recorder(null);
    probe_round(rt, recorder, PauliFrame(kTotalQubits));
    struct Entry {
      uint8_t transfer;
      double weight;
    };
    std::array<std::vector<Entry>, 256> by_key;
    by_key[0].push_back({0, 1e6});  // the fault-free case must stay untouched
    for (size_t loc = 0; loc < recorder.locations.size(); ++loc) {
      FaultKind k = recorder.locations[loc].kind;
      for (int b = 0; b < branch_count(k); ++b) {
        InjectingSource inj;
        inj.add(loc, branch_code(k, b));
        PauliFrame out(kTotalQubits);
        DecodeSignature d = probe_round(rt, inj, PauliFrame(kTotalQubits), &out);
        uint8_t transfer = static_cast<uint8_t>(
            (rt == RoundType::Zero ? out.x_bits : out.z_bits) & kDataMask);
        int key = (d.arest << 4) | d.srest;
        by_key[static_cast<size_t>(key)].push_back({transfer, branch_unit_weight(k)});
      }
    }
    for (int key = 0; key < 256; ++key) {
      const auto& entries = by_key[static_cast<size_t>(key)];
      if (entries.empty()) continue;
      std::vector<uint8_t> candidates{0};
      for (const Entry& e : entries) {
        uint8_t c = reduce_mod_stabilizers(e.transfer);
        bool dup = false;
        for (uint8_t prev : candidates) dup = dup || prev == c;
        if (!dup) candidates.push_back(c);
      }
      bool found = false;
      uint8_t best = 0;
      double best_score = 0, best_fixed = 0;
      for (uint8_t c : candidates) {
        bool feasible = true;
        double score = 0, fixed = 0;
        for (const Entry& e : entries) {
          uint8_t resid = reduce_mod_stabilizers(static_cast<uint8_t>(e.transfer ^ c));
          int w = std::popcount(resid);
          if (w > 1) {
            feasible = false;
            break;
          }
          score += e.weight * w;
          if (w == 0) fixed += e.weight;
        }
        if (!feasible) continue;
        bool better = !found || score < best_score ||
                      (score == best_score &&
                       (fixed > best_fixed ||
                        (fixed == best_fixed &&
                         (std::popcount(c) < std::popcount(best) ||
                          (std::popcount(c) == std::popcount(best) && support_lex_less(c, best))))));
        if (better) {
          found = true;
          best = c;
          best_score = score;
          best_fixed = fixed;
        }
      }
      if (!found)
        throw ContractViolation("no single correction reconciles colliding decode signatures");
      inf.class_corr[static_cast<size_t>(key)] = best;
      inf.key_known[static_cast<size_t>(key)] = true;
    }
  }
};

inline RoundResult run_round(const Gadgets& g, RoundType rt, PauliFrame& f, FaultSource& src,
                             Workspace& ws) {
  const RoundSet& rs = g.rounds[static_cast<size_t>(rt)];
  switch (g.kind) {
    case ProtocolKind::NonFT:
      return run_nonft_round(rs, rt, f, src, ws);
    case ProtocolKind::Decoding:
      return run_decoding_round(rs, rt, f, src, ws, &rs.infer);
    default:
      return run_verification_round(g.kind, g.opts, rs, rt, f, src, ws);
  }
}

struct TrialResult {
  bool lx = false;  // residual logical X component after ideal decode
  bool lz = false;  // residual logical Z component
  bool skipped = false;
  int verification_failures = 0;
};

// One full QEC cycle: |0_L> round then |+_L> round on an initially clean
// data frame, then one ideal decode of what remains.
inline TrialResult run_protocol_trial(const Gadgets& g, FaultSource& src, Workspace& ws) {
  TrialResult tr;
  if (src.trial_certainly_clean()) return tr;
  PauliFrame f(kTotalQubits);
  for (int r = 0; r < 2; ++r) {
    RoundResult rr = run_round(g, static_cast<RoundType>(r), f, src, ws);
    tr.verification_failures += rr.verification_failures;
    if (rr.skipped) {
      tr.skipped = true;
      return tr;
    }
  }
  tr.lx = logical_flip_after_ideal_decode(static_cast<uint8_t>(f.x_bits & kDataMask));
  tr.lz = logical_flip_after_ideal_decode(static_cast<uint8_t>(f.z_bits & kDataMask));
  return tr;
}

// Standalone create-and-verify attempt; true when verification rejects.
inline bool run_ancilla_attempt(const Segment& cv, FaultSource& src, Workspace& ws) {
  PauliFrame f(kTotalQubits);
  run_segment(f, cv, src, ws);
  return !verification_accepts(block_flips(ws.rec, kV1));
}

}  // namespace steaneft
