#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "steaneft/error_model.hpp"

using namespace steaneft;

TEST_CASE("gate kinds map onto fault kinds and error classes") {
  CHECK(fault_kind_of(GateKind::PrepZ) == FaultKind::Prep);
  CHECK(fault_kind_of(GateKind::PrepX) == FaultKind::Prep);
  CHECK(fault_kind_of(GateKind::MeasZ) == FaultKind::Meas);
  CHECK(fault_kind_of(GateKind::MeasX) == FaultKind::Meas);
  CHECK(fault_kind_of(GateKind::Wait) == FaultKind::Wait);
  CHECK(fault_kind_of(GateKind::Cnot) == FaultKind::Cnot);

  CHECK(error_class_of(FaultKind::Prep) == 0);
  CHECK(error_class_of(FaultKind::Meas) == 0);
  CHECK(error_class_of(FaultKind::Wait) == 1);
  CHECK(error_class_of(FaultKind::Cnot) == 2);
}

TEST_CASE("branch tables enumerate each channel exactly once") {
  CHECK(branch_count(FaultKind::Prep) == 1);
  CHECK(branch_count(FaultKind::Meas) == 1);
  CHECK(branch_count(FaultKind::Wait) == 3);
  CHECK(branch_count(FaultKind::Cnot) == 15);

  CHECK(branch_code(FaultKind::Prep, 0) == 1);
  CHECK(branch_code(FaultKind::Meas, 0) == 1);
  CHECK(branch_code(FaultKind::Wait, 0) == 1);  // X
  CHECK(branch_code(FaultKind::Wait, 1) == 3);  // Y
  CHECK(branch_code(FaultKind::Wait, 2) == 2);  // Z

  std::set<uint8_t> cnot_codes;
  for (int b = 0; b < 15; ++b) {
    uint8_t c = branch_code(FaultKind::Cnot, b);
    CHECK(c >= 1);
    CHECK(c <= 15);
    cnot_codes.insert(c);
  }
  CHECK(cnot_codes.size() == 15);

  CHECK(branch_unit_weight(FaultKind::Prep) == 1.0);
  CHECK(branch_unit_weight(FaultKind::Wait) == Catch::Approx(1.0 / 3.0));
  CHECK(branch_unit_weight(FaultKind::Cnot) == Catch::Approx(1.0 / 15.0));
}

TEST_CASE("rates validate and filter by class") {
  ErrorRates r{0.01, 0.02, 0.03, 0.04};
  r.check();
  CHECK(ErrorRates::uniform(0.5).p_wait == 0.5);
  CHECK_THROWS_AS((ErrorRates{-0.1, 0, 0, 0}.check()), ConfigError);
  CHECK_THROWS_AS((ErrorRates{0, 0, 0, 1.5}.check()), ConfigError);

  CHECK(effective_rate(r, ClassFilter::All, FaultKind::Cnot) == 0.04);
  CHECK(effective_rate(r, ClassFilter::Class0, FaultKind::Prep) == 0.01);
  CHECK(effective_rate(r, ClassFilter::Class0, FaultKind::Meas) == 0.02);
  CHECK(effective_rate(r, ClassFilter::Class0, FaultKind::Wait) == 0.0);
  CHECK(effective_rate(r, ClassFilter::Class1, FaultKind::Wait) == 0.03);
  CHECK(effective_rate(r, ClassFilter::Class1, FaultKind::Cnot) == 0.0);
  CHECK(effective_rate(r, ClassFilter::Class2, FaultKind::Cnot) == 0.04);
  CHECK(effective_rate(r, ClassFilter::Class2, FaultKind::Prep) == 0.0);
}

TEST_CASE("schedule finalization computes clean and first-fault probabilities") {
  ErrorRates r{0.0, 0.0, 0.1, 0.2};
  auto s = finalize_schedule({{FaultKind::Wait, 2}, {FaultKind::Cnot, 1}}, r,
                             ClassFilter::All);
  REQUIRE(s.groups.size() == 2);
  CHECK(s.groups[0].q == Catch::Approx(0.81));
  CHECK(s.groups[1].q == Catch::Approx(0.8));
  CHECK(s.q_clean == Catch::Approx(0.648));
  CHECK(s.groups[0].first_cum == Catch::Approx(0.19));
  CHECK(s.groups[1].first_cum == Catch::Approx(0.19 + 0.81 * 0.2));
  // Filtering a class zeroes its groups' contribution.
  auto s1 = finalize_schedule({{FaultKind::Wait, 2}, {FaultKind::Cnot, 1}}, r,
                              ClassFilter::Class1);
  CHECK(s1.q_clean == Catch::Approx(0.81));
}

namespace {

struct GroupShape {
  FaultKind kind;
  int count;
};

const std::vector<GroupShape> kShape = {{FaultKind::Prep, 7},
                                        {FaultKind::Cnot, 9},
                                        {FaultKind::Wait, 3},
                                        {FaultKind::Meas, 7}};

// Runs one trial against a fixed group sequence, returning per-group fault
// counts (and total) exactly as a protocol driver would observe them.
template <class Source>
std::vector<int> drive_trial(Source& src, uint64_t key) {
  src.begin_trial(key);
  std::vector<int> counts;
  if (src.trial_certainly_clean()) {
    counts.assign(kShape.size(), 0);
    return counts;
  }
  uint8_t codes[16];
  for (const auto& g : kShape) {
    GroupRef ref{nullptr, 0, g.kind, nullptr, g.count};
    bool any = src.draw_group(ref, codes);
    int n = 0;
    for (int i = 0; i < g.count; ++i) n += codes[i] != 0;
    if (any != (n > 0)) FAIL("draw_group return disagrees with filled codes");
    counts.push_back(n);
  }
  return counts;
}

}  // namespace

TEST_CASE("fast sampler matches the reference sampler distributionally") {
  ErrorRates rates = ErrorRates::uniform(0.05);
  std::vector<std::pair<FaultKind, int>> raw;
  for (const auto& g : kShape) raw.emplace_back(g.kind, g.count);
  auto schedule =
      std::make_shared<const HappyPathSchedule>(finalize_schedule(raw, rates, ClassFilter::All));

  PlainSamplingSource plain(rates, ClassFilter::All);
  FastSamplingSource fast(schedule, rates, ClassFilter::All);

  const int kTrials = 200000;
  std::vector<double> mean_plain(kShape.size(), 0), mean_fast(kShape.size(), 0);
  int clean_fast = 0;
  for (int t = 0; t < kTrials; ++t) {
    auto cp = drive_trial(plain, derive_key(11, static_cast<uint64_t>(t)));
    fast.begin_trial(derive_key(22, static_cast<uint64_t>(t)));
    clean_fast += fast.trial_certainly_clean();
    auto cf = drive_trial(fast, derive_key(22, static_cast<uint64_t>(t)));
    for (size_t i = 0; i < kShape.size(); ++i) {
      mean_plain[i] += cp[i];
      mean_fast[i] += cf[i];
    }
  }
  for (size_t i = 0; i < kShape.size(); ++i) {
    double expect = kShape[i].count * 0.05;
    CHECK(mean_plain[i] / kTrials == Catch::Approx(expect).margin(0.01));
    CHECK(mean_fast[i] / kTrials == Catch::Approx(expect).margin(0.01));
  }
  CHECK(static_cast<double>(clean_fast) / kTrials ==
        Catch::Approx(schedule->q_clean).margin(0.005));
}

TEST_CASE("fast sampler rejects divergence before the first fault") {
  ErrorRates rates = ErrorRates::uniform(0.01);
  auto schedule = std::make_shared<const HappyPathSchedule>(
      finalize_schedule({{FaultKind::Prep, 7}, {FaultKind::Cnot, 9}}, rates, ClassFilter::All));
  FastSamplingSource fast(schedule, rates, ClassFilter::All);
  // Find a trial whose first happy-path group is faulty; presenting a group
  // of the wrong shape there must be caught.
  uint64_t key = 0;
  for (;; ++key) {
    fast.begin_trial(key);
    if (!fast.trial_certainly_clean()) break;
  }
  uint8_t codes[16];
  GroupRef wrong{nullptr, 0, FaultKind::Wait, nullptr, 7};
  CHECK_THROWS_AS(fast.draw_group(wrong, codes), ContractViolation);
}

TEST_CASE("injection places codes at flattened ordinals") {
  InjectingSource inj{{2, 1}, {8, 9}, {9, 5}};
  inj.begin_trial(0);
  uint8_t codes[8];
  GroupRef g0{nullptr, 0, FaultKind::Prep, nullptr, 7};  // ordinals 0..6
  CHECK(inj.draw_group(g0, codes));
  for (int i = 0; i < 7; ++i) CHECK(codes[i] == (i == 2 ? 1 : 0));
  GroupRef g1{nullptr, 1, FaultKind::Cnot, nullptr, 4};  // ordinals 7..10
  CHECK(inj.draw_group(g1, codes));
  CHECK(codes[0] == 0);
  CHECK(codes[1] == 9);
  CHECK(codes[2] == 5);
  CHECK(codes[3] == 0);
  GroupRef g2{nullptr, 2, FaultKind::Meas, nullptr, 4};  // ordinals 11..14
  CHECK_FALSE(inj.draw_group(g2, codes));
  // Restarting the trial rewinds the cursor.
  inj.begin_trial(0);
  CHECK(inj.draw_group(g0, codes));
  CHECK(codes[2] == 1);

  NullSource null;
  CHECK_FALSE(null.draw_group(g0, codes));
  CHECK_FALSE(null.trial_certainly_clean());
}
