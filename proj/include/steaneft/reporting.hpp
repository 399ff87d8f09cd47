#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "steaneft/experiments.hpp"

namespace steaneft {

inline const char* protocol_name(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::NonFT: return "non-ft";
    case ProtocolKind::SimpleSeries: return "simple-series";
    case ProtocolKind::NaiveNoWait: return "naive-no-wait";
    case ProtocolKind::TwoAncillaSeries: return "two-ancilla-series";
    case ProtocolKind::TwoAncillaParallel: return "two-ancilla-parallel";
    case ProtocolKind::Decoding: return "decoding";
  }
  return "?";
}

inline ProtocolKind parse_protocol(const std::string& s) {
  for (int k = 0; k < kNumProtocols; ++k)
    if (s == protocol_name(static_cast<ProtocolKind>(k))) return static_cast<ProtocolKind>(k);
  throw ConfigError("unknown protocol: " + s);
}

inline const char* filter_name(ClassFilter f) {
  switch (f) {
    case ClassFilter::All: return "all";
    case ClassFilter::Class0: return "class0";
    case ClassFilter::Class1: return "class1";
    case ClassFilter::Class2: return "class2";
  }
  return "?";
}

inline ClassFilter parse_filter(const std::string& s) {
  for (int f = 0; f < 4; ++f)
    if (s == filter_name(static_cast<ClassFilter>(f))) return static_cast<ClassFilter>(f);
  throw ConfigError("unknown filter: " + s);
}

// Row label for the basis column; combined P_L rows are labeled "PL".
inline const char* basis_label(int b) {
  switch (b) {
    case 0: return "Z";
    case 1: return "X";
    case 2: return "Y";
    case kCombinedBasis: return "PL";
  }
  return "?";
}

// Full-precision decimal form that round-trips through strtod.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kCsvHeader =
    "protocol,p_prep,p_meas,p_wait,p_cnot,filter,basis,trials,failures,reruns,"
    "verification_failures,rate,ci_low,ci_high,master_seed";

inline std::string records_to_csv(const std::vector<SweepRecord>& records, uint64_t master_seed) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRecord& r : records) {
    out += protocol_name(r.protocol);
    out += ',';
    out += fmt_g17(r.rates.p_prep);
    out += ',';
    out += fmt_g17(r.rates.p_meas);
    out += ',';
    out += fmt_g17(r.rates.p_wait);
    out += ',';
    out += fmt_g17(r.rates.p_cnot);
    out += ',';
    out += filter_name(r.filter);
    out += ',';
    out += basis_label(r.basis);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += std::to_string(r.failures);
    out += ',';
    out += std::to_string(r.reruns);
    out += ',';
    out += std::to_string(r.verification_failures);
    out += ',';
    out += fmt_g17(r.rate);
    out += ',';
    out += fmt_g17(r.ci_low);
    out += ',';
    out += fmt_g17(r.ci_high);
    out += ',';
    out += std::to_string(master_seed);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json records_to_json(const std::vector<SweepRecord>& records,
                                              uint64_t master_seed) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SweepRecord& r : records) {
    nlohmann::ordered_json o;
    o["protocol"] = protocol_name(r.protocol);
    o["p_prep"] = r.rates.p_prep;
    o["p_meas"] = r.rates.p_meas;
    o["p_wait"] = r.rates.p_wait;
    o["p_cnot"] = r.rates.p_cnot;
    o["filter"] = filter_name(r.filter);
    o["basis"] = basis_label(r.basis);
    o["trials"] = r.trials;
    o["failures"] = r.failures;
    o["reruns"] = r.reruns;
    o["verification_failures"] = r.verification_failures;
    o["rate"] = r.rate;
    o["ci_low"] = r.ci_low;
    o["ci_high"] = r.ci_high;
    o["master_seed"] = master_seed;
    arr.push_back(std::move(o));
  }
  return arr;
}

// Plot-ready pivot: one row per grid point, one combined-P_L column per
// protocol. `axes` selects which rate fields form the leading columns.
inline std::string pivot_pl_csv(const std::vector<SweepRecord>& records,
                                const std::vector<ErrorRates>& grid,
                                const std::vector<ProtocolKind>& protocols,
                                const std::vector<std::pair<std::string, double ErrorRates::*>>& axes) {
  std::string out;
  for (const auto& [name, field] : axes) {
    if (!out.empty()) out += ',';
    out += name;
    (void)field;
  }
  for (ProtocolKind pk : protocols) {
    out += ',';
    out += protocol_name(pk);
  }
  out += '\n';
  for (const ErrorRates& pt : grid) {
    bool first = true;
    for (const auto& [name, field] : axes) {
      if (!first) out += ',';
      first = false;
      out += fmt_g17(pt.*field);
      (void)name;
    }
    for (ProtocolKind pk : protocols) {
      double value = 0;
      bool found = false;
      for (const SweepRecord& r : records)
        if (r.protocol == pk && r.basis == kCombinedBasis && r.rates.p_prep == pt.p_prep &&
            r.rates.p_meas == pt.p_meas && r.rates.p_wait == pt.p_wait &&
            r.rates.p_cnot == pt.p_cnot) {
          value = r.rate;
          found = true;
          break;
        }
      if (!found) throw ContractViolation("pivot point missing from sweep records");
      out += ',';
      out += fmt_g17(value);
    }
    out += '\n';
  }
  return out;
}

}  // namespace steaneft
