// Command-line front end: Monte Carlo sweeps over rate grids, exhaustive
// order-1/2 fault enumeration reports, frame-vs-tableau cross-validation,
// and preset plot-ready tables for the standard comparison studies.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "steaneft/config.hpp"
#include "steaneft/enumeration.hpp"
#include "steaneft/validation.hpp"

namespace {

using namespace steaneft;

struct Opts {
  std::string config_path;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> protocols;
  std::string filter;
  uint64_t seed = 0;
  uint64_t trials = 0;
  uint64_t target_failures = 0;
  int jobs = 0;
  int rerun_cap = -1;
  int order = 1;
  int random_circuits = 1000;
  double eval_p = 1e-5;
  bool two_swap = false;
};

std::vector<ProtocolKind> parse_protocol_list(const std::vector<std::string>& args) {
  std::vector<ProtocolKind> out;
  for (const std::string& arg : args) {
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(parse_protocol(tok));
  }
  return out;
}

// Bare filenames land in $STEANEFT_OUT_DIR when it is set; paths are used
// verbatim. An empty name writes to stdout.
void write_output(const std::string& name, const std::string& text) {
  if (name.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::string path = name;
  const char* dir = std::getenv("STEANEFT_OUT_DIR");
  if (dir && *dir && name.find('/') == std::string::npos)
    path = std::string(dir) + "/" + name;
  std::ofstream f(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("cannot write output file: " + path);
}

CliConfig load_config(const Opts& o) {
  CliConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw ConfigError("cannot read config file: " + o.config_path);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = parse_config(j);
  }
  return cfg;
}

// Flags win over the config file; unset fields fall back to defaults.
SweepRequest resolve_request(const Opts& o, const CLI::App* cmd, CliConfig& cfg) {
  SweepRequest req;
  req.grid = cfg.grid.empty() ? std::vector<ErrorRates>{ErrorRates::uniform(1e-5)} : cfg.grid;
  if (!o.protocols.empty())
    req.protocols = parse_protocol_list(o.protocols);
  else if (!cfg.protocols.empty())
    req.protocols = cfg.protocols;
  else
    for (int k = 0; k < kNumProtocols; ++k) req.protocols.push_back(static_cast<ProtocolKind>(k));
  if (cmd->count("--filter"))
    req.filters = {parse_filter(o.filter)};
  else if (!cfg.filters.empty())
    req.filters = cfg.filters;
  req.max_trials = o.trials ? o.trials : (cfg.trials ? cfg.trials : 1000000);
  req.target_failures = cmd->count("--target-failures") ? o.target_failures : cfg.target_failures;
  req.master_seed = cmd->count("--seed") ? o.seed : (cfg.has_seed ? cfg.seed : 0);
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  req.jobs = o.jobs > 0 ? o.jobs : (cfg.jobs > 0 ? cfg.jobs : (hw > 0 ? hw : 1));
  req.rerun_cap = o.rerun_cap >= 0 ? o.rerun_cap : (cfg.rerun_cap >= 0 ? cfg.rerun_cap : 64);
  req.options = cfg.options;
  if (o.two_swap) req.options.parallel_two_swap = true;
  return req;
}

void emit_records(const Opts& o, const SweepRequest& req, const std::vector<SweepRecord>& records,
                  const std::string& default_out) {
  std::string name = o.out.empty() ? default_out : o.out;
  if (o.format == "json")
    write_output(name, records_to_json(records, req.master_seed).dump(2) + "\n");
  else
    write_output(name, records_to_csv(records, req.master_seed));
}

int cmd_sweep(const Opts& o, const CLI::App* cmd) {
  CliConfig cfg = load_config(o);
  SweepRequest req = resolve_request(o, cmd, cfg);
  emit_records(o, req, run_sweep(req), "");
  return 0;
}

nlohmann::ordered_json c2_matrix_json(const C2Accumulator& acc) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int a = 0; a < kNumFaultKinds; ++a) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int b = 0; b < kNumFaultKinds; ++b)
      row.push_back(acc.scaled[static_cast<size_t>(a)][static_cast<size_t>(b)]);
    rows.push_back(row);
  }
  return rows;
}

int cmd_fault_enum(const Opts& o, const CLI::App* cmd) {
  CliConfig cfg = load_config(o);
  std::vector<ProtocolKind> protocols;
  if (!o.protocols.empty())
    protocols = parse_protocol_list(o.protocols);
  else if (!cfg.protocols.empty())
    protocols = cfg.protocols;
  else
    for (int k = 0; k < kNumProtocols; ++k) protocols.push_back(static_cast<ProtocolKind>(k));
  ErrorRates at = ErrorRates::uniform(o.eval_p);
  ProtocolOptions popts = cfg.options;
  if (o.two_swap) popts.parallel_two_swap = true;

  nlohmann::ordered_json report;
  report["order"] = o.order;
  report["eval_rate"] = o.eval_p;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (ProtocolKind pk : protocols) {
    Gadgets g(pk, popts);
    nlohmann::ordered_json entry;
    entry["protocol"] = protocol_name(pk);
    if (o.order == 1) {
      Order1Result r = enumerate_order1(g);
      entry["locations"] = r.locations;
      entry["branches"] = r.branches;
      entry["failing_terms"] = r.failing.size();
      entry["skipped_branches"] = r.skipped;
      entry["fault_tolerant"] = r.failing.empty();
      entry["c1"] = r.c1(at);
      nlohmann::ordered_json terms = nlohmann::ordered_json::array();
      for (const Order1Term& t : r.failing) {
        nlohmann::ordered_json tj;
        tj["ordinal"] = t.ordinal;
        tj["pauli_code"] = t.code;
        tj["kind"] = static_cast<int>(t.loc.kind);
        tj["segment"] = t.loc.segment_seq;
        tj["layer"] = t.loc.layer;
        tj["logical_x"] = t.lx;
        tj["logical_z"] = t.lz;
        terms.push_back(tj);
      }
      entry["failing"] = terms;
    } else {
      Order2Result r = enumerate_order2(g);
      entry["pairs"] = r.pairs;
      entry["failing_pairs"] = r.failing_pairs;
      entry["skipped_pairs"] = r.skipped_pairs;
      entry["denominator"] = 225;
      entry["c2_scaled"] = c2_matrix_json(r.any);
      entry["c2"] = r.any.eval(at);
      entry["c2_basis"] = {{"z", r.basis_z.eval(at)},
                           {"x", r.basis_x.eval(at)},
                           {"y", r.basis_y.eval(at)}};
      entry["class_diagonal"] = {r.any.class_diagonal(0), r.any.class_diagonal(1),
                                 r.any.class_diagonal(2)};
    }
    arr.push_back(entry);
  }
  report["protocols"] = arr;

  // The creation+verification acceptance statistics are protocol-independent
  // (one ancilla/verifier pair); report them alongside for slope checks.
  {
    Gadgets g(ProtocolKind::SimpleSeries, popts);
    AncillaEnumResult r = enumerate_ancilla_rejects(g.rounds[0].create_verify);
    nlohmann::ordered_json aj;
    aj["locations"] = r.locations;
    aj["branches"] = r.branches;
    aj["rejecting_by_kind"] = {{"prep", r.rejecting[0]},
                               {"meas", r.rejecting[1]},
                               {"wait", r.rejecting[2]},
                               {"cnot", r.rejecting[3]}};
    aj["slope"] = r.slope(at) / o.eval_p;
    report["ancilla_reject"] = aj;
  }
  std::string name = o.out;
  (void)cmd;
  write_output(name, report.dump(2) + "\n");
  return 0;
}

int cmd_validate(const Opts& o, const CLI::App* cmd) {
  uint64_t seed = cmd->count("--seed") ? o.seed : 0;
  ValidationSummary s = run_validation(o.random_circuits, seed);
  char buf[160];
  std::snprintf(buf, sizeof buf, "circuits=%llu fault_sets=%llu comparisons=%llu mismatches=%llu\n",
                static_cast<unsigned long long>(s.circuits),
                static_cast<unsigned long long>(s.fault_sets),
                static_cast<unsigned long long>(s.comparisons),
                static_cast<unsigned long long>(s.mismatches));
  write_output(o.out, buf);
  if (s.mismatches) throw ContractViolation("flip-bit mismatch between frame engine and tableau");
  return 0;
}

std::vector<double> log_axis(double from, double to, int points) {
  std::vector<double> pts;
  for (int i = 0; i < points; ++i) {
    double t = static_cast<double>(i) / (points - 1);
    pts.push_back(std::exp(std::log(from) + t * (std::log(to) - std::log(from))));
  }
  return pts;
}

int cmd_figure(const Opts& o, const CLI::App* cmd, const std::string& which) {
  CliConfig cfg = load_config(o);
  SweepRequest req = resolve_request(o, cmd, cfg);

  if (which == "compare") {
    req.grid.clear();
    for (double p : {1e-5, 2e-5, 5e-5, 1e-4}) req.grid.push_back(ErrorRates::uniform(p));
    req.protocols = {ProtocolKind::SimpleSeries, ProtocolKind::NaiveNoWait, ProtocolKind::Decoding};
    req.filters = {ClassFilter::All};
    if (!cmd->count("--target-failures") && !cfg.target_failures) req.target_failures = 100;
    if (!cmd->count("--trials") && !cfg.trials) req.max_trials = 2000000000ull;
    auto records = run_sweep(req);
    std::string csv = pivot_pl_csv(records, req.grid, req.protocols, {{"p", &ErrorRates::p_cnot}});
    write_output(o.out.empty() ? "compare.csv" : o.out, csv);
    return 0;
  }
  if (which == "class") {
    req.grid.clear();
    for (double p : {1e-5, 2e-5, 5e-5, 1e-4}) req.grid.push_back(ErrorRates::uniform(p));
    req.protocols = {ProtocolKind::SimpleSeries, ProtocolKind::NaiveNoWait, ProtocolKind::Decoding};
    req.filters = {ClassFilter::All, ClassFilter::Class0, ClassFilter::Class1, ClassFilter::Class2};
    if (!cmd->count("--target-failures") && !cfg.target_failures) req.target_failures = 50;
    if (!cmd->count("--trials") && !cfg.trials) req.max_trials = 500000000ull;
    emit_records(o, req, run_sweep(req), "class.csv");
    return 0;
  }
  if (which == "series-surface") {
    req.grid.clear();
    std::vector<double> axis = log_axis(1e-5, 3e-4, 5);
    for (double pc : axis)
      for (double pw : axis) req.grid.push_back(ErrorRates{1e-5, 1e-5, pw, pc});
    req.protocols = {ProtocolKind::TwoAncillaSeries, ProtocolKind::Decoding};
    req.filters = {ClassFilter::All};
    if (!cmd->count("--target-failures") && !cfg.target_failures) req.target_failures = 50;
    if (!cmd->count("--trials") && !cfg.trials) req.max_trials = 2000000000ull;
    auto records = run_sweep(req);
    std::string csv = pivot_pl_csv(records, req.grid, req.protocols,
                                   {{"p_cnot", &ErrorRates::p_cnot}, {"p_wait", &ErrorRates::p_wait}});
    write_output(o.out.empty() ? "series-surface.csv" : o.out, csv);
    return 0;
  }
  if (which == "ancilla-failure") {
    uint64_t attempts = req.max_trials == 1000000 ? 2000000 : req.max_trials;
    Gadgets g(ProtocolKind::SimpleSeries, req.options);
    AncillaEnumResult en = enumerate_ancilla_rejects(g.rounds[0].create_verify);
    std::string csv = "p,attempts,rejects,rate,ci_low,ci_high,predicted_rate\n";
    int idx = 0;
    for (double p : {1e-5, 2e-5, 4e-5, 8e-5}) {
      ErrorRates rates = ErrorRates::uniform(p);
      AncillaMC mc = run_ancilla_attempts(g.rounds[0].create_verify, rates, attempts,
                                          derive_key(req.master_seed, 0x616e63ull + idx), req.jobs);
      Interval ci = mc.ci();
      csv += fmt_g17(p);
      csv += ',' + std::to_string(mc.attempts) + ',' + std::to_string(mc.rejects);
      csv += ',' + fmt_g17(mc.rate()) + ',' + fmt_g17(ci.low) + ',' + fmt_g17(ci.high);
      csv += ',' + fmt_g17(en.slope(rates));
      csv += '\n';
      ++idx;
    }
    write_output(o.out.empty() ? "ancilla-failure.csv" : o.out, csv);
    return 0;
  }
  throw ConfigError("unknown figure: " + which +
                    " (expected compare, ancilla-failure, class, or series-surface)");
}

void add_common_flags(CLI::App* cmd, Opts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override it");
  cmd->add_option("--seed", o.seed, "master seed for all random streams");
  cmd->add_option("--trials", o.trials, "trial cap per grid point and basis");
  cmd->add_option("--target-failures", o.target_failures,
                  "stop a point early once this many failures accrue (0 = run the cap)");
  cmd->add_option("--protocols", o.protocols, "comma-separated protocol names")
      ->delimiter(',');
  cmd->add_option("--filter", o.filter, "error-class filter: all, class0, class1, class2");
  cmd->add_option("--out", o.out, "output file (bare names land in $STEANEFT_OUT_DIR)");
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", o.jobs, "worker threads (default: machine parallelism)");
  cmd->add_option("--rerun-cap", o.rerun_cap, "max reruns of a skipped trial before erroring");
  cmd->add_flag("--parallel-two-swap", o.two_swap,
                "route the parallel scheme's fallback ancilla through an extra SWAP");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steane-code QEC strategy comparison: Monte Carlo and exact fault enumeration"};
  app.require_subcommand(1);
  Opts o;

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo logical error rates over a grid");
  add_common_flags(sweep, o);

  CLI::App* fe = app.add_subcommand("fault-enum", "exhaustive fault enumeration report");
  add_common_flags(fe, o);
  fe->add_option("--order", o.order, "enumeration order: 1 or 2")->check(CLI::IsMember({1, 2}));
  fe->add_option("--protocol", o.protocols, "protocol name (may repeat)")->delimiter(',');
  fe->add_option("-p", o.eval_p, "uniform rate at which to evaluate coefficients");

  CLI::App* val = app.add_subcommand("validate", "frame engine vs tableau cross-check");
  add_common_flags(val, o);
  val->add_option("--random", o.random_circuits, "number of random circuits");

  CLI::App* fig = app.add_subcommand("figure", "preset plot-ready tables");
  std::string which;
  fig->add_option("name", which, "compare | ancilla-failure | class | series-surface")
      ->required();
  add_common_flags(fig, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(o, sweep);
    if (fe->parsed()) return cmd_fault_enum(o, fe);
    if (val->parsed()) return cmd_validate(o, val);
    if (fig->parsed()) return cmd_figure(o, fig, which);
  } catch (const steaneft::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const steaneft::ContractViolation& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
