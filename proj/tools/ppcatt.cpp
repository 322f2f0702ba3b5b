// ppcatt: run, check and sweep attitude-tracking scenarios.
//
// Exit status: 0 when the verdict passes, 1 when it fails, 2 on errors
// (bad arguments, unreadable or incomplete config, invalid scenario).

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppcatt/batch.hpp"
#include "ppcatt/config.hpp"
#include "ppcatt/monitor.hpp"
#include "ppcatt/simulator.hpp"
#include "ppcatt/trace_io.hpp"

namespace fs = std::filesystem;
using namespace ppcatt;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

struct CommonOptions {
  std::string scenario;
  std::string config;
  std::string out{"out"};
  std::optional<double> dt;
  std::optional<double> duration;
  std::string controller;
  std::string adaptive;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out = true) {
  cmd->add_option("--scenario", o.scenario,
                  "builtin scenario: normal, robustness, comparison, compare");
  cmd->add_option("--config", o.config, "scenario file (complete key = value list)");
  if (with_out) cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--dt", o.dt, "step size override [s]");
  cmd->add_option("--duration", o.duration, "duration override [s]");
  cmd->add_option("--controller", o.controller, "proposed | benchmark")
      ->check(CLI::IsMember({"proposed", "benchmark"}));
  cmd->add_option("--adaptive-ppf", o.adaptive, "adaptive envelope on | off")
      ->check(CLI::IsMember({"on", "off"}));
}

struct Loaded {
  Scenario scenario;
  bool compare{false};
};

Loaded load(const CommonOptions& o) {
  if (!o.scenario.empty() && !o.config.empty()) {
    throw std::invalid_argument("--scenario and --config are exclusive");
  }
  Loaded l;
  if (!o.config.empty()) {
    l.scenario = load_config(o.config);
  } else {
    std::string name = o.scenario.empty() ? "normal" : o.scenario;
    if (name == "compare") {
      l.compare = true;
      name = "comparison";
    }
    const auto s = builtin_scenario(name);
    if (!s) throw std::invalid_argument("unknown builtin scenario '" + o.scenario + "'");
    l.scenario = *s;
  }
  Scenario& s = l.scenario;
  if (o.dt) s.dt = *o.dt;
  if (o.duration) s.duration = *o.duration;
  if (!o.controller.empty()) {
    if (l.compare) throw std::invalid_argument("--controller conflicts with --scenario compare");
    s.controller = *parse_controller_kind(o.controller);
  }
  if (!o.adaptive.empty()) s.adaptive_ppf = (o.adaptive == "on");
  if (auto e = s.validation_error(); !e.empty()) throw std::invalid_argument(e);
  return l;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string kv_text(const KeyValues& kv) {
  std::ostringstream ss;
  write_kv(ss, kv);
  return ss.str();
}

std::string report_text(const RunReport& r) {
  std::ostringstream ss;
  write_report_txt(ss, r);
  return ss.str();
}

int cmd_run(const CommonOptions& o) {
  const Loaded l = load(o);
  if (!l.compare) {
    // Construction errors (invalid scenario, no envelope) throw here; a run
    // that diverges is a failed verdict, not an error.
    const SimLog log = run(l.scenario);
    const RunReport rep = make_report(l.scenario, log);
    write_run_outputs(o.out, rep);
    std::cout << report_text(rep);
    return rep.verdict.pass() ? kPass : kFail;
  }

  const auto [sp, sb] = comparison_pair(l.scenario);
  const std::vector<SimLog> logs = run_batch({sp, sb});
  for (const auto& log : logs) {
    if (log.records.empty() && log.failure) throw std::runtime_error(log.failure->message);
  }
  const RunReport rp = make_report(sp, logs[0]);
  const RunReport rb = make_report(sb, logs[1]);
  fs::create_directories(o.out);
  write_trace_csv(fs::path(o.out) / "trace_proposed.csv", logs[0]);
  write_trace_csv(fs::path(o.out) / "trace_benchmark.csv", logs[1]);

  // Joint verdict: the proposed controller meets its requirements and the
  // benchmark is still outside its envelope at the end of the run.
  const bool proposed_ok = rp.verdict.pass();
  const bool benchmark_stuck =
      !rb.verdict.events.empty() && !rb.verdict.events.back().recovered;
  const bool joint = proposed_ok && benchmark_stuck;

  KeyValues kv = report_entries(rp, "proposed.");
  const KeyValues kb = report_entries(rb, "benchmark.");
  kv.insert(kv.end(), kb.begin(), kb.end());
  kv.emplace_back("compare.proposed_pass", proposed_ok ? "1" : "0");
  kv.emplace_back("compare.benchmark_unrecovered", benchmark_stuck ? "1" : "0");
  kv.emplace_back("compare.pass", joint ? "1" : "0");
  write_file(fs::path(o.out) / "report.kv", kv_text(kv));

  std::string txt = "== proposed ==\n" + report_text(rp) + "\n== benchmark ==\n" +
                    report_text(rb) + "\n== comparison ==\n";
  txt += std::string("proposed meets requirements      ") + (proposed_ok ? "yes" : "no") + "\n";
  txt += std::string("benchmark unrecovered at end     ") + (benchmark_stuck ? "yes" : "no") +
         "\n";
  txt += std::string("overall                          ") + (joint ? "PASS" : "FAIL") + "\n";
  write_file(fs::path(o.out) / "report.txt", txt);
  std::cout << txt;
  return joint ? kPass : kFail;
}

int cmd_check(const CommonOptions& o) {
  const Loaded l = load(o);
  const Scenario& s = l.scenario;
  const GainConditionReport g =
      check_gains(s.gains, NominalPpf::solve(s.ppf_q), NominalPpf::solve(s.ppf_omega),
                  s.q_e0_floor);
  std::printf("S1 = %.6g (advisory, q_e0 floor %g, l_max %g)\n", g.S1, g.q_e0_floor, g.l_max);
  std::printf("S2 = %.6g %s\n", g.S2, g.s2_ok ? "ok" : "VIOLATED");
  std::printf("S3 = %.6g %s\n", g.S3, g.s3_ok ? "ok" : "VIOLATED");
  std::printf("S4 = %.6g %s\n", g.S4, g.s4_ok ? "ok" : "VIOLATED");
  std::printf("2K_b-1-k2-C_tau-B_tau = %.6g %s\n", g.kb_residual, g.kb_ok ? "ok" : "VIOLATED");
  std::printf("%s\n", g.pass() ? "PASS" : "FAIL");
  return g.pass() ? kPass : kFail;
}

std::string dir_name(const std::string& key, const std::string& value) {
  std::string s = key + "=" + value;
  for (char& c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                    c == '_' || c == '=' || c == '+';
    if (!ok) c = '_';
  }
  return s;
}

int cmd_sweep(const CommonOptions& o, const std::string& param,
              const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  const Loaded l = load(o);
  if (l.compare) throw std::invalid_argument("sweep runs a single controller; use comparison");
  const std::string key = resolve_key(param);

  std::vector<Scenario> runs;
  for (const auto& v : values) {
    Scenario s = l.scenario;
    set_config_value(s, key, v);
    s.name = l.scenario.name + "[" + key + "=" + v + "]";
    runs.push_back(s);
  }
  const std::vector<SimLog> logs = run_batch(runs);

  fs::create_directories(o.out);
  std::ofstream index(fs::path(o.out) / "index.csv");
  if (!index) throw std::runtime_error("cannot write sweep index");
  index << "value,dir,pass,settling_time,terminal_error,max_rate_deg,containment_fraction,"
           "worst_recovery,t1_q,t1_omega,failure\n";
  bool all_pass = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string dir = dir_name(key, values[i]);
    std::string failure = logs[i].failure ? logs[i].failure->message : "";
    bool pass = false;
    std::string row;
    try {
      const RunReport rep = make_report(runs[i], logs[i]);
      write_run_outputs(fs::path(o.out) / dir, rep);
      const auto& v = rep.verdict;
      pass = v.pass();
      row = std::string(pass ? "1" : "0") + "," + format_double(v.settling_time) + "," +
            format_double(v.terminal_error) + "," + format_double(v.max_rate_deg) + "," +
            format_double(v.containment_fraction) + "," + format_double(v.worst_recovery()) +
            "," + format_double(rep.t1_q) + "," + format_double(rep.t1_omega);
    } catch (const std::exception& e) {
      // No envelope for this value: the run never started.
      failure = e.what();
      row = "0,,,,,,,";
    }
    for (char& c : failure) {
      if (c == ',' || c == '\n') c = ';';
    }
    all_pass = all_pass && pass;
    index << values[i] << "," << dir << "," << row << "," << failure << "\n";
    std::printf("%-24s %s%s%s\n", values[i].c_str(), pass ? "PASS" : "FAIL",
                failure.empty() ? "" : "  ", failure.c_str());
  }
  return all_pass ? kPass : kFail;
}

int cmd_dump(const CommonOptions& o, const std::string& path) {
  const Loaded l = load(o);
  const std::string text = dump_config(l.scenario);
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prescribed-performance attitude tracking: simulate, verify, sweep"};
  app.require_subcommand(1);

  CommonOptions run_opts, check_opts, sweep_opts, dump_opts;
  auto* run = app.add_subcommand("run", "simulate a scenario and write trace and reports");
  add_common(run, run_opts);
  auto* check = app.add_subcommand("check", "evaluate the gain conditions");
  add_common(check, check_opts, false);
  auto* sweep = app.add_subcommand("sweep", "run one scenario per value of a config key");
  add_common(sweep, sweep_opts);
  std::string param;
  std::vector<std::string> values;
  sweep->add_option("--param", param, "config key, or its unique last component")->required();
  sweep->add_option("--values", values, "values to assign")->required();
  auto* dump = app.add_subcommand("dump", "print the resolved scenario as a config file");
  add_common(dump, dump_opts, false);
  std::string dump_path;
  dump->add_option("-o,--output", dump_path, "file to write (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*check) return cmd_check(check_opts);
    if (*sweep) return cmd_sweep(sweep_opts, param, values);
    if (*dump) return cmd_dump(dump_opts, dump_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kError;
}
