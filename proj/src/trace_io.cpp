#include "ppcatt/trace_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <type_traits>

namespace ppcatt {

namespace {

void add3(std::vector<std::string>& c, const char* name) {
  for (const char* ax : {"x", "y", "z"}) c.push_back(std::string(name) + "_" + ax);
}

// Field order shared by writer and reader.
template <class Rec, class F>
void visit(Rec& r, F&& f) {
  f(r.t);
  f(r.q_ev);
  f(r.q_e0);
  f(r.omega_s);
  f(r.omega_e);
  f(r.z2);
  f(r.eps_q);
  f(r.eps_omega);
  f(r.rho_q);
  f(r.rho_omega);
  f(r.v);
  f(r.u);
  f(r.tau);
  f(r.delta_tau);
  f(r.theta);
  f(r.d);
  f(r.delta_rho_q);
  f(r.delta_rho_omega);
  f(r.V1);
  f(r.V2);
  f(r.V3);
  f(r.V4);
  f(r.saturated);
  f(r.envelope_violated);
  f(r.singular);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto c = line.find(',', pos);
    out.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

double parse_cell(const std::string& s, std::size_t row, std::size_t col) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw TraceFormatError("row " + std::to_string(row) + ", column " +
                           trace_columns()[col] + ": bad number '" + s + "'");
  }
  return v;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }
std::string pass_fail(bool b) { return b ? "PASS" : "FAIL"; }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t"};
    add3(c, "q_ev");
    c.push_back("q_e0");
    for (const char* n : {"omega_s", "omega_e", "z2", "eps_q", "eps_omega", "rho_q",
                          "rho_omega", "v", "u", "tau", "delta_tau", "theta", "d",
                          "delta_rho_q", "delta_rho_omega"}) {
      add3(c, n);
    }
    for (const char* n : {"V1", "V2", "V3", "V4", "saturated", "envelope_violated", "singular"}) {
      c.push_back(n);
    }
    return c;
  }();
  return cols;
}

void write_trace_csv(std::ostream& out, const SimLog& log) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string line;
  char buf[32];
  for (const auto& r : log.records) {
    line.clear();
    const auto put = [&](double x) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      if (!line.empty()) line += ',';
      line += buf;
    };
    visit(r, [&](const auto& field) {
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_same_v<T, bool>) {
        line += field ? ",1" : ",0";
      } else if constexpr (std::is_same_v<T, double>) {
        put(field);
      } else {
        for (int i = 0; i < 3; ++i) put(field[i]);
      }
    });
    out << line << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const SimLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(out, log);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SimLog read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceFormatError("empty trace");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header != trace_columns()) throw TraceFormatError("unexpected trace header");
  SimLog log;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw TraceFormatError("row " + std::to_string(row) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
    }
    SimRecord r;
    std::size_t col = 0;
    visit(r, [&](auto& field) {
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_same_v<T, bool>) {
        const double v = parse_cell(cells[col], row, col);
        if (v != 0.0 && v != 1.0) {
          throw TraceFormatError("row " + std::to_string(row) + ", column " +
                                 header[col] + ": flag must be 0 or 1");
        }
        field = v == 1.0;
        ++col;
      } else if constexpr (std::is_same_v<T, double>) {
        field = parse_cell(cells[col], row, col);
        ++col;
      } else {
        for (int i = 0; i < 3; ++i, ++col) field[i] = parse_cell(cells[col], row, col);
      }
    });
    log.records.push_back(r);
  }
  if (log.records.size() >= 2) log.dt = log.records[1].t - log.records[0].t;
  return log;
}

SimLog read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_trace_csv(in);
}

RunReport make_report(const Scenario& scenario, const SimLog& log) {
  RunReport r;
  r.scenario = &scenario;
  r.log = &log;
  const NominalPpf ppf_q = NominalPpf::solve(scenario.ppf_q);
  const NominalPpf ppf_w = NominalPpf::solve(scenario.ppf_omega);
  r.t1_q = ppf_q.t1();
  r.t1_omega = ppf_w.t1();
  r.gains = check_gains(scenario.gains, ppf_q, ppf_w, scenario.q_e0_floor);
  r.verdict = verify_requirements(log, scenario);
  r.lyapunov = lyapunov_trace(log, scenario.gains);
  return r;
}

KeyValues report_entries(const RunReport& r, const std::string& prefix) {
  KeyValues kv;
  const auto put = [&](const std::string& k, const std::string& v) { kv.emplace_back(prefix + k, v); };
  const auto num = [&](const std::string& k, double v) { put(k, format_double(v)); };
  const auto flag = [&](const std::string& k, bool v) { put(k, v ? "1" : "0"); };
  const auto& v = r.verdict;
  const auto& g = r.gains;
  put("scenario", r.scenario->name);
  put("controller", to_string(r.scenario->controller));
  put("adaptive_ppf", r.scenario->adaptive_ppf ? "on" : "off");
  num("dt", r.scenario->dt);
  num("duration", r.scenario->duration);
  put("records", std::to_string(r.log->records.size()));
  flag("complete", v.complete);
  put("failure", r.log->failure ? r.log->failure->message : "");
  put("failure_step", r.log->failure ? std::to_string(r.log->failure->step) : "");
  num("ppf_q.t1", r.t1_q);
  num("ppf_omega.t1", r.t1_omega);
  num("settling_time", v.settling_time);
  num("terminal_error", v.terminal_error);
  num("max_rate_deg", v.max_rate_deg);
  num("max_torque", v.max_torque);
  num("containment_fraction", v.containment_fraction);
  put("events", std::to_string(v.events.size()));
  for (std::size_t i = 0; i < v.events.size(); ++i) {
    const auto& e = v.events[i];
    const std::string p = "event." + std::to_string(i) + ".";
    num(p + "pulse_end", e.pulse_end);
    num(p + "window_end", e.window_end);
    num(p + "recovery", e.recovery);
    flag(p + "recovered", e.recovered);
    num(p + "contained_fraction", e.contained_fraction);
  }
  num("worst_recovery", v.worst_recovery());
  flag("pass.settle", v.settle_ok);
  flag("pass.terminal", v.terminal_ok);
  flag("pass.rate", v.rate_ok);
  flag("pass.torque", v.torque_ok);
  flag("pass.containment", v.containment_ok);
  flag("pass.recovery", v.recovery_ok);
  flag("pass", v.pass());
  num("gains.S1", g.S1);
  num("gains.S2", g.S2);
  num("gains.S3", g.S3);
  num("gains.S4", g.S4);
  num("gains.kb_residual", g.kb_residual);
  num("gains.l_max", g.l_max);
  num("gains.q_e0_floor", g.q_e0_floor);
  flag("gains.s1_ok", g.s1_ok);
  flag("gains.pass", g.pass());
  num("lyapunov.max_V", r.lyapunov.max_V);
  put("lyapunov.increases", std::to_string(r.lyapunov.increases));
  return kv;
}

void write_kv(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void write_report_txt(std::ostream& out, const RunReport& r) {
  const auto& v = r.verdict;
  const auto& g = r.gains;
  const auto& req = r.scenario->requirements;
  char buf[256];
  const auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out << buf << '\n';
  };
  line("scenario     %s", r.scenario->name.c_str());
  line("controller   %s (adaptive envelope %s)", to_string(r.scenario->controller),
       r.scenario->adaptive_ppf ? "on" : "off");
  line("grid         dt = %g s, %zu records", r.scenario->dt, r.log->records.size());
  if (r.log->failure) {
    line("FAILURE      step %zu: %s", r.log->failure->step, r.log->failure->message.c_str());
  }
  line("envelopes    t1(q) = %.6f s, t1(omega) = %.6f s", r.t1_q, r.t1_omega);
  out << '\n';
  line("%-28s %-14s %-16s %s", "requirement", "value", "limit", "verdict");
  line("%-28s %-14.6g <= %-13g %s", "settling time [s]", v.settling_time, req.settle_time,
       pass_fail(v.settle_ok).c_str());
  line("%-28s %-14.6g < %-14g %s", "terminal max |q_ev|", v.terminal_error, req.terminal_error,
       pass_fail(v.terminal_ok).c_str());
  line("%-28s %-14.6g <= %-13g %s", "max rate [deg/s]", v.max_rate_deg, req.rate_limit_deg,
       pass_fail(v.rate_ok).c_str());
  line("%-28s %-14.6g <= %-13g %s", "max |tau| [N m]", v.max_torque,
       r.scenario->actuator.tau_max, pass_fail(v.torque_ok).c_str());
  line("%-28s %-14.6g = %-14g %s", "containment fraction", v.containment_fraction, 1.0,
       pass_fail(v.containment_ok).c_str());
  for (std::size_t i = 0; i < v.events.size(); ++i) {
    const auto& e = v.events[i];
    std::snprintf(buf, sizeof buf, "recovery after %.2f s [s]", e.pulse_end);
    const std::string label = buf;
    line("%-28s %-14.6g <= %-13g %s", label.c_str(), e.recovery, req.recovery_limit,
         pass_fail(e.recovered && e.recovery <= req.recovery_limit).c_str());
  }
  line("%-28s %s", "overall", pass_fail(v.pass()).c_str());
  out << '\n';
  line("gain conditions (q_e0 floor %g, l_max %g)", g.q_e0_floor, g.l_max);
  line("  S1 = %-12.6g %s (advisory)", g.S1, g.s1_ok ? "> 0" : "<= 0");
  line("  S2 = %-12.6g %s", g.S2, pass_fail(g.s2_ok).c_str());
  line("  S3 = %-12.6g %s", g.S3, pass_fail(g.s3_ok).c_str());
  line("  S4 = %-12.6g %s", g.S4, pass_fail(g.s4_ok).c_str());
  line("  2K_b-1-k2-C_tau-B_tau = %-8.6g %s", g.kb_residual, pass_fail(g.kb_ok).c_str());
  out << '\n';
  line("lyapunov     max V = %.6g, increases after 40 s: %zu", r.lyapunov.max_V,
       r.lyapunov.increases);
  line("complete     %s", yes_no(v.complete).c_str());
}

void write_run_outputs(const std::filesystem::path& dir, const RunReport& r) {
  std::filesystem::create_directories(dir);
  write_trace_csv(dir / "trace.csv", *r.log);
  {
    std::ofstream out(dir / "report.txt");
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.txt").string());
    write_report_txt(out, r);
  }
  std::ofstream out(dir / "report.kv");
  if (!out) throw std::runtime_error("cannot write " + (dir / "report.kv").string());
  write_kv(out, report_entries(r));
}

}  // namespace ppcatt
