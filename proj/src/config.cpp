#include "ppcatt/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ppcatt {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const Scenario&)> get;
  std::function<void(Scenario&, const std::string&)> set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::string tok;
  while (in >> tok) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) {
      throw ConfigError(key, key + ": not a finite number: '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_n(const std::string& key, const std::string& text, std::size_t n) {
  auto v = parse_numbers(key, text);
  if (v.size() != n) {
    throw ConfigError(key, key + ": expected " + std::to_string(n) + " numbers, got " +
                               std::to_string(v.size()));
  }
  return v;
}

std::string fmt_vec(const double* p, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += fmt_num(p[i]);
  }
  return s;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError(key, key + ": expected on/off, got '" + text + "'");
}

std::string fmt_quat(const UnitQuaternion& q) {
  const double c[4] = {q.vec()[0], q.vec()[1], q.vec()[2], q.scalar()};
  return fmt_vec(c, 4);
}

UnitQuaternion parse_quat(const std::string& key, const std::string& text) {
  const auto v = parse_n(key, text, 4);
  const Vec3 vec(v[0], v[1], v[2]);
  if (vec.squaredNorm() + v[3] * v[3] == 0.0) {
    throw ConfigError(key, key + ": zero quaternion");
  }
  return UnitQuaternion::raw(vec, v[3]);
}

std::string fmt_pulses(const std::vector<DisturbancePulse>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) s += "; ";
    s += fmt_num(ps[i].start) + " " + fmt_num(ps[i].duration) + " " +
         fmt_num(ps[i].amplitude[0]) + " " + fmt_num(ps[i].amplitude[1]) + " " +
         fmt_num(ps[i].amplitude[2]);
  }
  return s;
}

std::vector<DisturbancePulse> parse_pulses(const std::string& key, const std::string& text) {
  std::vector<DisturbancePulse> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(';', pos);
    const std::string item = trim(text.substr(pos, next == std::string::npos ? next : next - pos));
    if (!item.empty()) {
      const auto v = parse_n(key, item, 5);
      out.push_back({v[0], v[1], Vec3(v[2], v[3], v[4])});
    } else if (next != std::string::npos) {
      throw ConfigError(key, key + ": empty pulse entry");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// Field builders. Each binds a key to a member reached through `ref`.
template <class Ref>
Field num(std::string key, Ref ref) {
  return {key, [ref](const Scenario& s) { return fmt_num(ref(s)); },
          [ref, key](Scenario& s, const std::string& v) { ref(s) = parse_n(key, v, 1)[0]; }};
}

template <class Ref>
Field vec3(std::string key, Ref ref) {
  return {key,
          [ref](const Scenario& s) { return fmt_vec(ref(s).data(), 3); },
          [ref, key](Scenario& s, const std::string& v) {
            const auto x = parse_n(key, v, 3);
            ref(s) = Vec3(x[0], x[1], x[2]);
          }};
}

template <class Ref>
Field flag(std::string key, Ref ref) {
  return {key, [ref](const Scenario& s) { return ref(s) ? "on" : "off"; },
          [ref, key](Scenario& s, const std::string& v) { ref(s) = parse_bool(key, v); }};
}

template <class Ref>
Field quat(std::string key, Ref ref) {
  return {key, [ref](const Scenario& s) { return fmt_quat(ref(s)); },
          [ref, key](Scenario& s, const std::string& v) { ref(s) = parse_quat(key, v); }};
}

void add_ppf(std::vector<Field>& f, const std::string& p,
             NominalPpfParams Scenario::*member) {
  f.push_back(num(p + ".rho_e0", [member](auto& s) -> auto& { return (s.*member).rho_e0; }));
  f.push_back(
      num(p + ".rho_einf", [member](auto& s) -> auto& { return (s.*member).rho_einf; }));
  f.push_back(num(p + ".l", [member](auto& s) -> auto& { return (s.*member).l; }));
  f.push_back(num(p + ".t2", [member](auto& s) -> auto& { return (s.*member).t2; }));
  f.push_back(num(p + ".g_inf", [member](auto& s) -> auto& { return (s.*member).g_inf; }));
}

std::vector<Field> build_fields() {
  std::vector<Field> f;
#define PPCATT_NUM(key, expr) f.push_back(num(key, [](auto& s) -> auto& { return expr; }))
#define PPCATT_VEC(key, expr) f.push_back(vec3(key, [](auto& s) -> auto& { return expr; }))
#define PPCATT_FLAG(key, expr) f.push_back(flag(key, [](auto& s) -> auto& { return expr; }))

  f.push_back({"scenario.name", [](const Scenario& s) { return s.name; },
               [](Scenario& s, const std::string& v) {
                 if (v.empty()) throw ConfigError("scenario.name", "scenario.name: empty");
                 s.name = v;
               }});
  PPCATT_NUM("scenario.duration", s.duration);
  PPCATT_NUM("scenario.dt", s.dt);
  f.push_back({"scenario.controller",
               [](const Scenario& s) { return std::string(to_string(s.controller)); },
               [](Scenario& s, const std::string& v) {
                 const auto k = parse_controller_kind(v);
                 if (!k) {
                   throw ConfigError("scenario.controller",
                                     "scenario.controller: expected proposed, benchmark or "
                                     "open_loop, got '" + v + "'");
                 }
                 s.controller = *k;
               }});
  PPCATT_FLAG("scenario.adaptive_ppf", s.adaptive_ppf);
  PPCATT_FLAG("scenario.renormalize", s.renormalize);
  PPCATT_FLAG("scenario.random_initial_attitude", s.random_initial_attitude);
  f.push_back({"scenario.seed", [](const Scenario& s) { return std::to_string(s.seed); },
               [](Scenario& s, const std::string& v) {
                 char* end = nullptr;
                 errno = 0;
                 const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
                 if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno) {
                   throw ConfigError("scenario.seed", "scenario.seed: not an unsigned integer");
                 }
                 s.seed = x;
               }});

  f.push_back(quat("initial.q_s", [](auto& s) -> auto& { return s.initial.q_s; }));
  PPCATT_VEC("initial.omega_s", s.initial.omega_s);
  f.push_back(quat("initial.q_d", [](auto& s) -> auto& { return s.initial.q_d; }));

  f.push_back({"plant.inertia",
               [](const Scenario& s) {
                 double c[9];
                 for (int r = 0; r < 3; ++r)
                   for (int k = 0; k < 3; ++k) c[3 * r + k] = s.inertia(r, k);
                 return fmt_vec(c, 9);
               },
               [](Scenario& s, const std::string& v) {
                 const auto x = parse_n("plant.inertia", v, 9);
                 for (int r = 0; r < 3; ++r)
                   for (int k = 0; k < 3; ++k) s.inertia(r, k) = x[3 * r + k];
               }});

  PPCATT_NUM("actuator.tau_max", s.actuator.tau_max);
  PPCATT_NUM("actuator.tau_min", s.actuator.tau_min);

  PPCATT_FLAG("disturbance.continuous", s.disturbance.continuous_enabled);
  PPCATT_NUM("disturbance.scale", s.disturbance.scale);
  PPCATT_NUM("disturbance.omega_p", s.disturbance.omega_p);
  PPCATT_VEC("disturbance.sin_amp", s.disturbance.sin_amp);
  PPCATT_VEC("disturbance.sin_mult", s.disturbance.sin_mult);
  PPCATT_VEC("disturbance.cos_amp", s.disturbance.cos_amp);
  PPCATT_VEC("disturbance.cos_mult", s.disturbance.cos_mult);
  PPCATT_VEC("disturbance.offset", s.disturbance.offset);
  f.push_back({"disturbance.pulses",
               [](const Scenario& s) { return fmt_pulses(s.disturbance.pulses); },
               [](Scenario& s, const std::string& v) {
                 s.disturbance.pulses = parse_pulses("disturbance.pulses", v);
               }});

  add_ppf(f, "ppf_q", &Scenario::ppf_q);
  add_ppf(f, "ppf_omega", &Scenario::ppf_omega);

  PPCATT_NUM("gains.k", s.gains.k);
  PPCATT_NUM("gains.M_omega", s.gains.M_omega);
  PPCATT_NUM("gains.beta", s.gains.beta);
  PPCATT_NUM("gains.k1", s.gains.k1);
  PPCATT_NUM("gains.k2", s.gains.k2);
  PPCATT_NUM("gains.F1", s.gains.F1);
  PPCATT_NUM("gains.F2", s.gains.F2);
  PPCATT_NUM("gains.K_omega", s.gains.K_omega);
  PPCATT_NUM("gains.K_u", s.gains.K_u);
  PPCATT_NUM("gains.K_a", s.gains.K_a);
  PPCATT_NUM("gains.K_b", s.gains.K_b);
  PPCATT_NUM("gains.C_q", s.gains.C_q);
  PPCATT_NUM("gains.C_tau", s.gains.C_tau);
  PPCATT_NUM("gains.C_omega", s.gains.C_omega);
  PPCATT_NUM("gains.B_tau", s.gains.B_tau);
  PPCATT_NUM("gains.c_tau", s.gains.c_tau);
  PPCATT_VEC("gains.mu", s.gains.mu);
  PPCATT_NUM("gains.sigma", s.gains.sigma);
  PPCATT_NUM("gains.D_m", s.gains.D_m);
  PPCATT_NUM("gains.T_f", s.gains.T_f);
  PPCATT_NUM("gains.eps_theta", s.gains.eps_theta);

  PPCATT_NUM("benchmark.k_q", s.benchmark.k_q);
  PPCATT_NUM("benchmark.K_rate", s.benchmark.K_rate);
  PPCATT_NUM("benchmark.T_f", s.benchmark.T_f);

  PPCATT_NUM("requirements.settle_threshold", s.requirements.settle_threshold);
  PPCATT_NUM("requirements.settle_time", s.requirements.settle_time);
  PPCATT_NUM("requirements.terminal_error", s.requirements.terminal_error);
  PPCATT_NUM("requirements.terminal_fraction", s.requirements.terminal_fraction);
  PPCATT_NUM("requirements.rate_limit_deg", s.requirements.rate_limit_deg);
  PPCATT_NUM("requirements.recovery_limit", s.requirements.recovery_limit);
  PPCATT_NUM("monitor.q_e0_floor", s.q_e0_floor);

#undef PPCATT_NUM
#undef PPCATT_VEC
#undef PPCATT_FLAG
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = build_fields();
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(key, "unknown key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

std::string resolve_key(std::string_view name) {
  const std::string n(name);
  std::vector<std::string> hits;
  for (const auto& k : config_keys()) {
    if (k == n) return k;
    const auto dot = k.rfind('.');
    if (k.compare(dot + 1, std::string::npos, n) == 0) hits.push_back(k);
  }
  if (hits.size() == 1) return hits.front();
  if (hits.empty()) throw ConfigError(n, "unknown key '" + n + "'");
  std::string msg = "ambiguous key '" + n + "':";
  for (const auto& h : hits) msg += " " + h;
  throw ConfigError(n, msg);
}

std::string get_config_value(const Scenario& s, const std::string& key) {
  return field(key).get(s);
}

void set_config_value(Scenario& s, const std::string& key, const std::string& value) {
  field(key).set(s, trim(value));
}

Scenario parse_config(std::string_view text, const std::string& source) {
  Scenario s;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", where + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", where + "expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (seen.count(key)) {
      throw ConfigError(key, where + "duplicate key '" + key + "' (first on line " +
                                 std::to_string(seen[key]) + ")");
    }
    seen[key] = lineno;
    try {
      set_config_value(s, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), where + e.what());
    }
  }
  for (const auto& k : config_keys()) {
    if (!seen.count(k)) throw ConfigError(k, source + ": missing key '" + k + "'");
  }
  return s;
}

Scenario load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string dump_config(const Scenario& s) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(s) + "\n";
  return out;
}

}  // namespace ppcatt
