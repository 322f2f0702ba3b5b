#include "ppcatt/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "ppcatt/barrier.hpp"

namespace ppcatt {

GainConditionReport check_gains(const ControllerGains& g, const NominalPpf& ppf_q,
                                const NominalPpf& ppf_omega, double q_e0_floor) {
  GainConditionReport r;
  r.l_max = std::max(ppf_q.params().l, ppf_omega.params().l);
  r.q_e0_floor = q_e0_floor;
  r.S1 = q_e0_floor * g.M_omega - 4.0 * r.l_max;
  r.S2 = 2.0 * g.K_omega - 2.0 * g.K_u - 2.0;
  r.S3 = 2.0 * g.K_a - 1.0 - g.K_u * g.k2;
  r.S4 = std::min(2.0 * g.C_q - g.C_tau, 2.0 * g.C_omega - g.B_tau);
  r.kb_residual = 2.0 * g.K_b - 1.0 - g.k2 - g.C_tau - g.B_tau;
  r.s1_ok = r.S1 > 0.0;
  r.s2_ok = r.S2 > 0.0;
  r.s3_ok = r.S3 > 0.0;
  r.s4_ok = r.S4 > 0.0;
  r.kb_ok = r.kb_residual < 0.0;
  return r;
}

LyapunovTrace lyapunov_trace(const SimLog& log, const ControllerGains& g, double from,
                             double tolerance) {
  LyapunovTrace tr;
  const std::size_t n = log.records.size();
  for (auto* v : {&tr.t, &tr.V1, &tr.V2, &tr.V3, &tr.V4, &tr.V}) v->reserve(n);
  for (const auto& r : log.records) {
    const double v1 = blf_value(r.eps_q, {g.k1, g.F1});
    const double v2 = blf_value(r.eps_omega, {g.k2, g.F2});
    const double v3 = 0.5 * r.theta.squaredNorm();
    const double v4 = 0.5 * (r.delta_rho_q.squaredNorm() + r.delta_rho_omega.squaredNorm());
    tr.t.push_back(r.t);
    tr.V1.push_back(v1);
    tr.V2.push_back(v2);
    tr.V3.push_back(v3);
    tr.V4.push_back(v4);
    tr.V.push_back(v1 + v2 + v3 + v4);
    tr.max_V = std::max(tr.max_V, tr.V.back());
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto& a = log.records[k];
    const auto& b = log.records[k + 1];
    if (a.t < from || a.saturated || b.saturated) continue;
    if (tr.V[k + 1] - tr.V[k] > tolerance) ++tr.increases;
  }
  return tr;
}

bool contained(const SimRecord& r) {
  return (r.q_ev.cwiseAbs() - r.rho_q).maxCoeff() <= 0.0;
}

double RequirementVerdict::worst_recovery() const {
  double w = 0.0;
  for (const auto& e : events) {
    if (!e.recovered) return std::numeric_limits<double>::infinity();
    w = std::max(w, e.recovery);
  }
  return w;
}

RequirementVerdict verify_requirements(const SimLog& log, const Scenario& sc) {
  const Requirements& req = sc.requirements;
  RequirementVerdict v;
  const auto& recs = log.records;
  v.complete = log.ok() && recs.size() == sc.steps() + 1;
  if (recs.empty()) return v;

  const auto& pulses = sc.disturbance.pulses;
  const auto in_event_window = [&](double t) {
    return std::any_of(pulses.begin(), pulses.end(), [&](const DisturbancePulse& p) {
      return t >= p.start && t < p.end() + req.recovery_limit;
    });
  };

  // Settling: the earliest time after which every counted record is inside
  // the threshold band.
  double settle = 0.0;
  for (const auto& r : recs) {
    if (in_event_window(r.t)) continue;
    if (r.q_ev.cwiseAbs().maxCoeff() > req.settle_threshold) settle = -1.0;
    else if (settle < 0.0) settle = r.t;
  }
  v.settling_time = settle < 0.0 ? std::numeric_limits<double>::infinity() : settle;

  const double t_end = recs.back().t;
  const double t_term = t_end - req.terminal_fraction * sc.duration;
  std::size_t counted = 0;
  std::size_t inside = 0;
  for (const auto& r : recs) {
    if (r.t >= t_term - 1e-9 * sc.dt) {
      v.terminal_error = std::max(v.terminal_error, r.q_ev.cwiseAbs().maxCoeff());
    }
    v.max_rate_deg = std::max(v.max_rate_deg, r.omega_s.cwiseAbs().maxCoeff() * kRadToDeg);
    v.max_torque = std::max(v.max_torque, r.tau.cwiseAbs().maxCoeff());
    if (r.t >= req.settle_time && !in_event_window(r.t)) {
      ++counted;
      if (contained(r)) ++inside;
    }
  }
  v.containment_fraction = counted == 0 ? 1.0 : double(inside) / double(counted);

  for (std::size_t k = 0; k < pulses.size(); ++k) {
    EventRecovery e;
    e.pulse_end = pulses[k].end();
    e.window_end = t_end;
    for (const auto& p : pulses) {
      if (p.start >= pulses[k].end() && p.start < e.window_end) e.window_end = p.start;
    }
    double last_violation = -1.0;
    std::size_t n_in = 0;
    std::size_t n_all = 0;
    bool last_inside = true;
    for (const auto& r : recs) {
      if (r.t < e.pulse_end || r.t > e.window_end) continue;
      ++n_all;
      last_inside = contained(r);
      if (last_inside) ++n_in;
      else last_violation = r.t;
    }
    e.recovered = last_inside && !(e.pulse_end > t_end);
    e.recovery = last_violation < 0.0 ? 0.0 : last_violation + sc.dt - e.pulse_end;
    if (!e.recovered) e.recovery = std::numeric_limits<double>::infinity();
    e.contained_fraction = n_all == 0 ? 1.0 : double(n_in) / double(n_all);
    v.events.push_back(e);
  }

  bool torque_exact = true;
  for (const auto& r : recs) {
    for (int i = 0; i < 3; ++i) {
      const double a = std::abs(r.tau[i]);
      if (a > sc.actuator.tau_max || (a != 0.0 && a < sc.actuator.tau_min)) torque_exact = false;
    }
  }

  v.settle_ok = v.settling_time <= req.settle_time;
  v.terminal_ok = v.terminal_error < req.terminal_error;
  v.rate_ok = v.max_rate_deg <= req.rate_limit_deg;
  v.torque_ok = torque_exact;
  v.containment_ok = v.containment_fraction >= 1.0;
  v.recovery_ok = std::all_of(v.events.begin(), v.events.end(), [&](const EventRecovery& e) {
    return e.recovered && e.recovery <= req.recovery_limit;
  });
  return v;
}

double recovery_ratio(const RequirementVerdict& enabled, const RequirementVerdict& disabled,
                      double dt) {
  const double d = disabled.worst_recovery();
  if (std::isinf(enabled.worst_recovery())) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(d)) return d;
  return d / std::max(enabled.worst_recovery(), dt);
}

}  // namespace ppcatt
