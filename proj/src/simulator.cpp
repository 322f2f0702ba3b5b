#include "ppcatt/simulator.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ppcatt/barrier.hpp"
#include "ppcatt/rk4.hpp"

namespace ppcatt {

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::proposed: return "proposed";
    case ControllerKind::benchmark: return "benchmark";
    case ControllerKind::open_loop: return "open_loop";
  }
  return "?";
}

std::optional<ControllerKind> parse_controller_kind(const std::string& s) {
  if (s == "proposed") return ControllerKind::proposed;
  if (s == "benchmark") return ControllerKind::benchmark;
  if (s == "open_loop") return ControllerKind::open_loop;
  return std::nullopt;
}

std::string Scenario::validation_error() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) return "scenario.dt must be positive";
  if (!(duration >= dt) || !std::isfinite(duration)) return "scenario.duration must be >= dt";
  if (auto e = ppf_q.validation_error(); !e.empty()) return "ppf_q: " + e;
  if (auto e = ppf_omega.validation_error(); !e.empty()) return "ppf_omega: " + e;
  if (!(actuator.tau_min >= 0.0) || !(actuator.tau_max > actuator.tau_min)) {
    return "actuator: need 0 <= tau_min < tau_max";
  }
  if (!(gains.T_f > 0.0)) return "gains.T_f must be positive";
  if (!(gains.mu.minCoeff() > 0.0)) return "gains.mu must be positive";
  if (!(gains.sigma > 0.0)) return "gains.sigma must be positive";
  if (!(gains.F1 > 0.0) || !(gains.F2 > 0.0)) return "gains.F1/F2 must be positive";
  if (!(benchmark.T_f > 0.0)) return "benchmark.T_f must be positive";
  for (const auto& p : disturbance.pulses) {
    if (!(p.duration > 0.0)) return "disturbance pulse duration must be positive";
  }
  return {};
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

PackedState pack(const SimState& s) {
  PackedState x;
  x.segment<3>(0) = s.plant.q_s.vec();
  x[3] = s.plant.q_s.scalar();
  x.segment<3>(4) = s.plant.omega_s;
  x.segment<3>(7) = s.plant.q_d.vec();
  x[10] = s.plant.q_d.scalar();
  x.segment<3>(11) = s.delta_rho_q;
  x.segment<3>(14) = s.delta_rho_omega;
  x.segment<3>(17) = s.theta;
  return x;
}

SimState unpack(const PackedState& x) {
  SimState s;
  s.plant.q_s = UnitQuaternion::raw(x.segment<3>(0), x[3]);
  s.plant.omega_s = x.segment<3>(4);
  s.plant.q_d = UnitQuaternion::raw(x.segment<3>(7), x[10]);
  s.delta_rho_q = x.segment<3>(11);
  s.delta_rho_omega = x.segment<3>(14);
  s.theta = x.segment<3>(17);
  return s;
}

namespace {

PackedState pack_rates(const PlantDerivative& p) {
  PackedState x = PackedState::Zero();
  x.segment<3>(0) = p.q_s.vec;
  x[3] = p.q_s.scalar;
  x.segment<3>(4) = p.omega_s;
  x.segment<3>(7) = p.q_d.vec;
  x[10] = p.q_d.scalar;
  return x;
}

// Plant: RK4 with tau held. Controller internals: sampled laws advanced
// exactly over the step.
SimState integrate_once(const SimState& s0, double t, double dt, const Scenario& sc,
                        const InertiaModel& J, const ProposedController* internals,
                        const Vec3& tau, const Vec3& delta_tau) {
  const auto rhs = [&](double ts, const PackedState& x) {
    const SimState s = unpack(x);
    const DesiredRate dr = desired_trajectory(ts);
    const Vec3 d = disturbance(ts, sc.disturbance);
    return pack_rates(plant_derivative(s.plant, tau, d, J, dr.omega_d, dr.omega_d_dot));
  };
  SimState s1 = unpack(rk4_step(rhs, t, pack(s0), dt));
  if (internals != nullptr) {
    const InternalLaws laws =
        internals->internal_laws(t, s0.delta_rho_omega, s0.theta, delta_tau);
    s1.delta_rho_q = laws.delta_rho_q.advance(s0.delta_rho_q, dt);
    s1.delta_rho_omega = laws.delta_rho_omega.advance(s0.delta_rho_omega, dt);
    s1.theta = laws.theta.advance(s0.theta, dt);
  }
  if (sc.renormalize && s1.plant.q_s.vec().allFinite() && std::isfinite(s1.plant.q_s.scalar()) &&
      s1.plant.q_d.vec().allFinite() && std::isfinite(s1.plant.q_d.scalar())) {
    s1.plant.q_s = s1.plant.q_s.normalized();
    s1.plant.q_d = s1.plant.q_d.normalized();
  }
  return s1;
}

bool finite(const SimState& s) {
  return pack(s).allFinite();
}

bool finite(const SimRecord& r) {
  return r.q_ev.allFinite() && std::isfinite(r.q_e0) && r.omega_s.allFinite() &&
         r.u.allFinite() && r.tau.allFinite() && r.rho_q.allFinite() && r.theta.allFinite() &&
         r.v.allFinite() && r.z2.allFinite();
}

UnitQuaternion random_attitude(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  return UnitQuaternion(Vec3(n(rng), n(rng), n(rng)), n(rng));
}

}  // namespace

struct Simulation::Controllers {
  std::optional<NominalPpf> ppf_q;
  std::optional<ProposedController> proposed;
  std::optional<BenchmarkController> benchmark;
};

Simulation::Simulation(const Scenario& scenario)
    : scenario_(scenario),
      J_(scenario.inertia),
      ctl_(std::make_unique<Controllers>()) {
  if (auto e = scenario.validation_error(); !e.empty()) {
    throw std::invalid_argument("invalid scenario: " + e);
  }
  const NominalPpf ppf_q = NominalPpf::solve(scenario.ppf_q);
  ctl_->ppf_q = ppf_q;
  switch (scenario.controller) {
    case ControllerKind::proposed:
      ctl_->proposed.emplace(scenario.gains, ppf_q, NominalPpf::solve(scenario.ppf_omega), J_,
                             scenario.adaptive_ppf);
      break;
    case ControllerKind::benchmark:
      ctl_->benchmark.emplace(scenario.benchmark, ppf_q, J_);
      break;
    case ControllerKind::open_loop:
      break;
  }
  state_.plant = scenario.initial;
  if (scenario.random_initial_attitude) state_.plant.q_s = random_attitude(scenario.seed);
  state_.plant.q_s = state_.plant.q_s.normalized();
  state_.plant.q_d = state_.plant.q_d.normalized();
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

double Simulation::time() const { return static_cast<double>(step_) * scenario_.dt; }

SimRecord Simulation::evaluate() {
  const double t = time();
  ControlInputs in;
  in.t = t;
  in.dt = scenario_.dt;
  in.plant = state_.plant;
  in.desired = desired_trajectory(t);
  in.delta_rho_q = state_.delta_rho_q;
  in.delta_rho_omega = state_.delta_rho_omega;
  in.theta = state_.theta;
  in.last_delta_tau = delta_tau_;

  ControlOutput out;
  if (ctl_->proposed) {
    out = ctl_->proposed->compute(in);
  } else if (ctl_->benchmark) {
    out = ctl_->benchmark->compute(in);
  } else {
    const ErrorState err = error_state(in.plant, in.desired.omega_d);
    out.q_e = err.q_e;
    out.omega_e = err.omega_e;
    out.rho_q = Vec3::Constant(ctl_->ppf_q->eval(t).rho);
    out.eps_q = err.q_e.vec().cwiseQuotient(out.rho_q);
  }
  const Actuation act = actuate(out.u, scenario_.actuator);
  tau_ = act.tau;
  delta_tau_ = act.delta_tau;

  SimRecord r;
  r.t = t;
  r.q_ev = out.q_e.vec();
  r.q_e0 = out.q_e.scalar();
  r.omega_s = state_.plant.omega_s;
  r.omega_e = out.omega_e;
  r.z2 = out.z2;
  r.eps_q = out.eps_q;
  r.eps_omega = out.eps_omega;
  r.rho_q = out.rho_q;
  r.rho_omega = out.rho_omega;
  r.v = out.v;
  r.u = out.u;
  r.tau = act.tau;
  r.delta_tau = act.delta_tau;
  r.theta = state_.theta;
  r.d = disturbance(t, scenario_.disturbance);
  r.delta_rho_q = state_.delta_rho_q;
  r.delta_rho_omega = state_.delta_rho_omega;
  r.V1 = blf_value(out.eps_q, {scenario_.gains.k1, scenario_.gains.F1});
  r.V2 = blf_value(out.eps_omega, {scenario_.gains.k2, scenario_.gains.F2});
  r.V3 = 0.5 * state_.theta.squaredNorm();
  r.V4 = 0.5 * (state_.delta_rho_q.squaredNorm() + state_.delta_rho_omega.squaredNorm());
  r.saturated = (out.u.cwiseAbs().maxCoeff() > scenario_.actuator.tau_max);
  r.envelope_violated = ((r.q_ev.cwiseAbs() - r.rho_q).maxCoeff() > 0.0);
  r.singular = out.singular;
  return r;
}

void Simulation::integrate() {
  const ProposedController* internals = ctl_->proposed ? &*ctl_->proposed : nullptr;
  state_ = integrate_once(state_, time(), scenario_.dt, scenario_, J_, internals, tau_,
                          delta_tau_);
  ++step_;
}

SimLog run(const Scenario& scenario) {
  SimLog log;
  log.scenario = scenario.name;
  log.controller = scenario.controller;
  log.dt = scenario.dt;
  Simulation sim(scenario);
  const std::size_t n = scenario.steps();
  log.records.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    SimRecord rec;
    try {
      rec = sim.evaluate();
    } catch (const std::exception& e) {
      log.failure = SimFailure{i, e.what()};
      break;
    }
    if (!finite(rec)) {
      log.failure = SimFailure{i, "non-finite signal in controller output"};
      break;
    }
    log.records.push_back(rec);
    if (i == n) break;
    sim.integrate();
    if (!finite(sim.state())) {
      log.failure = SimFailure{i + 1, "non-finite state after integration"};
      break;
    }
  }
  return log;
}

SimState step(const SimState& state, double t, const Scenario& scenario, const Vec3& tau,
              const Vec3& delta_tau) {
  const InertiaModel J(scenario.inertia);
  if (scenario.controller == ControllerKind::proposed) {
    const ProposedController internals(scenario.gains, NominalPpf::solve(scenario.ppf_q),
                                       NominalPpf::solve(scenario.ppf_omega), J,
                                       scenario.adaptive_ppf);
    return integrate_once(state, t, scenario.dt, scenario, J, &internals, tau, delta_tau);
  }
  return integrate_once(state, t, scenario.dt, scenario, J, nullptr, tau, delta_tau);
}

PlantState reference_initial_state() {
  PlantState s;
  s.q_s = UnitQuaternion::from_components(0.1554, 0.4271, 0.4792, 0.7509);
  s.omega_s = Vec3::Zero();
  s.q_d = UnitQuaternion::from_components(0.2, -0.5, -0.5, -0.6782);
  return s;
}

NominalPpfParams reference_attitude_envelope() {
  return {.rho_e0 = 1.0, .rho_einf = 1e-4, .l = 0.05, .t2 = 60.0, .g_inf = 5e-3};
}

NominalPpfParams reference_rate_envelope_table() {
  return {.rho_e0 = 0.08, .rho_einf = 1e-6, .l = 0.5, .t2 = 40.0, .g_inf = 3e-5};
}

NominalPpfParams default_rate_envelope() {
  // The tabulated rate envelope has no connection instant; l is lowered
  // until one exists with margin, everything else kept.
  NominalPpfParams p = reference_rate_envelope_table();
  p.l = 0.15;
  return p;
}

ControllerGains campaign_gains() {
  ControllerGains g;
  g.sigma = 1e-2;
  g.C_q = 0.3;
  g.C_tau = 0.5;
  return g;
}

std::vector<Scenario> builtin_scenarios() {
  Scenario normal;
  normal.name = "normal";
  normal.initial = reference_initial_state();
  normal.ppf_q = reference_attitude_envelope();
  normal.ppf_omega = default_rate_envelope();
  normal.gains = campaign_gains();
  normal.disturbance = DisturbanceModel::reference();

  Scenario robust = normal;
  robust.name = "robustness";
  robust.disturbance.pulses = {{20.0, 0.1, Vec3::Constant(0.5)}, {80.0, 0.1, Vec3::Constant(0.8)}};
  // Past a late pulse the terminal window holds the tail of the recovery;
  // the settled band is the requirement there.
  robust.requirements.terminal_error = robust.requirements.settle_threshold;

  Scenario comparison = normal;
  comparison.name = "comparison";
  comparison.disturbance.pulses = {{80.0, 0.1, Vec3::Constant(0.8)}};
  comparison.requirements = robust.requirements;

  return {normal, robust, comparison};
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

std::pair<Scenario, Scenario> comparison_pair(const Scenario& base) {
  Scenario a = base;
  a.controller = ControllerKind::proposed;
  Scenario b = base;
  b.controller = ControllerKind::benchmark;
  b.name = base.name + "-benchmark";
  a.name = base.name + "-proposed";
  return {a, b};
}

}  // namespace ppcatt
