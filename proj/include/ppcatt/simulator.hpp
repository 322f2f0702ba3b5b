#pragma once

// Fixed-step closed-loop simulation.
//
// Each step evaluates the controller once at t_n (zero-order hold), applies
// the actuator model, and advances the plant with one RK4 step holding tau.
// The adaptive envelopes and the auxiliary state are sampled-data controller
// states: their laws are frozen at t_n and integrated exactly over the step,
// which keeps them stable when xi = 1/rho_omega is large. Quaternions are
// renormalized after the step.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ppcatt/controller.hpp"
#include "ppcatt/dynamics.hpp"
#include "ppcatt/envelope.hpp"

namespace ppcatt {

enum class ControllerKind { proposed, benchmark, open_loop };

const char* to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(const std::string& s);

/// Pass/fail thresholds evaluated on a finished run.
struct Requirements {
  double settle_threshold{5e-3};  // |q_ev,i| bound to settle into
  double settle_time{60.0};       // s
  double terminal_error{5e-4};    // over the terminal window
  double terminal_fraction{0.1};  // terminal window as a fraction of the run
  double rate_limit_deg{3.0};     // deg/s, on max_i |omega_s,i|
  double recovery_limit{20.0};    // s after each pulse end
};

struct Scenario {
  std::string name{"custom"};
  double duration{120.0};  // s
  double dt{0.01};         // s
  PlantState initial;
  bool random_initial_attitude{false};  // draw q_s(0) from seed
  std::uint64_t seed{0};
  Mat3 inertia{Vec3(2.8, 2.5, 1.9).asDiagonal()};
  ControllerGains gains;
  BenchmarkGains benchmark;
  NominalPpfParams ppf_q;
  NominalPpfParams ppf_omega{0.08, 1e-6, 0.15, 40.0, 3e-5};
  DisturbanceModel disturbance;
  ActuatorModel actuator;
  ControllerKind controller{ControllerKind::proposed};
  bool adaptive_ppf{true};
  bool renormalize{true};
  Requirements requirements;
  double q_e0_floor{0.2};  // lower bound on |q_e0| assumed by the gain check

  /// Empty when valid; otherwise names the offending field.
  std::string validation_error() const;
  std::size_t steps() const;
};

/// Integration state shared by plant and controller internals.
struct SimState {
  PlantState plant;
  Vec3 delta_rho_q{Vec3::Zero()};
  Vec3 delta_rho_omega{Vec3::Zero()};
  Vec3 theta{Vec3::Zero()};
};

using PackedState = Eigen::Matrix<double, 20, 1>;
PackedState pack(const SimState& s);
SimState unpack(const PackedState& x);

struct SimRecord {
  double t{0.0};
  Vec3 q_ev{Vec3::Zero()};
  double q_e0{1.0};
  Vec3 omega_s{Vec3::Zero()};
  Vec3 omega_e{Vec3::Zero()};
  Vec3 z2{Vec3::Zero()};
  Vec3 eps_q{Vec3::Zero()};
  Vec3 eps_omega{Vec3::Zero()};
  Vec3 rho_q{Vec3::Zero()};
  Vec3 rho_omega{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Vec3 u{Vec3::Zero()};
  Vec3 tau{Vec3::Zero()};
  Vec3 delta_tau{Vec3::Zero()};
  Vec3 theta{Vec3::Zero()};
  Vec3 d{Vec3::Zero()};
  Vec3 delta_rho_q{Vec3::Zero()};
  Vec3 delta_rho_omega{Vec3::Zero()};
  double V1{0.0};
  double V2{0.0};
  double V3{0.0};
  double V4{0.0};
  bool saturated{false};
  bool envelope_violated{false};
  bool singular{false};

  bool operator==(const SimRecord&) const = default;
};

struct SimFailure {
  std::size_t step{0};
  std::string message;
};

struct SimLog {
  std::string scenario;
  ControllerKind controller{ControllerKind::proposed};
  double dt{0.01};
  std::vector<SimRecord> records;
  std::optional<SimFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Stateful single run. Not thread-safe; independent instances are.
class Simulation {
 public:
  /// Throws std::invalid_argument for invalid scenarios and NoPpfSolution
  /// when an envelope cannot be constructed.
  explicit Simulation(const Scenario& scenario);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  const SimState& state() const { return state_; }
  double time() const;
  std::size_t step_index() const { return step_; }

  /// Evaluates the controller at the current state and latches the
  /// actuator output for the next integrate() call.
  SimRecord evaluate();

  /// One RK4 step with the latched torque.
  void integrate();

 private:
  struct Controllers;
  Scenario scenario_;
  InertiaModel J_;
  std::unique_ptr<Controllers> ctl_;
  SimState state_;
  std::size_t step_{0};
  Vec3 tau_{Vec3::Zero()};
  Vec3 delta_tau_{Vec3::Zero()};
};

/// Deterministic full run from t = 0 to duration inclusive.
SimLog run(const Scenario& scenario);

/// Convenience: one RK4 step from state at t with scenario-level settings
/// and a fixed (tau, Delta_tau); controller-internal states are advanced
/// with the proposed controller's laws.
SimState step(const SimState& state, double t, const Scenario& scenario, const Vec3& tau,
              const Vec3& delta_tau);

/// Reference campaigns: "normal", "robustness", "comparison".
std::vector<Scenario> builtin_scenarios();
std::optional<Scenario> builtin_scenario(const std::string& name);

/// The comparison campaign run with both controllers on identical plants.
std::pair<Scenario, Scenario> comparison_pair(const Scenario& base);

/// Reference initial conditions and envelope parameter tables.
PlantState reference_initial_state();
NominalPpfParams reference_attitude_envelope();
NominalPpfParams reference_rate_envelope_table();
NominalPpfParams default_rate_envelope();

/// Gains used by the builtin scenarios: the default set with a larger
/// regularizer sigma and a slower, gentler attitude-envelope adaptation
/// (C_q = 0.3, C_tau = 0.5) so the widened envelope outlasts the
/// post-pulse transient.
ControllerGains campaign_gains();

}  // namespace ppcatt
