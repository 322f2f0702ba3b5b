#pragma once

// Verification over finished runs: gain conditions, Lyapunov traces and
// requirement verdicts. Everything here is a pure function of its inputs.

#include <limits>
#include <vector>

#include "ppcatt/controller.hpp"
#include "ppcatt/envelope.hpp"
#include "ppcatt/simulator.hpp"

namespace ppcatt {

/// Sufficient conditions of the stability argument.
///   S1 = q_e0_floor * M_omega - 4 l_max
///   S2 = 2 K_omega - 2 K_u - 2
///   S3 = 2 K_a - 1 - K_u k2
///   S4 = min(2 C_q - C_tau, 2 C_omega - B_tau)
///   K_b residual = 2 K_b - 1 - k2 - C_tau - B_tau, required < 0
/// S1 is reported but does not gate pass(): with the default M_omega and
/// envelope rates it is negative for every reasonable q_e0 floor.
struct GainConditionReport {
  double S1{0.0};
  double S2{0.0};
  double S3{0.0};
  double S4{0.0};
  double kb_residual{0.0};
  double l_max{0.0};
  double q_e0_floor{0.0};
  bool s1_ok{false};
  bool s2_ok{false};
  bool s3_ok{false};
  bool s4_ok{false};
  bool kb_ok{false};

  bool pass() const { return s2_ok && s3_ok && s4_ok && kb_ok; }
};

/// l_max is the larger decay rate of the two nominal envelopes.
GainConditionReport check_gains(const ControllerGains& g, const NominalPpf& ppf_q,
                                const NominalPpf& ppf_omega, double q_e0_floor = 0.2);

struct LyapunovTrace {
  std::vector<double> t;
  std::vector<double> V1, V2, V3, V4, V;
  double max_V{0.0};
  /// Steps on [from, end] with V(k+1) - V(k) > tolerance and no saturation
  /// at either end. A diagnostic, not a requirement.
  std::size_t increases{0};
};

/// Recomputes V1..V4 from the logged errors and internal states.
LyapunovTrace lyapunov_trace(const SimLog& log, const ControllerGains& g, double from = 40.0,
                             double tolerance = 1e-6);

struct EventRecovery {
  double pulse_end{0.0};
  double window_end{0.0};   // next pulse start, or end of run
  double recovery{0.0};     // s from pulse end to the last violation; 0 if none
  bool recovered{true};     // inside the envelope at the end of the window
  double contained_fraction{1.0};  // over [pulse_end, window_end]
};

struct RequirementVerdict {
  double settling_time{std::numeric_limits<double>::infinity()};
  double terminal_error{0.0};
  double max_rate_deg{0.0};
  double max_torque{0.0};
  double containment_fraction{1.0};
  std::vector<EventRecovery> events;
  bool complete{false};  // log has every record and no failure

  bool settle_ok{false};
  bool terminal_ok{false};
  bool rate_ok{false};
  bool torque_ok{false};
  bool containment_ok{false};
  bool recovery_ok{false};

  bool pass() const {
    return complete && settle_ok && terminal_ok && rate_ok && torque_ok && containment_ok &&
           recovery_ok;
  }
  /// Largest recovery time over events; infinity if any event never recovers.
  double worst_recovery() const;
};

/// Whether every |q_ev,i| <= rho_q,i in the record.
bool contained(const SimRecord& r);

/// Settling ignores records inside event windows [pulse start, pulse end +
/// recovery limit]; containment is evaluated on [settle_time requirement,
/// end] outside the same windows. Recovery is judged separately per event.
RequirementVerdict verify_requirements(const SimLog& log, const Scenario& scenario);

/// Ratio of worst recovery times, disabled over enabled, with the enabled
/// time floored at dt. Infinity when only the disabled run never recovers,
/// NaN when the enabled run never recovers.
double recovery_ratio(const RequirementVerdict& enabled, const RequirementVerdict& disabled,
                      double dt);

}  // namespace ppcatt
