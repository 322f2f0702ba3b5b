#include "ppcatt/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ppcatt {

namespace {

constexpr double kBracketMargin = 1e-6;  // s
constexpr double kRootTolerance = 1e-12; // s
constexpr int kMaxBisections = 200;

}  // namespace

std::string NominalPpfParams::validation_error() const {
  const auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(rho_e0) || !finite(rho_einf) || !finite(l) || !finite(t2) || !finite(g_inf)) {
    return "envelope parameters must be finite";
  }
  if (!(g_inf > 0.0)) return "g_inf must be positive";
  if (!(rho_e0 > g_inf)) return "rho_e0 must exceed g_inf";
  if (!(rho_einf > 0.0)) return "rho_einf must be positive";
  if (!(l > 0.0)) return "l must be positive";
  if (!(t2 > 2.0 * kBracketMargin)) return "t2 must be positive";
  return {};
}

double connection_condition(const NominalPpfParams& p, double t1) {
  const double amp = (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t1);
  return (0.5 * p.l * (p.t2 - t1) - 1.0) * amp - p.rho_einf + p.g_inf;
}

NominalPpf::NominalPpf(const NominalPpfParams& p, double t1) : params_(p), t1_(t1) {
  // Slope match at t1 with a vertex at t2: rho_p = g_inf + a1 (t - t2)^2.
  const double amp = (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t1);
  a1_ = p.l * amp / (2.0 * (p.t2 - t1));
  a2_ = -2.0 * a1_ * p.t2;
  a3_ = p.g_inf + a1_ * p.t2 * p.t2;
}

NominalPpf NominalPpf::solve(const NominalPpfParams& p) {
  if (auto err = p.validation_error(); !err.empty()) {
    throw NoPpfSolution("invalid envelope parameters: " + err);
  }
  // The condition decreases up to t2 - 1/l and increases after it, so
  // [margin, t_min] and [t_min, t2 - margin] each hold at most one root.
  // The earlier one is taken.
  const double a = kBracketMargin;
  const double b = p.t2 - kBracketMargin;
  const double t_min = std::clamp(p.t2 - 1.0 / p.l, a, b);
  const double f_a = connection_condition(p, a);
  const double f_m = connection_condition(p, t_min);
  const double f_b = connection_condition(p, b);
  if (f_a == 0.0) return NominalPpf(p, a);
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  if ((f_a > 0.0) != (f_m > 0.0)) {
    lo = a;
    hi = t_min;
    f_lo = f_a;
  } else if (f_m != 0.0 && (f_m > 0.0) != (f_b > 0.0)) {
    lo = t_min;
    hi = b;
    f_lo = f_m;
  } else {
    std::ostringstream os;
    os.precision(6);
    os << "no connection instant in (0, t2): condition has no sign change (f(0+) = " << f_a
       << ", min f = " << f_m << " at t = " << t_min << ", f(t2-) = " << f_b << ")";
    throw NoPpfSolution(os.str());
  }
  for (int i = 0; i < kMaxBisections && hi - lo > kRootTolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = connection_condition(p, mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double t1 = 0.5 * (lo + hi);
  if (!(t1 < p.t2 - kBracketMargin)) {
    throw NoPpfSolution("connection instant t1 >= t2 (degenerate envelope)");
  }
  return NominalPpf(p, t1);
}

NominalPpf solve_nominal(const NominalPpfParams& params) { return NominalPpf::solve(params); }

PpfSample NominalPpf::eval(double t) const {
  const auto& p = params_;
  if (t < t1_) {
    const double amp = (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t);
    return {amp + p.rho_einf, -p.l * amp};
  }
  if (t < p.t2) {
    return {(a1_ * t + a2_) * t + a3_, 2.0 * a1_ * t + a2_};
  }
  return {p.g_inf, 0.0};
}

ConnectionResiduals NominalPpf::residuals() const {
  const auto& p = params_;
  const double amp = (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t1_);
  const double rho_e = amp + p.rho_einf;
  const double rho_e_dot = -p.l * amp;
  const auto parabola = [&](double t) { return (a1_ * t + a2_) * t + a3_; };
  const auto parabola_dot = [&](double t) { return 2.0 * a1_ * t + a2_; };
  return {std::abs(rho_e - parabola(t1_)), std::abs(rho_e_dot - parabola_dot(t1_)),
          std::abs(parabola(p.t2) - p.g_inf), std::abs(parabola_dot(p.t2))};
}

Vec3 adaptive_input(const Vec3& delta_tau, const Mat3& xi, const Mat3& J_inv,
                    const AdaptiveEnvelopeGains& g) {
  const Vec3 drive = (g.tanh_slope * delta_tau).array().tanh().abs().matrix();
  return g.drive * (xi * (J_inv * drive));
}

Vec3 adaptive_rate(const Vec3& delta_rho, const Vec3& delta_tau, const Mat3& xi,
                   const Mat3& J_inv, const AdaptiveEnvelopeGains& g) {
  return -g.decay * delta_rho + adaptive_input(delta_tau, xi, J_inv, g);
}

EnvelopeSample composite(const NominalPpf& ppf, const Vec3& delta_rho,
                         const Vec3& delta_rho_dot, double t) {
  const PpfSample n = ppf.eval(t);
  return {Vec3::Constant(n.rho) + delta_rho, Vec3::Constant(n.rho_dot) + delta_rho_dot};
}

}  // namespace ppcatt
