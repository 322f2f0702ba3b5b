#pragma once

namespace ppcatt {

/// One classical fourth-order Runge-Kutta step of x' = f(t, x).
/// State must support x + x and double * x.
template <class State, class Rhs>
State rk4_step(Rhs&& f, double t, const State& x, double dt) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(x + dt * k3));
  return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace ppcatt
