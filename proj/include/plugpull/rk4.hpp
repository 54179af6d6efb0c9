#pragma once

namespace plugpull::sim {

/// Classical fixed-step Runge-Kutta. State needs +, and scalar *.
template <class State, class Derivative>
State rk4_step(Derivative&& f, const State& x, double t, double h) {
  const State k1 = f(x, t);
  const State k2 = f(State(x + (0.5 * h) * k1), t + 0.5 * h);
  const State k3 = f(State(x + (0.5 * h) * k2), t + 0.5 * h);
  const State k4 = f(State(x + h * k3), t + h);
  return State(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace plugpull::sim
