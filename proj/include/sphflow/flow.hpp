#pragma once

// Ricci flow of g = (1/v) g_{S^2} written for the pressure v:
//   dv/dt = v R = v Lap v - |grad v|^2 + 2 v^2,
// explicit RK4 with a spectral low-pass after each step, and the exact
// King-Rosenau family v = a + b x_3^2 evolved through its coefficient ODE.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "sphflow/tensor.hpp"

namespace sphflow {

/// Thrown when the pressure stops being positive somewhere on the grid.
class PositivityError : public std::runtime_error
{
 public:
  PositivityError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline void require_positive(const ScalarField& v, const char* who, double time = 0.0)
{
  if (!v.all_finite() || !(v.min() > 0.0)) {
    std::ostringstream os;
    os << who << ": pressure v must be positive (min v = " << v.min() << ") at t = " << time;
    throw PositivityError(os.str(), time);
  }
}

struct FlowState
{
  double t = 0.0;
  ScalarField v;
};

inline ScalarField grad_norm_sq(const ScalarField& v) { return norm_sq(covariant_derivative(FrameTensor::scalar(v))); }

/// R = Lap v - |grad v|^2 / v + 2 v.
inline ScalarField scalar_curvature(const ScalarField& v)
{
  require_positive(v, "scalar_curvature");
  return laplacian(v) - grad_norm_sq(v) / v + 2.0 * v;
}

/// dv/dt = v Lap v - |grad v|^2 + 2 v^2 (= v R without the division).
inline ScalarField flow_rhs(const ScalarField& v)
{
  require_positive(v, "flow_rhs");
  return v * laplacian(v) - grad_norm_sq(v) + 2.0 * (v * v);
}

/// dt = 1 / (max v * L (L + 1)).
inline double default_time_step(const ScalarField& v)
{
  const int L = v.grid()->L();
  return 1.0 / (v.max() * L * (L + 1.0));
}

inline FlowState rk4_step(const FlowState& s, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  require_positive(s.v, "rk4_step (stage 1)", s.t);
  const auto k1 = flow_rhs(s.v);
  ScalarField stage = s.v + (0.5 * dt) * k1;
  require_positive(stage, "rk4_step (stage 2)", s.t + 0.5 * dt);
  const auto k2 = flow_rhs(stage);
  stage = s.v + (0.5 * dt) * k2;
  require_positive(stage, "rk4_step (stage 3)", s.t + 0.5 * dt);
  const auto k3 = flow_rhs(stage);
  stage = s.v + dt * k3;
  require_positive(stage, "rk4_step (stage 4)", s.t + dt);
  const auto k4 = flow_rhs(stage);
  auto next = lowpass(s.v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  require_positive(next, "rk4_step (result)", s.t + dt);
  return {s.t + dt, std::move(next)};
}

/// Step policy: a fixed step, or (when unset) the default re-evaluated each step.
struct TimeStepPolicy
{
  std::optional<double> fixed_dt;

  double next(const ScalarField& v) const { return fixed_dt ? *fixed_dt : default_time_step(v); }
};

/// Growth of max v (relative to the initial max) treated as blow-up.
inline constexpr double kBlowUpFactor = 1e8;

/// Integrate to t_end, recording the initial state, every `stride`-th state,
/// and the final state. The last step is shortened to land exactly on t_end.
/// Throws PositivityError on loss of positivity or when max v grows by
/// kBlowUpFactor (the flow is near extinction).
inline std::vector<FlowState> run_flow(const FlowState& s0, double t_end, TimeStepPolicy policy = {}, int stride = 1)
{
  if (stride < 1) throw std::invalid_argument("run_flow: stride must be >= 1");
  if (t_end < s0.t) throw std::invalid_argument("run_flow: t_end precedes the initial time");
  require_positive(s0.v, "run_flow", s0.t);
  std::vector<FlowState> states{s0};
  FlowState cur = s0;
  long step = 0;
  while (cur.t < t_end) {
    double dt = policy.next(cur.v);
    bool last = false;
    if (t_end - cur.t <= dt * (1.0 + 1e-12)) {
      dt = t_end - cur.t;
      last = true;
    }
    cur = rk4_step(cur, dt);
    if (last) cur.t = t_end;
    if (cur.v.max() > kBlowUpFactor * s0.v.max()) {
      std::ostringstream os;
      os << "run_flow: blow-up, max v = " << cur.v.max() << " at t = " << cur.t;
      throw PositivityError(os.str(), cur.t);
    }
    ++step;
    if (last || step % stride == 0) states.push_back(cur);
  }
  return states;
}

struct KRParams
{
  double a = 1.0;
  double b = 0.0;

  bool valid() const { return a > 0.0 && a + b > 0.0; }
};

inline void require_valid(const KRParams& p, const char* who)
{
  if (!p.valid()) {
    std::ostringstream os;
    os << who << ": King-Rosenau parameters need a > 0 and a + b > 0 (a = " << p.a << ", b = " << p.b << ")";
    throw std::invalid_argument(os.str());
  }
}

/// v = a + b x_3^2 on the grid.
inline ScalarField kr_field(const KRParams& p, const GridPtr& grid)
{
  require_valid(p, "kr_field");
  return ScalarField::sample_xyz(grid, [&](double, double, double z) { return p.a + p.b * z * z; });
}

/// Coefficient dynamics of the invariant family v = a + b x_3^2:
///   a' = 2 a (a + b),  b' = -2 b (a + b),
/// integrated with an adaptive Runge-Kutta-Fehlberg 7(8) pair.
inline KRParams kr_evolve(const KRParams& p0, double t, double tol = 1e-13)
{
  require_valid(p0, "kr_evolve");
  if (!(t >= 0.0)) throw std::invalid_argument("kr_evolve: t must be >= 0 (forward integration only)");
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  State y{p0.a, p0.b};
  auto rhs = [](const State& s, State& dydt, double) {
    const double sum = s[0] + s[1];
    dydt[0] = 2.0 * s[0] * sum;
    dydt[1] = -2.0 * s[1] * sum;
  };
  if (t > 0.0) {
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
    const double dt0 = std::min(1e-3, t);
    odeint::integrate_adaptive(stepper, rhs, y, 0.0, t, dt0);
  }
  KRParams out{y[0], y[1]};
  if (!out.valid() || !std::isfinite(out.a) || !std::isfinite(out.b)) {
    std::ostringstream os;
    os << "kr_evolve: left the validity region a > 0, a + b > 0 before t = " << t;
    throw std::domain_error(os.str());
  }
  return out;
}

/// Round solution a(t) = a0 / (1 - 2 a0 t).
inline double round_pressure(double a0, double t) { return a0 / (1.0 - 2.0 * a0 * t); }

}  // namespace sphflow
