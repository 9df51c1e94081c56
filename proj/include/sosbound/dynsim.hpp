#pragma once

// Trajectory oracle: fixed-step RK4 with on-the-fly moment averaging, and
// multiple-shooting Newton for short periodic orbits on the Poincare section
// z = r - 1 (upward crossings).  Ground truth the bounds are judged against.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sosbound/lorenz.hpp"

namespace sosbound::dynsim {

using State = std::array<double, 3>;
using lorenz::LorenzParams;
using lorenz::MomentSpec;

struct TrajectoryConfig {
  State initial_state{1.0, 1.0, 1.0};
  double dt = 1e-3;
  double t_total = 1e5;
  double t_transient = 100.0;
};

struct AverageReport {
  std::map<MomentSpec, double> raw;
  std::map<MomentSpec, double> normalized;  // raw / moment value at x+-
  double horizon = 0.0;
};

struct IntegrationBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

State rk4_step(const LorenzParams& p, const State& s, double dt);

// generic RK4 step for tests with a custom field
template <class F>
State rk4_step_f(const F& f, const State& s, double dt) {
  auto axpy = [](const State& a, const State& b, double h) {
    return State{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]};
  };
  State k1 = f(s);
  State k2 = f(axpy(s, k1, dt / 2));
  State k3 = f(axpy(s, k2, dt / 2));
  State k4 = f(axpy(s, k3, dt));
  return State{s[0] + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
               s[1] + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
               s[2] + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])};
}

// Trapezoidal averages over [t_transient, t_total]; deterministic given cfg.
AverageReport time_average(const LorenzParams& p, const std::vector<MomentSpec>& moments,
                           const TrajectoryConfig& cfg);

// Average of an arbitrary polynomial observable (used by property tests for
// the zero-mean Lie derivative check).  Returns (average, min, max) of the
// observable after the transient.
struct ObservableStats {
  double average = 0, minimum = 0, maximum = 0;
};
ObservableStats time_average_observable(const LorenzParams& p, const polyalg::DPoly& obs,
                                        const TrajectoryConfig& cfg);

struct OrbitResult {
  double period = 0.0;
  std::vector<State> section_points;  // one per segment, on z = r-1
  std::vector<double> segment_times;
  double residual = 0.0;
  std::string symbols;
  std::vector<State> states;  // sampled closed trajectory
};

struct OrbitNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Multiple-shooting Newton on the return map of the section z = r-1; the
// winding sequence is verified a posteriori from the sign of x at crossings.
// symbols: "+-" (the shortest orbit) or "++-".
OrbitResult find_periodic_orbit(const LorenzParams& p, const std::string& symbols);

// One-period averages by trapezoid on a dt ~ 1e-4 re-integration.
AverageReport orbit_average(const LorenzParams& p, const OrbitResult& orbit,
                            const std::vector<MomentSpec>& moments);

}  // namespace sosbound::dynsim
