#include <doctest.h>

#include <cmath>
#include <random>

#include "sosbound/dynsim.hpp"

using namespace sosbound;
using namespace sosbound::dynsim;
using lorenz::LorenzParams;
using lorenz::MomentSpec;

TEST_CASE("rk4 fixed points") {
  LorenzParams p;
  State origin{0, 0, 0};
  State s = rk4_step(p, origin, 1e-3);
  CHECK(s[0] == 0);
  CHECK(s[1] == 0);
  CHECK(s[2] == 0);

  double q = std::sqrt(72.0);
  State xp{q, q, 27.0};
  State t = xp;
  for (int i = 0; i < 100; ++i) t = rk4_step(p, t, 1e-3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(t[k] - xp[k]) < 1e-12 * 100);
}

TEST_CASE("rk4 against the exponential") {
  auto decay = [](const State& s) { return State{-s[0], 0, 0}; };
  State s{1.0, 0, 0};
  s = rk4_step_f(decay, s, 0.1);
  CHECK(std::abs(s[0] - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("blowup detection") {
  LorenzParams p;
  State s{1e200, 1e200, 1e200};
  CHECK_THROWS_AS((void)rk4_step(p, s, 1e3), IntegrationBlowup);
}

TEST_CASE("time average at the nonzero equilibrium") {
  LorenzParams p;
  double q = std::sqrt(72.0);
  TrajectoryConfig cfg;
  cfg.initial_state = {q, q, 27.0};
  cfg.dt = 1e-3;
  cfg.t_total = 50;
  cfg.t_transient = 1;
  auto rep = time_average(p, {MomentSpec{0, 0, 1}, MomentSpec{0, 2, 0}}, cfg);
  CHECK(rep.normalized.at(MomentSpec{0, 0, 1}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.normalized.at(MomentSpec{0, 2, 0}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("short chaotic averages approach the known values") {
  LorenzParams p;
  TrajectoryConfig cfg;
  cfg.t_total = 3000;
  cfg.t_transient = 100;
  auto rep = time_average(p, lorenz::table_moments(), cfg);
  CHECK(rep.normalized.at(MomentSpec{0, 0, 1}) == doctest::Approx(0.87223).epsilon(2e-2));
  CHECK(rep.normalized.at(MomentSpec{0, 2, 0}) == doctest::Approx(1.12780).epsilon(4e-2));
  // normalized averages of x2, xy and z coincide along every trajectory
  CHECK(rep.normalized.at(MomentSpec{2, 0, 0}) ==
        doctest::Approx(rep.normalized.at(MomentSpec{0, 0, 1})).epsilon(2e-3));
}

TEST_CASE("lie derivatives average to zero at the 1/T rate") {
  LorenzParams p;
  auto vars = lorenz::state_vars();
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> num(-3, 3);
  // a random symmetric V of degree <= 4
  polyalg::RPoly V(vars);
  auto ansatz = sosform::gen_lorenz_V_basis(4, false, vars);
  for (const auto& b : ansatz.basis_polys) V += b.scaled(Rational(num(rng), 4));
  auto lie = polyalg::to_float(polyalg::lie_derivative(V, lorenz::vector_field(p)));
  auto vfl = polyalg::to_float(V);

  double horizons[2] = {500.0, 2000.0};
  double scaled[2];
  for (int i = 0; i < 2; ++i) {
    TrajectoryConfig cfg;
    cfg.t_total = horizons[i] + 100;
    cfg.t_transient = 100;
    auto lie_stats = time_average_observable(p, lie, cfg);
    auto v_stats = time_average_observable(p, vfl, cfg);
    double v_range = v_stats.maximum - v_stats.minimum;
    // |average of dV/dt| <= range(V)/T exactly for the true flow
    CHECK(std::abs(lie_stats.average) <= 3.0 * v_range / horizons[i]);
    scaled[i] = std::abs(lie_stats.average) * horizons[i];
  }
  // the scaled magnitudes stay comparable: ~1/T decay, not slower
  CHECK(scaled[1] <= 50.0 * std::max(scaled[0], 1e-6));
}

TEST_CASE("shortest periodic orbit by multiple shooting") {
  LorenzParams p;
  OrbitResult orbit = find_periodic_orbit(p, "+-");
  CHECK(orbit.residual <= 1e-10);
  CHECK(orbit.period == doctest::Approx(1.5586522).epsilon(1e-5));
  REQUIRE(orbit.section_points.size() == 2);
  // the orbit is symmetric: the two section points are negatives in (x, y)
  CHECK(orbit.section_points[0][0] == doctest::Approx(-orbit.section_points[1][0]).epsilon(1e-8));
  CHECK(orbit.section_points[0][1] == doctest::Approx(-orbit.section_points[1][1]).epsilon(1e-8));

  auto rep = orbit_average(p, orbit, {MomentSpec{0, 2, 0}, MomentSpec{0, 2, 1}});
  CHECK(rep.normalized.at(MomentSpec{0, 2, 0}) == doctest::Approx(1.1621684).epsilon(1e-5));
  CHECK(rep.normalized.at(MomentSpec{0, 2, 1}) == doctest::Approx(1.0394975).epsilon(1e-5));

  // antisymmetric moments vanish on the symmetric orbit
  auto anti = orbit_average(p, orbit, {MomentSpec{1, 0, 1}});
  CHECK(std::abs(anti.raw.at(MomentSpec{1, 0, 1})) < 1e-8);

  CHECK_THROWS(find_periodic_orbit(p, "+"));
}
