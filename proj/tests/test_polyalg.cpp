#include <doctest.h>

#include <random>

#include "sosbound/lorenz.hpp"
#include "sosbound/polyalg.hpp"

using namespace sosbound;
using namespace sosbound::polyalg;

namespace {

VarSetPtr xyz() { return lorenz::state_vars(); }
VarSetPtr xyzrho() { return lorenz::state_vars_with(lorenz::ParamVar::Rho); }

RPoly random_poly(VarSetPtr vars, std::mt19937& rng, int max_deg = 3, int max_terms = 5) {
  std::uniform_int_distribution<int> deg(0, max_deg), num(-6, 6), den(1, 4), nterms(1, max_terms);
  RPoly p(vars);
  int t = nterms(rng);
  for (int k = 0; k < t; ++k) {
    Monomial m(vars->size());
    int budget = deg(rng);
    for (size_t i = 0; i < vars->size() && budget > 0; ++i) {
      std::uniform_int_distribution<int> e(0, budget);
      m.exp[i] = e(rng);
      budget -= m.exp[i];
    }
    p.add_term(m, Rational(num(rng), den(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("poly addition") {
  auto v = xyz();
  auto x2 = RPoly::variable(v, "x", 2);
  CHECK((x2 + (-x2)).is_zero());

  auto xy = RPoly::variable(v, "x") * RPoly::variable(v, "y");
  auto sum = xy + xy;
  CHECK(sum == xy.scaled(2));

  auto z = RPoly::variable(v, "z");
  auto s = z.scaled(Rational(1, 3)) + z.scaled(Rational(1, 6));
  CHECK(s == z.scaled(Rational(1, 2)));  // no rounding ever
}

TEST_CASE("poly multiplication") {
  auto v = xyz();
  auto x = RPoly::variable(v, "x"), y = RPoly::variable(v, "y");
  auto sq = (x - y) * (x - y);
  CHECK(sq == x * x - (x * y).scaled(2) + y * y);

  CHECK((RPoly::zero(v) * sq).is_zero());

  auto vr = xyzrho();
  auto z = RPoly::variable(vr, "z"), rho = RPoly::variable(vr, "rho");
  CHECK((z - rho) * (z + rho) == z * z - rho * rho);

  CHECK(sq.degree() == 2);
  CHECK((sq * sq).degree() == 4);
}

TEST_CASE("differentiate") {
  auto v = xyzrho();
  auto x = RPoly::variable(v, "x"), y = RPoly::variable(v, "y"), z = RPoly::variable(v, "z");
  auto rho = RPoly::variable(v, "rho");
  CHECK((x * x).differentiate("x") == x.scaled(2));
  auto p = y * y + z * z - (rho * z).scaled(2);
  CHECK(p.differentiate("z") == z.scaled(2) - rho.scaled(2));
  CHECK(RPoly::variable(v, "x", 4).differentiate("y").is_zero());
  CHECK_THROWS(p.differentiate("rho"));  // parameters are not flow variables
  CHECK_THROWS(p.differentiate("w"));
}

TEST_CASE("lie derivative of Lorenz auxiliary functions") {
  auto v = xyz();
  lorenz::LorenzParams p;  // (8/3, 10, 28)
  auto f = lorenz::vector_field(p);
  auto x = RPoly::variable(v, "x"), y = RPoly::variable(v, "y"), z = RPoly::variable(v, "z");

  // V = -x^2/(2 sigma): xy + f.grad V = x^2
  auto V1 = (x * x).scaled(Rational(-1) / (2 * p.sigma));
  CHECK(x * y + lie_derivative(V1, f) == x * x);

  // V = -z: xy + f.grad V = beta z
  CHECK(x * y + lie_derivative(-z, f) == z.scaled(p.beta));

  CHECK(lie_derivative(RPoly::constant(v, Rational(7)), f).is_zero());
  CHECK_THROWS(lie_derivative(x, {f[0], f[1]}));
}

TEST_CASE("symmetry action") {
  auto v = xyz();
  auto x = RPoly::variable(v, "x"), y = RPoly::variable(v, "y"), z = RPoly::variable(v, "z");
  CHECK((x * y).apply_symmetry() == x * y);
  CHECK((x * x * z).apply_symmetry() == x * x * z);
  CHECK((x * z).apply_symmetry() == -(x * z));
  CHECK((x * y).is_symmetric());
  CHECK(!(x * z).is_symmetric());
  (void)y;

  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    RPoly p = random_poly(v, rng);
    CHECK(p.apply_symmetry().apply_symmetry() == p);  // involution
  }
  // every monomial with l+m even is fixed, l+m odd is negated
  Monomial even(v->size()), odd(v->size());
  even.exp = {1, 1, 3};
  odd.exp = {2, 1, 0};
  CHECK(RPoly::monomial(v, even).apply_symmetry() == RPoly::monomial(v, even));
  CHECK(RPoly::monomial(v, odd).apply_symmetry() == -RPoly::monomial(v, odd));
}

TEST_CASE("evaluation") {
  auto v = xyz();
  auto z3 = RPoly::variable(v, "z", 3);
  std::map<std::string, Rational> pt{{"x", 0}, {"y", 0}, {"z", 27}};
  CHECK(z3.eval(pt) == Rational(19683));

  // [z-(r-1)]^2 + (2/beta)(x-y)^2 vanishes at the nonzero equilibria
  auto vr = lorenz::state_vars_with(lorenz::ParamVar::R);
  auto su = polyalg::parse_poly(vr, "z^2 - 2*r*z + 2*z + r^2 - 2*r + 1") +
            (polyalg::parse_poly(vr, "x^2 - 2*x*y + y^2")).scaled(Rational(3, 4));
  double s72 = std::sqrt(72.0);
  std::map<std::string, double> fp{{"x", s72}, {"y", s72}, {"z", 27.0}, {"r", 28.0}};
  CHECK(std::abs(su.eval(fp)) < 1e-12);

  auto x = RPoly::variable(v, "x"), y = RPoly::variable(v, "y");
  std::map<std::string, Rational> eq{{"x", Rational(5, 7)}, {"y", Rational(5, 7)}, {"z", 3}};
  CHECK((x * x - x * y).eval(eq) == 0);

  CHECK_THROWS((x * y).eval(std::map<std::string, Rational>{{"x", Rational(1)}}));
}

TEST_CASE("ring axioms on random polynomials") {
  auto v = xyzrho();
  std::mt19937 rng(2024);
  for (int i = 0; i < 40; ++i) {
    RPoly a = random_poly(v, rng), b = random_poly(v, rng), c = random_poly(v, rng);
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("lie derivative is linear in V") {
  std::mt19937 rng(7);
  lorenz::LorenzParams p;
  auto vars = xyz();
  auto f = lorenz::vector_field(p);
  for (int i = 0; i < 25; ++i) {
    RPoly v1 = random_poly(vars, rng), v2 = random_poly(vars, rng);
    Rational a(std::uniform_int_distribution<int>(-5, 5)(rng),
               std::uniform_int_distribution<int>(1, 4)(rng));
    Rational b(std::uniform_int_distribution<int>(-5, 5)(rng), 3);
    CHECK(lie_derivative(v1.scaled(a) + v2.scaled(b), f) ==
          lie_derivative(v1, f).scaled(a) + lie_derivative(v2, f).scaled(b));
  }
}

TEST_CASE("textual round trip") {
  auto v = lorenz::state_vars_with(lorenz::ParamVar::R);
  RPoly p = parse_poly(v, "3/8*x^2*y - 2*r*z^2");
  CHECK(to_string(p) == "3/8*x^2*y - 2*r*z^2");
  CHECK(parse_poly(v, to_string(p)) == p);

  CHECK(to_string(RPoly::zero(v)) == "0");
  CHECK(parse_poly(v, "-x + 1") == RPoly::constant(v, 1) - RPoly::variable(v, "x"));

  std::mt19937 rng(5);
  for (int i = 0; i < 60; ++i) {
    RPoly q = random_poly(v, rng, 4, 6);
    CHECK(parse_poly(v, to_string(q)) == q);
  }
  CHECK_THROWS(parse_poly(v, "x + w"));
  CHECK_THROWS(parse_poly(v, ""));
}
