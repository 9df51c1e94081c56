#include <doctest.h>

#include <random>
#include <set>

#include "sosbound/lorenz.hpp"
#include "sosbound/sosform.hpp"

using namespace sosbound;
using namespace sosbound::sosform;
using polyalg::Monomial;
using polyalg::RPoly;
using polyalg::VarSetPtr;

namespace {

std::set<std::string> poly_strings(const std::vector<RPoly>& v) {
  std::set<std::string> s;
  for (const auto& p : v) s.insert(polyalg::to_string(p));
  return s;
}

// span equality of two sets of polynomials over the same variables
bool same_span(const std::vector<RPoly>& a, const std::vector<RPoly>& b) {
  if (a.empty() && b.empty()) return true;
  std::set<Monomial, polyalg::GradedLexLess> monos;
  for (const auto& p : a)
    for (const auto& [m, c] : p.terms()) monos.insert(m);
  for (const auto& p : b)
    for (const auto& [m, c] : p.terms()) monos.insert(m);
  std::vector<Monomial> rows(monos.begin(), monos.end());
  auto matrix_of = [&](const std::vector<RPoly>& polys) {
    ratlin::RatMat m(rows.size(), polys.size());
    for (size_t j = 0; j < polys.size(); ++j)
      for (size_t i = 0; i < rows.size(); ++i) m.at(i, j) = polys[j].coeff(rows[i]);
    return m;
  };
  ratlin::RatMat ma = matrix_of(a), mb = matrix_of(b);
  auto rank_of = [&](const ratlin::RatMat& m) {
    std::vector<Rational> z(m.rows(), Rational(0));
    return ratlin::rref(m, z).pivot_col.size();
  };
  size_t ra = rank_of(ma), rb = rank_of(mb);
  ratlin::RatMat joint(rows.size(), a.size() + b.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < a.size(); ++j) joint.at(i, j) = ma.at(i, j);
    for (size_t j = 0; j < b.size(); ++j) joint.at(i, a.size() + j) = mb.at(i, j);
  }
  return ra == rb && rank_of(joint) == ra;
}

// the z^2 upper-bound problem of the parametric path: phi = z^2,
// U = (r-1)^2 + u0, quadratic V ansatz
SFunction z2_sfunction(const lorenz::LorenzParams& p) {
  auto vars = lorenz::state_vars_with(lorenz::ParamVar::R);
  lorenz::LorenzParams symbolic = p;
  symbolic.r.reset();
  auto f = lorenz::vector_field(symbolic, vars);
  auto z = RPoly::variable(vars, "z");
  AuxAnsatz ansatz = gen_lorenz_V_basis(2, true, vars);
  auto r1 = RPoly::variable(vars, "r") - RPoly::constant(vars, 1);
  BoundAnsatz bound{r1 * r1, "u0"};
  return build_bound_poly(z * z, f, ansatz, Sense::Upper, bound);
}

}  // namespace

TEST_CASE("build_bound_poly simple cases") {
  auto vars = lorenz::state_vars();
  lorenz::LorenzParams p;
  auto f = lorenz::vector_field(p);
  auto x = RPoly::variable(vars, "x"), y = RPoly::variable(vars, "y");

  // phi = xy, V = -x^2/(2 sigma), L = 0  ->  S_L = x^2
  AuxAnsatz one;
  one.basis_polys = {(x * x).scaled(Rational(-1) / (2 * p.sigma))};
  one.coeff_names = {"c0"};
  SFunction s = build_bound_poly(x * y, f, one, Sense::Lower,
                                 BoundAnsatz::fixed(RPoly::zero(vars)));
  auto fixed = polyalg::substitute_unknowns(s.poly, {{"c0", Rational(1)}});
  CHECK(fixed == x * x);

  // no auxiliary function: phi = x^2, L = 0 -> S_L = x^2
  SFunction s2 = build_bound_poly(x * x, f, AuxAnsatz{}, Sense::Lower,
                                  BoundAnsatz::fixed(RPoly::zero(vars)));
  CHECK(polyalg::substitute_unknowns(s2.poly, {}) == x * x);

  // bound ansatz must be parameter-only
  CHECK_THROWS(build_bound_poly(x * x, f, AuxAnsatz{}, Sense::Upper, BoundAnsatz::fixed(x)));
}

TEST_CASE("z^2 S function has the expected affine coefficients") {
  lorenz::LorenzParams p;  // (8/3, 10)
  SFunction s = z2_sfunction(p);
  auto vars = s.poly.vars_ptr();
  // coefficient of z^2 in S_U is 2 beta c3 - 1 where c3 multiplies y^2+z^2-2rz
  Monomial z2(vars->size());
  z2.exp[vars->index_of("z")] = 2;
  polyalg::LinExpr c = s.poly.coeff(z2);
  CHECK(c.constant == Rational(-1));
  // the ansatz generator orders the quadratic basis {z, x^2, y^2+z^2-2rz}
  CHECK(c.lin.size() == 1);
  CHECK(c.lin.begin()->second == 2 * p.beta);
  CHECK(s.poly.degree() == 2);  // degree(S) = degree(V)
}

TEST_CASE("gen_lorenz_V_basis") {
  AuxAnsatz d2 = gen_lorenz_V_basis(2, false);
  CHECK(poly_strings(d2.basis_polys) == std::set<std::string>{"z", "x^2", "y^2 + z^2"});

  AuxAnsatz d4 = gen_lorenz_V_basis(4, false);
  CHECK(d4.basis_polys.size() == 12);
  auto names = poly_strings(d4.basis_polys);
  CHECK(names.count("z"));
  CHECK(names.count("x^2"));
  CHECK(names.count("x*y"));
  CHECK(names.count("y^2"));
  CHECK(names.count("z^2"));
  CHECK(names.count("x^2*z"));
  CHECK(names.count("x*y*z"));
  CHECK(names.count("y^2*z"));
  CHECK(names.count("z^3"));
  CHECK(names.count("x^4"));
  CHECK(names.count("x^2*y^2 + x^2*z^2"));
  CHECK(names.count("y^4 + 2*y^2*z^2 + z^4"));

  AuxAnsatz d2r = gen_lorenz_V_basis(2, true);
  CHECK(poly_strings(d2r.basis_polys) ==
        std::set<std::string>{"z", "x^2", "y^2 + z^2 - 2*r*z"});

  CHECK_THROWS(gen_lorenz_V_basis(3, false));
  CHECK_THROWS(gen_lorenz_V_basis(0, false));
}

TEST_CASE("f.grad V stays at degree(V) for admissible bases") {
  lorenz::LorenzParams p;
  auto vars = lorenz::state_vars();
  auto f = lorenz::vector_field(p);
  for (int deg : {2, 4, 6}) {
    AuxAnsatz a = gen_lorenz_V_basis(deg, false, vars);
    for (const auto& b : a.basis_polys)
      CHECK(polyalg::lie_derivative(b, f).degree() <= deg);
    // the top-degree elements individually keep the cancellation
    for (const auto& b : a.basis_polys)
      if (b.degree() == deg) CHECK(polyalg::lie_derivative(b, f).degree() == deg);
  }
}

TEST_CASE("gen_basis_pair on the z^2 problem") {
  SFunction s = z2_sfunction(lorenz::LorenzParams{});
  BasisPair bp = gen_basis_pair(s);
  CHECK(poly_strings(bp.sym) == std::set<std::string>{"1", "r", "z"});
  CHECK(poly_strings(bp.anti) == std::set<std::string>{"x", "y"});
}

TEST_CASE("gen_basis_pair on S = x^2") {
  auto vars = lorenz::state_vars();
  auto x = RPoly::variable(vars, "x");
  SFunction s(polyalg::lift(x * x), Sense::Lower);
  s.phi = x * x;
  BasisPair bp = gen_basis_pair(s);
  CHECK(bp.sym.empty());
  CHECK(poly_strings(bp.anti) == std::set<std::string>{"x"});

  GramProblem g = assemble_gram_constraints(s, bp);
  CHECK(g.a.rows() == 1);  // single equation Qa = 1
  auto sol = ratlin::solve(g.a, g.rhs);
  REQUIRE(sol.has_value());
  CHECK((*sol)[0] == 1);
}

TEST_CASE("reduce_basis on the z^2 problem gives single-entry vectors") {
  SFunction s = z2_sfunction(lorenz::LorenzParams{});
  BasisPair bp = gen_basis_pair(s);
  auto vars = s.poly.vars_ptr();
  auto r1 = RPoly::variable(vars, "r") - RPoly::constant(vars, 1);
  std::vector<Substitution> locus{{"z", r1}, {"x", RPoly::variable(vars, "y")}};
  BasisPair red = reduce_basis(bp, locus);
  REQUIRE(red.sym.size() == 1);
  REQUIRE(red.anti.size() == 1);
  CHECK(polyalg::to_string(red.sym[0]) == "z - r + 1");
  CHECK(polyalg::to_string(red.anti[0]) == "x - y");

  // empty locus is the identity
  BasisPair same = reduce_basis(bp, {});
  CHECK(poly_strings(same.sym) == poly_strings(bp.sym));
  CHECK(poly_strings(same.anti) == poly_strings(bp.anti));
}

TEST_CASE("z^2 Gram constraints determine all five unknowns") {
  lorenz::LorenzParams p;  // beta = 8/3, sigma = 10
  SFunction s = z2_sfunction(p);
  auto vars = s.poly.vars_ptr();
  auto r1 = RPoly::variable(vars, "r") - RPoly::constant(vars, 1);
  BasisPair red = reduce_basis(gen_basis_pair(s), {{"z", r1}, {"x", RPoly::variable(vars, "y")}});
  GramProblem g = assemble_gram_constraints(s, red);

  // unknowns: Qs, Qa, c0..c2, u0 -- system must be uniquely solvable
  CHECK(ratlin::kernel_basis(g.a).empty());
  auto sol = ratlin::solve(g.a, g.rhs);
  REQUIRE(sol.has_value());
  std::map<std::string, Rational> by_name;
  for (size_t k = 0; k < g.scalar_names.size(); ++k)
    by_name[g.scalar_names[k]] = (*sol)[g.nqs + g.nqa + k];
  CHECK((*sol)[g.qs_col(0, 0)] == 1);                  // Qs = 1
  CHECK((*sol)[g.qa_col(0, 0)] == 2 / p.beta);         // Qa = 2/beta
  CHECK(by_name["c0"] == 2 / p.beta);                  // V coefficient of z
  CHECK(by_name["c1"] == 1 / (p.beta * p.sigma));      // of x^2
  CHECK(by_name["c2"] == 1 / p.beta);                  // of y^2+z^2-2rz
  CHECK(by_name["u0"] == 0);                           // sharp: U = (r-1)^2 exactly

  // reconstruction: expanding the Gram form reproduces S coefficient-wise
  ratlin::RatMat qs(1, 1), qa(1, 1);
  qs.at(0, 0) = (*sol)[g.qs_col(0, 0)];
  qa.at(0, 0) = (*sol)[g.qa_col(0, 0)];
  RPoly expanded = expand_gram(red, qs, qa);
  RPoly target = polyalg::substitute_unknowns(s.poly, by_name);
  CHECK(expanded == target);
}

namespace {

// z^3 problem pieces in the rho convention (phi = rho z^3, U = rho^4 + u0)
SFunction z3_sfunction(const lorenz::LorenzParams& p) {
  auto vars = lorenz::state_vars_with(lorenz::ParamVar::Rho);
  lorenz::LorenzParams symbolic = p;
  symbolic.r.reset();
  auto f = lorenz::vector_field(symbolic, vars);
  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  auto Rho = RPoly::variable(vars, "rho");
  const Rational& S = p.sigma;
  RPoly core = Y * Y + Z * Z - (Rho * Z).scaled(2);
  RPoly b1 = (X * X * X * X).scaled(Rational(1) / S) + core * core +
             (Rho * Rho * core).scaled(8) + (Rho * Rho * X * X).scaled(Rational(6) / S);
  RPoly lin = X.scaled(Rational(1) / S) + Y;
  RPoly b2 = -(Rho * lin * lin);
  AuxAnsatz ansatz;
  ansatz.basis_polys = {b1, b2};
  ansatz.coeff_names = {"c1", "c2"};
  BoundAnsatz bound{Rho * Rho * Rho * Rho, std::nullopt};
  return build_bound_poly(Rho * Z * Z * Z, f, ansatz, Sense::Upper, bound);
}

}  // namespace

TEST_CASE("z^3 monomial basis pair") {
  SFunction s = z3_sfunction(lorenz::LorenzParams{});
  BasisPair bp = gen_basis_pair(s);
  CHECK(poly_strings(bp.sym) ==
        std::set<std::string>{"x^2", "x*y", "y^2", "rho^2", "rho*z", "z^2"});
  CHECK(poly_strings(bp.anti) == std::set<std::string>{"rho*x", "rho*y", "x*z", "y*z"});
}

TEST_CASE("z^3 reduced bases and null-vector merge") {
  SFunction s = z3_sfunction(lorenz::LorenzParams{});
  auto vars = s.poly.vars_ptr();
  BasisPair bp = gen_basis_pair(s);
  auto Rho = RPoly::variable(vars, "rho");
  std::vector<Substitution> locus{{"z", Rho}, {"x", RPoly::variable(vars, "y")}};
  BasisPair red = reduce_basis(bp, locus);
  REQUIRE(red.sym.size() == 4);
  REQUIRE(red.anti.size() == 3);

  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  std::vector<RPoly> expected_s4{X * X - X * Y, X * X - Y * Y, Rho * (Z - Rho), Z * (Z - Rho)};
  std::vector<RPoly> expected_a{Rho * (X - Y), X * (Z - Rho), Y * (Z - Rho)};
  CHECK(same_span(red.sym, expected_s4));
  CHECK(same_span(red.anti, expected_a));
  // every reduced element vanishes on the locus
  for (const auto& b : red.sym)
    CHECK(b.substituted("z", Rho).substituted("x", Y).is_zero());
  for (const auto& b : red.anti)
    CHECK(b.substituted("z", Rho).substituted("x", Y).is_zero());

  // The Gram-matrix null vector is [0,0,1,1] in the coordinates of
  // expected_s4.  Null vectors are coefficient vectors: with basis change
  // b_expected = T b_returned they transform by T^{-1}, so solve T v = n.
  std::set<Monomial, polyalg::GradedLexLess> monos;
  for (const auto& b : red.sym)
    for (const auto& [m, c] : b.terms()) monos.insert(m);
  std::vector<Monomial> rows(monos.begin(), monos.end());
  auto coords_of = [&](const RPoly& p) {
    ratlin::RatMat a(rows.size(), red.sym.size());
    std::vector<Rational> rhs(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      for (size_t j = 0; j < red.sym.size(); ++j) a.at(i, j) = red.sym[j].coeff(rows[i]);
      rhs[i] = p.coeff(rows[i]);
    }
    auto c = ratlin::solve(a, rhs);
    REQUIRE(c.has_value());
    return *c;
  };
  ratlin::RatMat t(4, 4);
  for (size_t i = 0; i < 4; ++i) {
    auto row = coords_of(expected_s4[i]);
    for (size_t j = 0; j < 4; ++j) t.at(i, j) = row[j];
  }
  std::vector<Rational> n{0, 0, 1, 1};
  auto vm = ratlin::solve(t, n);
  REQUIRE(vm.has_value());
  BasisPair merged = reduce_basis(red, {}, {NullVector{Block::Sym, *vm}});
  REQUIRE(merged.sym.size() == 3);
  std::vector<RPoly> expected_s3{X * X - X * Y, X * X - Y * Y, (Z - Rho) * (Z - Rho)};
  CHECK(same_span(merged.sym, expected_s3));
  // the merged square appears verbatim up to scaling
  bool has_sq = false;
  for (const auto& b : merged.sym)
    if (b == (Z - Rho) * (Z - Rho)) has_sq = true;
  CHECK(has_sq);
}

TEST_CASE("z^3 Gram constraints: 12 independent relations force c1, c2") {
  lorenz::LorenzParams p;  // (8/3, 10)
  SFunction s = z3_sfunction(p);
  auto vars = s.poly.vars_ptr();
  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  auto Rho = RPoly::variable(vars, "rho");
  BasisPair red;
  red.sym = {X * X - X * Y, X * X - Y * Y, (Z - Rho) * (Z - Rho)};
  red.anti = {Rho * (X - Y), X * (Z - Rho), Y * (Z - Rho)};
  GramProblem g = assemble_gram_constraints(s, red);

  CHECK(g.a.rows() == 12);  // independent affine relations
  auto kernel = ratlin::kernel_basis(g.a);
  CHECK(kernel.size() == 2);  // the (gamma1, gamma2) degrees of freedom
  auto sol = ratlin::solve(g.a, g.rhs);
  REQUIRE(sol.has_value());
  // c1 and c2 must be forced in every solution: kernel components vanish there
  size_t c1_col = g.scalar_col("c1"), c2_col = g.scalar_col("c2");
  for (const auto& k : kernel) {
    CHECK(k[c1_col] == 0);
    CHECK(k[c2_col] == 0);
  }
  CHECK((*sol)[c1_col] == Rational(3, 32));   // 1/(4 beta) at beta = 8/3
  CHECK((*sol)[c2_col] == Rational(5, 11));   // sigma/(2(1+sigma)) at sigma = 10
}

TEST_CASE("parity soundness of basis-pair expansions") {
  SFunction s = z3_sfunction(lorenz::LorenzParams{});
  BasisPair bp = gen_basis_pair(s);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> num(-4, 4);
  for (int trial = 0; trial < 10; ++trial) {
    ratlin::RatMat qs(bp.sym.size(), bp.sym.size()), qa(bp.anti.size(), bp.anti.size());
    for (size_t i = 0; i < bp.sym.size(); ++i)
      for (size_t j = i; j < bp.sym.size(); ++j) {
        qs.at(i, j) = Rational(num(rng), 3);
        qs.at(j, i) = qs.at(i, j);
      }
    for (size_t i = 0; i < bp.anti.size(); ++i)
      for (size_t j = i; j < bp.anti.size(); ++j) {
        qa.at(i, j) = Rational(num(rng), 2);
        qa.at(j, i) = qa.at(i, j);
      }
    RPoly e = expand_gram(bp, qs, qa);
    CHECK(e.apply_symmetry() == e);
  }
}

TEST_CASE("unrepresentable monomial raises a structured error") {
  auto vars = lorenz::state_vars();
  auto x = RPoly::variable(vars, "x");
  // S = x^2 with an empty basis
  SFunction s(polyalg::lift(x * x), Sense::Lower);
  s.phi = x * x;
  CHECK_THROWS_AS(assemble_gram_constraints(s, BasisPair{}), UnrepresentableError);
  try {
    assemble_gram_constraints(s, BasisPair{});
  } catch (const UnrepresentableError& e) {
    CHECK(e.monomial_text == "x^2");
  }
}

TEST_CASE("structurally infeasible toy reaches the solver as such") {
  auto vars = lorenz::state_vars();
  // S = -1 with an empty basis and no unknowns
  SFunction s(polyalg::lift(RPoly::constant(vars, Rational(-1))), Sense::Lower);
  s.phi = RPoly::constant(vars, Rational(-1));
  CHECK_THROWS_AS(assemble_gram_constraints(s, BasisPair{}), UnrepresentableError);
}

TEST_CASE("fix_scalar folds a column") {
  SFunction s = z2_sfunction(lorenz::LorenzParams{});
  auto vars = s.poly.vars_ptr();
  auto r1 = RPoly::variable(vars, "r") - RPoly::constant(vars, 1);
  BasisPair red = reduce_basis(gen_basis_pair(s), {{"z", r1}, {"x", RPoly::variable(vars, "y")}});
  GramProblem g = assemble_gram_constraints(s, red);
  GramProblem g0 = fix_scalar(g, "u0", Rational(0));
  CHECK(g0.scalar_names.size() == g.scalar_names.size() - 1);
  auto sol = ratlin::solve(g0.a, g0.rhs);
  REQUIRE(sol.has_value());
  CHECK((*sol)[g0.qs_col(0, 0)] == 1);
}
