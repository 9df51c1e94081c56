#pragma once

// Lorenz-specific data: dynamics, equilibria, moment values, the moment
// relation table, the proportional families, the three built-in analytic
// certificates (z^2, z^3, xy^3) with their parameter-validity regions, and
// the (gamma1, gamma2) feasibility search behind the z^3 bound.
//
// Conventions: beta and sigma are fixed rationals per problem.  When r is
// analytic it enters the ring either directly as "r" (z^2 and xy^3 paths) or
// as rho = r - 1 (z^3 path, which bounds rho*avg(z^3) <= rho^4).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sosbound/certify.hpp"
#include "sosbound/polyalg.hpp"

namespace sosbound::lorenz {

using polyalg::RPoly;
using polyalg::VarSetPtr;

struct LorenzParams {
  Rational beta{8, 3};
  Rational sigma{10};
  std::optional<Rational> r{Rational(28)};  // nullopt = analytic

  static LorenzParams standard() { return {}; }
  static LorenzParams symbolic(Rational beta_, Rational sigma_) {
    return {std::move(beta_), std::move(sigma_), std::nullopt};
  }
};

enum class ParamVar { R, Rho };

// State-only variable set (numeric r) or (x,y,z | r) / (x,y,z | rho).
VarSetPtr state_vars();
VarSetPtr state_vars_with(ParamVar pv);

// (-sigma x + sigma y, r x - y - x z, x y - beta z); with symbolic r the
// y-component reads rho x + x - y - x z in the rho convention.
std::vector<RPoly> vector_field(const LorenzParams& p, VarSetPtr vars);
std::vector<RPoly> vector_field(const LorenzParams& p);

// Dynamics of u = x / s: the quadratic terms pick up a factor s.  Bounds on a
// degree-d moment of u convert back by multiplying with s^d.
std::vector<RPoly> vector_field_scaled(const LorenzParams& p, const Rational& scale);

struct MomentSpec {
  int l = 0, m = 0, n = 0;
  int degree() const { return l + m + n; }
  bool symmetric() const { return (l + m) % 2 == 0; }
  std::string name() const;
  RPoly poly(VarSetPtr vars) const;
  bool operator<(const MomentSpec& o) const {
    return std::array<int, 3>{l, m, n} < std::array<int, 3>{o.l, o.m, o.n};
  }
  bool operator==(const MomentSpec& o) const { return l == o.l && m == o.m && n == o.n; }
};

// The eighteen symmetric moments up to quartic degree.
const std::vector<MomentSpec>& table_moments();
std::optional<MomentSpec> moment_by_name(const std::string& name);

std::vector<std::array<double, 3>> equilibria(const LorenzParams& p);

// x^l y^m z^n at the nonzero equilibria: beta^((l+m)/2) (r-1)^((l+m)/2+n).
Rational moment_at_nonzero_eq(const MomentSpec& spec, const LorenzParams& p);

double normalize(double value, const MomentSpec& spec, const LorenzParams& p);

// avg(x^{n-1} y) = avg(x^n) and avg(x y z^{n-1}) = beta avg(z^n), realized as
// records with lhs + f.grad(V) = factor * rhs identically (verified on
// construction, symbolic r).
struct ProportionalRecord {
  RPoly V;
  MomentSpec lhs, rhs;
  Rational factor;
};
std::array<ProportionalRecord, 2> proportional_family(int n, const LorenzParams& p);

// One row of the moment-relation table: avg(phi) equals a linear combination
// of other moment averages, witnessed by phi + f.grad(V) - rhs == 0.
struct MomentRelation {
  MomentSpec phi;
  RPoly V;
  std::vector<std::pair<MomentSpec, RPoly>> rhs;  // coefficient polys in r
  // phi expressed over the minimal set {z, z^2, y^2 z, z^3, y^2 z^2, z^4}
  std::vector<std::pair<MomentSpec, RPoly>> chained;
};

// All 12 relations, each verified symbolically at construction; throws on a
// nonzero residual.
std::vector<MomentRelation> appendix_relations(const LorenzParams& p);

const std::vector<MomentSpec>& minimal_moment_set();

// ---------------------------------------------------------------------------
// z^3 feasibility region

struct GammaRegion {
  Rational beta, sigma;
  bool feasible = false;
  std::optional<std::pair<Rational, Rational>> witness;  // (gamma1, gamma2)
  double refined_margin = 0.0;  // float max-min margin seen by the search
};

// The five polynomial inequalities equivalent to PSD of the parametric z^3
// Gram blocks (the sixth always holds for beta > 0).  Satisfied when entries
// 0,2,4 are >= 0 and entries 1,3 are <= 0.
std::array<Rational, 5> z3_inequalities(const Rational& beta, const Rational& sigma,
                                        const Rational& g1, const Rational& g2);
bool z3_inequalities_hold(const Rational& beta, const Rational& sigma, const Rational& g1,
                          const Rational& g2);

// Parametric Gram blocks of the z^3 certificate at (gamma1, gamma2).
ratlin::RatMat z3_gram_sym(const Rational& beta, const Rational& g1, const Rational& g2);
ratlin::RatMat z3_gram_anti(const Rational& beta, const Rational& sigma, const Rational& g1,
                            const Rational& g2);

// Float grid over gamma2 in [0,1], gamma1 in [-1,1], Nelder-Mead refinement
// (allowed to leave the box), exact verification of the rationalized witness.
GammaRegion gamma_feasible(const Rational& beta, const Rational& sigma,
                           std::optional<std::pair<double, double>> hint = std::nullopt);

// (numeric lower limit by bisection to 1e-6, exact upper limit
// 12(1+sigma)^2/(2+sigma)^2).
std::pair<double, Rational> z3_region_bounds(const Rational& sigma);

// ---------------------------------------------------------------------------
// Built-in certificates

enum class Builtin { Z2, Z3, XY3 };
std::optional<Builtin> builtin_by_name(const std::string& name);

struct RegionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact certificates with symbolic r.  z2 is valid for all beta > 0; z3
// requires gamma-feasible (beta, sigma); xy3 requires beta^2 - 12 beta + 4
// <= 0.  The xy3 certificate carries the doubled normalization under which
// the antisymmetric block is exactly [2 beta].  Throws RegionViolation
// outside the validity region.
certify::RationalCertificate builtin_certificate(Builtin which, const LorenzParams& p);

// The dynamics the certificate is stated for (matching its variable set).
std::vector<RPoly> builtin_certificate_field(Builtin which, const LorenzParams& p,
                                             VarSetPtr vars);

}  // namespace sosbound::lorenz
