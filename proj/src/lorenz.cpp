#include "sosbound/lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sosbound::lorenz {

using polyalg::make_varset;
using ratlin::RatMat;

VarSetPtr state_vars() {
  static VarSetPtr v = make_varset({"x", "y", "z"});
  return v;
}

VarSetPtr state_vars_with(ParamVar pv) {
  static VarSetPtr vr = make_varset({"x", "y", "z"}, {"r"});
  static VarSetPtr vrho = make_varset({"x", "y", "z"}, {"rho"});
  return pv == ParamVar::R ? vr : vrho;
}

std::vector<RPoly> vector_field(const LorenzParams& p, VarSetPtr vars) {
  if (p.sigma == 0) throw std::invalid_argument("LorenzParams: sigma must be nonzero");
  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  RPoly fx = (Y - X).scaled(p.sigma);
  RPoly rX(vars);
  if (p.r) {
    rX = X.scaled(*p.r);
  } else if (vars->index_of("r") >= 0) {
    rX = RPoly::variable(vars, "r") * X;
  } else if (vars->index_of("rho") >= 0) {
    rX = RPoly::variable(vars, "rho") * X + X;  // r = rho + 1
  } else {
    throw std::invalid_argument("vector_field: symbolic r needs an r or rho variable");
  }
  RPoly fy = rX - Y - X * Z;
  RPoly fz = X * Y - Z.scaled(p.beta);
  return {fx, fy, fz};
}

std::vector<RPoly> vector_field(const LorenzParams& p) {
  if (p.r) return vector_field(p, state_vars());
  return vector_field(p, state_vars_with(ParamVar::Rho));
}

std::vector<RPoly> vector_field_scaled(const LorenzParams& p, const Rational& scale) {
  if (!p.r) throw std::invalid_argument("vector_field_scaled: numeric r required");
  if (!(scale > 0)) throw std::invalid_argument("vector_field_scaled: positive scale required");
  VarSetPtr vars = state_vars();
  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  return {(Y - X).scaled(p.sigma), X.scaled(*p.r) - Y - (X * Z).scaled(scale),
          (X * Y).scaled(scale) - Z.scaled(p.beta)};
}

std::string MomentSpec::name() const {
  auto part = [](const char* v, int e) -> std::string {
    if (e == 0) return "";
    if (e == 1) return v;
    return std::string(v) + std::to_string(e);
  };
  std::string s = part("x", l) + part("y", m) + part("z", n);
  return s.empty() ? "1" : s;
}

RPoly MomentSpec::poly(VarSetPtr vars) const {
  polyalg::Monomial mono(vars->size());
  mono.exp[vars->index_of("x")] = l;
  mono.exp[vars->index_of("y")] = m;
  mono.exp[vars->index_of("z")] = n;
  return RPoly::monomial(vars, mono);
}

const std::vector<MomentSpec>& table_moments() {
  static const std::vector<MomentSpec> all = {
      {0, 0, 1},                                     // z
      {2, 0, 0}, {1, 1, 0}, {0, 2, 0}, {0, 0, 2},    // x2 xy y2 z2
      {2, 0, 1}, {0, 2, 1}, {1, 1, 1}, {0, 0, 3},    // x2z y2z xyz z3
      {4, 0, 0}, {3, 1, 0}, {2, 2, 0}, {2, 0, 2},    // x4 x3y x2y2 x2z2
      {1, 3, 0}, {1, 1, 2}, {0, 4, 0}, {0, 2, 2},    // xy3 xyz2 y4 y2z2
      {0, 0, 4}};                                    // z4
  return all;
}

std::optional<MomentSpec> moment_by_name(const std::string& name) {
  for (const auto& m : table_moments())
    if (m.name() == name) return m;
  return std::nullopt;
}

std::vector<std::array<double, 3>> equilibria(const LorenzParams& p) {
  if (!p.r) throw std::invalid_argument("equilibria: numeric r required");
  std::vector<std::array<double, 3>> out{{0.0, 0.0, 0.0}};
  Rational br = p.beta * (*p.r - 1);
  if (br > 0) {
    double s = std::sqrt(to_double(br));
    double zeq = to_double(*p.r - 1);
    out.push_back({s, s, zeq});
    out.push_back({-s, -s, zeq});
  }
  return out;
}

Rational moment_at_nonzero_eq(const MomentSpec& spec, const LorenzParams& p) {
  if (!spec.symmetric())
    throw std::invalid_argument("moment_at_nonzero_eq: l+m must be even for " + spec.name());
  if (!p.r) throw std::invalid_argument("moment_at_nonzero_eq: numeric r required");
  Rational rho = *p.r - 1;
  if (p.beta * rho <= 0)
    throw std::invalid_argument("moment_at_nonzero_eq: nonzero equilibria need beta(r-1) > 0");
  long half = (spec.l + spec.m) / 2;
  return rat_pow(p.beta, half) * rat_pow(rho, half + spec.n);
}

double normalize(double value, const MomentSpec& spec, const LorenzParams& p) {
  Rational eq = moment_at_nonzero_eq(spec, p);
  if (eq == 0) throw std::invalid_argument("normalize: zero equilibrium value");
  return value / to_double(eq);
}

std::array<ProportionalRecord, 2> proportional_family(int n, const LorenzParams& p) {
  if (n < 1) throw std::invalid_argument("proportional_family: n >= 1");
  VarSetPtr vars = state_vars_with(ParamVar::R);
  LorenzParams symbolic = p;
  symbolic.r.reset();
  std::vector<RPoly> f = vector_field(symbolic, vars);

  // V = -(1/(n sigma)) x^n : x^{n-1} y averages to x^n
  ProportionalRecord a{RPoly::variable(vars, "x", n).scaled(Rational(-1) / (Rational(n) * p.sigma)),
                       MomentSpec{n - 1, 1, 0}, MomentSpec{n, 0, 0}, Rational(1)};
  // V = -(1/n) z^n : x y z^{n-1} averages to beta z^n
  ProportionalRecord b{RPoly::variable(vars, "z", n).scaled(Rational(-1) / Rational(n)),
                       MomentSpec{1, 1, n - 1}, MomentSpec{0, 0, n}, p.beta};

  for (const auto& rec : {a, b}) {
    RPoly resid = rec.lhs.poly(vars) + polyalg::lie_derivative(rec.V, f) -
                  rec.rhs.poly(vars).scaled(rec.factor);
    if (!resid.is_zero())
      throw std::logic_error("proportional_family: identity failed for n=" + std::to_string(n));
  }
  return {a, b};
}

const std::vector<MomentSpec>& minimal_moment_set() {
  static const std::vector<MomentSpec> s = {{0, 0, 1}, {0, 0, 2}, {0, 2, 1},
                                            {0, 0, 3}, {0, 2, 2}, {0, 0, 4}};
  return s;
}

std::vector<MomentRelation> appendix_relations(const LorenzParams& p) {
  VarSetPtr vars = state_vars_with(ParamVar::R);
  LorenzParams symbolic = p;
  symbolic.r.reset();
  std::vector<RPoly> f = vector_field(symbolic, vars);
  const Rational& B = p.beta;
  const Rational& S = p.sigma;

  auto C = [&](const Rational& q) { return RPoly::constant(vars, q); };
  RPoly R = RPoly::variable(vars, "r");
  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  auto M = [&](int l, int m, int n) { return MomentSpec{l, m, n}; };

  using Terms = std::vector<std::pair<MomentSpec, RPoly>>;
  std::vector<MomentRelation> rows;
  auto add = [&](MomentSpec phi, RPoly V, Terms rhs) {
    rows.push_back(MomentRelation{phi, std::move(V), std::move(rhs), {}});
  };

  add(M(1, 1, 0), -Z, {{M(0, 0, 1), C(B)}});
  add(M(2, 0, 0), (X * X).scaled(Rational(1) / (2 * S)), {{M(1, 1, 0), C(1)}});
  add(M(0, 2, 0), (Y * Y + Z * Z).scaled(Rational(1, 2)),
      {{M(1, 1, 0), R}, {M(0, 0, 2), C(-B)}});
  add(M(2, 0, 1), X * Y,
      {{M(2, 0, 0), R}, {M(1, 1, 0), C(-(1 + S))}, {M(0, 2, 0), C(S)}});
  add(M(1, 1, 1), (Z * Z).scaled(Rational(-1, 2)), {{M(0, 0, 2), C(B)}});
  add(M(3, 1, 0), -(X * X * Z),
      {{M(2, 0, 1), C(B + 2 * S)}, {M(1, 1, 1), C(-2 * S)}});
  add(M(4, 0, 0), (X * X * X * X).scaled(Rational(1) / (4 * S)), {{M(3, 1, 0), C(1)}});
  add(M(1, 1, 2), (Z * Z * Z).scaled(Rational(-1, 3)), {{M(0, 0, 3), C(B)}});
  add(M(1, 3, 0), -(Y * Y * Z),
      {{M(0, 2, 1), C(2 + B)}, {M(1, 1, 1), R.scaled(Rational(-2))}, {M(1, 1, 2), C(2)}});
  {
    Rational den = 1 + B + 2 * S;
    RPoly V = ((X * Y * Z).scaled(2 * (1 + S)) + X * X * (Y * Y + Z * Z))
                  .scaled(Rational(1) / (2 * den));
    add(M(2, 0, 2), V,
        {{M(0, 2, 1), C(S * (S + 1) / den)},
         {M(2, 0, 1), R.scaled((1 + S) / den)},
         {M(1, 1, 1), C(-(1 + S) * (1 + B + S) / den)},
         {M(3, 1, 0), R.scaled(Rational(1) / den)},
         {M(1, 3, 0), C(S / den)},
         {M(1, 1, 2), C(S / den)}});
  }
  add(M(2, 2, 0), -(X * Y * Z),
      {{M(0, 2, 1), C(-S)},
       {M(2, 0, 1), -R},
       {M(1, 1, 1), C(1 + B + S)},
       {M(2, 0, 2), C(1)}});
  add(M(0, 4, 0), ((Y * Y + Z * Z) * (Y * Y + Z * Z)).scaled(Rational(1, 4)),
      {{M(1, 3, 0), R},
       {M(1, 1, 2), R},
       {M(0, 2, 2), C(-(1 + B))},
       {M(0, 0, 4), C(-B)}});

  // symbolic verification: phi + f.grad V - rhs == 0
  for (const auto& row : rows) {
    RPoly resid = row.phi.poly(vars) + polyalg::lie_derivative(row.V, f);
    for (const auto& [spec, coeff] : row.rhs) resid = resid - coeff * spec.poly(vars);
    if (!resid.is_zero())
      throw std::logic_error("appendix_relations: row " + row.phi.name() +
                             " failed symbolic verification");
  }

  // chain every moment down to the minimal set by forward substitution
  std::map<MomentSpec, Terms> chained;
  for (const auto& m : minimal_moment_set()) chained[m] = {{m, C(1)}};
  auto accumulate = [&](Terms& acc, const MomentSpec& spec, const RPoly& coeff) {
    const Terms& sub = chained.at(spec);
    for (const auto& [ms, c2] : sub) {
      bool found = false;
      for (auto& [ma, ca] : acc)
        if (ma == ms) {
          ca += coeff * c2;
          found = true;
        }
      if (!found) acc.emplace_back(ms, coeff * c2);
    }
  };
  for (auto& row : rows) {
    Terms acc;
    for (const auto& [spec, coeff] : row.rhs) accumulate(acc, spec, coeff);
    acc.erase(std::remove_if(acc.begin(), acc.end(),
                             [](const auto& t) { return t.second.is_zero(); }),
              acc.end());
    row.chained = acc;
    chained[row.phi] = acc;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// z^3 region

std::array<Rational, 5> z3_inequalities(const Rational& b, const Rational& s,
                                        const Rational& g1, const Rational& g2) {
  Rational i1 = -b * b * (4 * g1 * g1 + 2 * (g2 - 1) * g1 + (g2 - 1) * (g2 - 1)) +
                b * (2 + g2 - 2 * g1) - 1;
  Rational i2 = b * b * (4 * g1 * g1 + (g2 - 1) * (g2 - 1)) + b * (4 * g1 - 2 * (g2 + 3)) - 1;
  Rational sp1 = s + 1;
  Rational i3 = 2 * g1 * sp1 * (b * (s + 2) - 12 * g2 * sp1) +
                g2 * ((b + 12) * s * (s + 2) - 12 * g2 * sp1 * sp1 + 12) - b * sp1 * sp1 -
                12 * g1 * g1 * sp1 * sp1;
  Rational i4 = 4 * sp1 * sp1 * (b * g1 * g1 + 2 * g1 * (b * g2 + 3) + b * (g2 - 1) * g2) +
                b * (s * (s + 2) + 2) - 12 * sp1 * sp1;
  Rational i5 = b * (1 - 2 * g1) + 3;
  return {i1, i2, i3, i4, i5};
}

bool z3_inequalities_hold(const Rational& b, const Rational& s, const Rational& g1,
                          const Rational& g2) {
  auto v = z3_inequalities(b, s, g1, g2);
  return v[0] >= 0 && v[1] <= 0 && v[2] >= 0 && v[3] <= 0 && v[4] >= 0;
}

RatMat z3_gram_sym(const Rational& b, const Rational& g1, const Rational& g2) {
  RatMat m(3, 3);
  Rational f = Rational(1) / (2 * b);
  m.at(0, 0) = 2 * f;
  m.at(0, 1) = m.at(1, 0) = -f;
  m.at(0, 2) = m.at(2, 0) = (1 + 2 * b * g1) * f;
  m.at(1, 1) = 2 * f;
  m.at(1, 2) = m.at(2, 1) = (b * (g2 - 1) - 1) * f;
  m.at(2, 2) = 2 * b * f;
  return m;
}

RatMat z3_gram_anti(const Rational& b, const Rational& s, const Rational& g1,
                    const Rational& g2) {
  RatMat m(3, 3);
  Rational h(1, 2);
  m.at(0, 0) = Rational(6) / b * h;
  m.at(0, 1) = m.at(1, 0) = -h / (1 + s);
  m.at(0, 2) = m.at(2, 0) = -h;
  m.at(1, 1) = 2 * (1 - 2 * g1 - g2) * h;
  m.at(1, 2) = m.at(2, 1) = 2 * g1 * h;
  m.at(2, 2) = 2 * g2 * h;
  return m;
}

namespace {

// exact check; the five inequalities and the two-block PSD test are the same
// condition via Descartes, so run both and insist they agree
bool z3_exact_feasible(const Rational& b, const Rational& s, const Rational& g1,
                       const Rational& g2) {
  bool five = z3_inequalities_hold(b, s, g1, g2);
  bool psd = ratlin::check_psd_descartes(z3_gram_sym(b, g1, g2)).psd &&
             ratlin::check_psd_descartes(z3_gram_anti(b, s, g1, g2)).psd;
  if (five != psd) throw std::logic_error("z3 feasibility: inequality/PSD routes disagree");
  return five;
}

double z3_margin(double b, double s, double g1, double g2) {
  double i1 = -b * b * (4 * g1 * g1 + 2 * (g2 - 1) * g1 + (g2 - 1) * (g2 - 1)) +
              b * (2 + g2 - 2 * g1) - 1;
  double i2 = b * b * (4 * g1 * g1 + (g2 - 1) * (g2 - 1)) + b * (4 * g1 - 2 * (g2 + 3)) - 1;
  double sp = s + 1;
  double i3 = 2 * g1 * sp * (b * (s + 2) - 12 * g2 * sp) +
              g2 * ((b + 12) * s * (s + 2) - 12 * g2 * sp * sp + 12) - b * sp * sp -
              12 * g1 * g1 * sp * sp;
  double i4 = 4 * sp * sp * (b * g1 * g1 + 2 * g1 * (b * g2 + 3) + b * (g2 - 1) * g2) +
              b * (s * (s + 2) + 2) - 12 * sp * sp;
  double i5 = b * (1 - 2 * g1) + 3;
  return std::min({i1, -i2, i3, -i4, i5});
}

// Nelder-Mead maximization of the margin, free to leave the starting box
std::pair<double, std::array<double, 2>> nm_refine(double b, double s, double g1, double g2) {
  auto f = [&](const std::array<double, 2>& v) { return -z3_margin(b, s, v[0], v[1]); };
  std::array<std::array<double, 2>, 3> sim{{{g1, g2}, {g1 + 0.05, g2}, {g1, g2 + 0.05}}};
  std::array<double, 3> fv{f(sim[0]), f(sim[1]), f(sim[2])};
  for (int it = 0; it < 4000; ++it) {
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int c) { return fv[a] < fv[c]; });
    std::array<std::array<double, 2>, 3> ss{sim[ord[0]], sim[ord[1]], sim[ord[2]]};
    std::array<double, 3> ff{fv[ord[0]], fv[ord[1]], fv[ord[2]]};
    sim = ss;
    fv = ff;
    if (std::abs(fv[2] - fv[0]) < 1e-16 * (1 + std::abs(fv[0]))) break;
    std::array<double, 2> cen{(sim[0][0] + sim[1][0]) / 2, (sim[0][1] + sim[1][1]) / 2};
    auto ref = [&](double t) {
      return std::array<double, 2>{cen[0] + t * (cen[0] - sim[2][0]),
                                   cen[1] + t * (cen[1] - sim[2][1])};
    };
    auto xr = ref(1.0);
    double fr = f(xr);
    if (fr < fv[0]) {
      auto xe = ref(2.0);
      double fe = f(xe);
      if (fe < fr) {
        sim[2] = xe;
        fv[2] = fe;
      } else {
        sim[2] = xr;
        fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      sim[2] = xr;
      fv[2] = fr;
    } else {
      auto xc = ref(-0.5);
      double fc = f(xc);
      if (fc < fv[2]) {
        sim[2] = xc;
        fv[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          sim[i] = {(sim[i][0] + sim[0][0]) / 2, (sim[i][1] + sim[0][1]) / 2};
          fv[i] = f(sim[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (fv[i] < fv[best]) best = i;
  return {-fv[best], sim[best]};
}

}  // namespace

GammaRegion gamma_feasible(const Rational& beta, const Rational& sigma,
                           std::optional<std::pair<double, double>> hint) {
  GammaRegion out;
  out.beta = beta;
  out.sigma = sigma;
  if (!(beta > 0) || !(sigma > 0))
    throw std::invalid_argument("gamma_feasible: beta, sigma must be positive");

  // simple exact candidates first; (0, 3/8) is the admissible point the
  // standard-parameter certificate uses
  const std::pair<Rational, Rational> candidates[] = {
      {Rational(0), Rational(3, 8)}, {Rational(2, 99), Rational(2, 9)}};
  for (const auto& [g1, g2] : candidates) {
    if (z3_exact_feasible(beta, sigma, g1, g2)) {
      out.feasible = true;
      out.witness = {g1, g2};
      out.refined_margin =
          z3_margin(to_double(beta), to_double(sigma), to_double(g1), to_double(g2));
      return out;
    }
  }

  double b = to_double(beta), s = to_double(sigma);
  double best = -std::numeric_limits<double>::infinity();
  double bg1 = 0, bg2 = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double g2 = static_cast<double>(i) / (n - 1);
      double g1 = -1.0 + 2.0 * static_cast<double>(j) / (n - 1);
      double m = z3_margin(b, s, g1, g2);
      if (m > best) {
        best = m;
        bg1 = g1;
        bg2 = g2;
      }
    }
  auto [margin, pt] = nm_refine(b, s, bg1, bg2);
  if (hint) {
    auto [hm, hp] = nm_refine(b, s, hint->first, hint->second);
    if (hm > margin) {
      margin = hm;
      pt = hp;
    }
  }
  out.refined_margin = margin;

  if (margin > 0) {
    // rationalize and verify exactly; retry slight perturbations if rounding
    // lands outside
    const BigInt den("1000000000000");
    for (auto [d1, d2] : {std::pair{0.0, 0.0}, {1e-9, 0.0}, {-1e-9, 0.0}, {0.0, 1e-9},
                          {0.0, -1e-9}}) {
      Rational g1 = cf_round(rational_from_double(pt[0] + d1), den);
      Rational g2 = cf_round(rational_from_double(pt[1] + d2), den);
      if (z3_exact_feasible(beta, sigma, g1, g2)) {
        out.feasible = true;
        out.witness = {g1, g2};
        return out;
      }
    }
  }
  out.feasible = false;
  return out;
}

std::pair<double, Rational> z3_region_bounds(const Rational& sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("z3_region_bounds: sigma > 0");
  Rational upper = 12 * (1 + sigma) * (1 + sigma) / ((2 + sigma) * (2 + sigma));

  // bisection on the lower boundary with witness continuation
  double lo = 0.02, hi = 0.1;
  std::optional<std::pair<double, double>> hint;
  auto feas = [&](double bv) {
    GammaRegion r = gamma_feasible(cf_round(bv, 1000000000L), sigma, hint);
    if (r.feasible && r.witness)
      hint = {to_double(r.witness->first), to_double(r.witness->second)};
    return r.feasible;
  };
  int guard = 0;
  while (!feas(hi) && guard++ < 8) hi *= 1.8;
  while (feas(lo) && guard++ < 16) lo *= 0.5;
  while (hi - lo > 1e-6) {
    double mid = 0.5 * (lo + hi);
    if (feas(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {hi, upper};
}

// ---------------------------------------------------------------------------
// built-in certificates

std::optional<Builtin> builtin_by_name(const std::string& name) {
  if (name == "z2") return Builtin::Z2;
  if (name == "z3") return Builtin::Z3;
  if (name == "xy3") return Builtin::XY3;
  return std::nullopt;
}

std::vector<RPoly> builtin_certificate_field(Builtin which, const LorenzParams& p,
                                             VarSetPtr vars) {
  LorenzParams symbolic = p;
  symbolic.r.reset();
  (void)which;
  return vector_field(symbolic, vars);
}

certify::RationalCertificate builtin_certificate(Builtin which, const LorenzParams& p) {
  const Rational& B = p.beta;
  const Rational& S = p.sigma;
  if (!(B > 0)) throw RegionViolation("beta must be positive");
  if (S == 0) throw RegionViolation("sigma must be nonzero");
  certify::RationalCertificate cert;

  if (which == Builtin::Z2) {
    VarSetPtr vars = state_vars_with(ParamVar::R);
    auto X = RPoly::variable(vars, "x");
    auto Y = RPoly::variable(vars, "y");
    auto Z = RPoly::variable(vars, "z");
    auto R = RPoly::variable(vars, "r");
    cert.sense = certify::Sense::Upper;
    cert.phi = Z * Z;
    cert.bound_value = (R - RPoly::constant(vars, 1)) * (R - RPoly::constant(vars, 1));
    cert.V = (Z.scaled(2) - (R * Z).scaled(2) + (X * X).scaled(Rational(1) / S) + Y * Y + Z * Z)
                 .scaled(Rational(1) / B);
    cert.aux_coeffs = {2 / B, 1 / (B * S), 1 / B};
    cert.basis.sym = {Z - R + RPoly::constant(vars, 1)};
    cert.basis.anti = {X - Y};
    cert.gram_s = RatMat(1, 1);
    cert.gram_s.at(0, 0) = 1;
    cert.gram_a = RatMat(1, 1);
    cert.gram_a.at(0, 0) = 2 / B;
    return cert;
  }

  if (which == Builtin::Z3) {
    GammaRegion region = gamma_feasible(B, S);
    if (!region.feasible)
      throw RegionViolation("z3 certificate: no (gamma1,gamma2) satisfies the five "
                            "inequalities at beta=" +
                            rat_str(B) + ", sigma=" + rat_str(S));
    auto [g1, g2] = *region.witness;
    VarSetPtr vars = state_vars_with(ParamVar::Rho);
    auto X = RPoly::variable(vars, "x");
    auto Y = RPoly::variable(vars, "y");
    auto Z = RPoly::variable(vars, "z");
    auto Rho = RPoly::variable(vars, "rho");
    cert.sense = certify::Sense::Upper;
    cert.phi = Rho * Z * Z * Z;
    cert.bound_value = Rho * Rho * Rho * Rho;
    RPoly core = Y * Y + Z * Z - (Rho * Z).scaled(2);
    RPoly b1 = (X * X * X * X).scaled(Rational(1) / S) + core * core +
               (Rho * Rho * core).scaled(8) + (Rho * Rho * X * X).scaled(Rational(6) / S);
    RPoly lin = X.scaled(Rational(1) / S) + Y;
    RPoly b2 = -(Rho * lin * lin);
    Rational c1 = Rational(1) / (4 * B);
    Rational c2 = S / (2 * (1 + S));
    cert.V = b1.scaled(c1) + b2.scaled(c2);
    cert.aux_coeffs = {c1, c2};
    cert.basis.sym = {X * X - X * Y, X * X - Y * Y, (Z - Rho) * (Z - Rho)};
    cert.basis.anti = {Rho * (X - Y), X * (Z - Rho), Y * (Z - Rho)};
    cert.gram_s = z3_gram_sym(B, g1, g2);
    cert.gram_a = z3_gram_anti(B, S, g1, g2);
    return cert;
  }

  // XY3: valid iff beta^2 - 12 beta + 4 <= 0, i.e. beta in [6-4sqrt2, 6+4sqrt2]
  Rational disc = B * B - 12 * B + 4;
  if (disc > 0)
    throw RegionViolation("xy3 certificate: beta^2 - 12 beta + 4 = " + rat_str(disc) +
                          " > 0 (beta outside [6-4*sqrt(2), 6+4*sqrt(2)])");
  VarSetPtr vars = state_vars_with(ParamVar::R);
  auto X = RPoly::variable(vars, "x");
  auto Y = RPoly::variable(vars, "y");
  auto Z = RPoly::variable(vars, "z");
  auto R = RPoly::variable(vars, "r");
  cert.sense = certify::Sense::Lower;
  // doubled normalization: phi = 2 r x y^3, V doubled accordingly, under
  // which the antisymmetric block is exactly [2 beta]
  cert.phi = (R * X * Y * Y * Y).scaled(2);
  cert.bound_value = RPoly::zero(vars);
  RPoly yz2 = Y * Y + Z * Z;
  cert.V = -(R * R * Z * Z).scaled(2) + (R * Y * Y * Z).scaled(2) +
           (R * Z * Z * Z).scaled(Rational(8, 3)) - yz2 * yz2;
  cert.basis.sym = {R * Z, Y * Y, Z * Z};
  cert.basis.anti = {Y * Z};
  cert.gram_s = RatMat(3, 3);
  cert.gram_s.at(0, 0) = 4 * B;
  cert.gram_s.at(0, 1) = cert.gram_s.at(1, 0) = -(2 + B);
  cert.gram_s.at(0, 2) = cert.gram_s.at(2, 0) = -4 * B;
  cert.gram_s.at(1, 1) = 4;
  cert.gram_s.at(1, 2) = cert.gram_s.at(2, 1) = 2 + B;
  cert.gram_s.at(2, 2) = 4 * B;
  cert.gram_a = RatMat(1, 1);
  cert.gram_a.at(0, 0) = 2 * B;
  return cert;
}

}  // namespace sosbound::lorenz
