#pragma once

// Exact multivariate polynomial arithmetic over a fixed, ordered variable set.
//
// A VarSet splits its symbols into state variables (the dynamical coordinates,
// e.g. x, y, z) and parameter variables (quantities like rho = r-1 that enter
// the polynomial ring but are not differentiated along the flow).  Monomials
// are exponent vectors over the full set; terms are kept in a map under graded
// lexicographic order, so iteration (and hence constraint assembly downstream)
// is deterministic.
//
// Poly<C> is generic over the coefficient ring: Rational for exact work,
// double for solver interop, LinExpr for polynomials whose coefficients are
// affine in named unknowns (auxiliary-function coefficients, bound unknowns).
// Exact mode never rounds.

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosbound/rational.hpp"

namespace sosbound::polyalg {

class VarSet {
 public:
  VarSet(std::vector<std::string> state_vars, std::vector<std::string> param_vars = {})
      : state_(std::move(state_vars)), param_(std::move(param_vars)) {
    for (const auto& v : state_) names_.push_back(v);
    for (const auto& v : param_) names_.push_back(v);
    for (size_t i = 0; i < names_.size(); ++i) {
      if (index_of(names_[i]) != static_cast<int>(i))
        throw std::invalid_argument("VarSet: duplicate symbol " + names_[i]);
    }
  }

  size_t size() const { return names_.size(); }
  size_t n_state() const { return state_.size(); }
  size_t n_param() const { return param_.size(); }
  const std::vector<std::string>& state_vars() const { return state_; }
  const std::vector<std::string>& param_vars() const { return param_; }
  const std::string& name(size_t i) const { return names_.at(i); }
  bool is_param(size_t i) const { return i >= state_.size(); }

  int index_of(const std::string& v) const {
    for (size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == v) return static_cast<int>(i);
    return -1;
  }

  bool operator==(const VarSet& o) const { return state_ == o.state_ && param_ == o.param_; }
  bool operator!=(const VarSet& o) const { return !(*this == o); }

 private:
  std::vector<std::string> state_, param_, names_;
};

using VarSetPtr = std::shared_ptr<const VarSet>;

inline VarSetPtr make_varset(std::vector<std::string> state, std::vector<std::string> param = {}) {
  return std::make_shared<const VarSet>(std::move(state), std::move(param));
}

struct Monomial {
  std::vector<int> exp;

  explicit Monomial(size_t nvars = 0) : exp(nvars, 0) {}
  explicit Monomial(std::vector<int> e) : exp(std::move(e)) {}

  int total_degree() const {
    int d = 0;
    for (int e : exp) d += e;
    return d;
  }

  Monomial operator*(const Monomial& o) const {
    if (exp.size() != o.exp.size()) throw std::invalid_argument("Monomial: size mismatch");
    Monomial r(exp.size());
    for (size_t i = 0; i < exp.size(); ++i) r.exp[i] = exp[i] + o.exp[i];
    return r;
  }

  bool operator==(const Monomial& o) const { return exp == o.exp; }
};

// Graded lexicographic: lower total degree first, then lex on the fixed
// variable order (a term with a higher exponent on an earlier variable is
// "larger").  Map iteration is ascending; printing walks it in reverse.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    for (size_t i = 0; i < a.exp.size(); ++i)
      if (a.exp[i] != b.exp[i]) return a.exp[i] < b.exp[i];
    return false;
  }
};

// Affine expression over named unknowns with rational coefficients.
struct LinExpr {
  Rational constant{0};
  std::map<std::string, Rational> lin;

  LinExpr() = default;
  LinExpr(Rational c) : constant(std::move(c)) {}  // NOLINT: implicit lift
  static LinExpr unknown(const std::string& name, Rational coeff = Rational(1)) {
    LinExpr e;
    e.lin[name] = std::move(coeff);
    return e;
  }

  bool is_zero() const { return constant == 0 && lin.empty(); }
  bool is_constant() const { return lin.empty(); }

  LinExpr& operator+=(const LinExpr& o) {
    constant += o.constant;
    for (const auto& [k, v] : o.lin) {
      Rational& c = lin[k];
      c += v;
      if (c == 0) lin.erase(k);
    }
    return *this;
  }
  LinExpr operator+(const LinExpr& o) const {
    LinExpr r = *this;
    r += o;
    return r;
  }
  LinExpr operator-() const {
    LinExpr r;
    r.constant = -constant;
    for (const auto& [k, v] : lin) r.lin[k] = -v;
    return r;
  }
  LinExpr operator-(const LinExpr& o) const { return *this + (-o); }
  LinExpr operator*(const Rational& s) const {
    LinExpr r;
    if (s == 0) return r;
    r.constant = constant * s;
    for (const auto& [k, v] : lin) r.lin[k] = v * s;
    return r;
  }
  bool operator==(const LinExpr& o) const { return constant == o.constant && lin == o.lin; }

  // Substitutes values for every unknown present.
  Rational eval(const std::map<std::string, Rational>& vals) const {
    Rational r = constant;
    for (const auto& [k, v] : lin) {
      auto it = vals.find(k);
      if (it == vals.end()) throw std::invalid_argument("LinExpr::eval: missing unknown " + k);
      r += v * it->second;
    }
    return r;
  }
};

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Rational> {
  static bool is_zero(const Rational& c) { return c == 0; }
};
template <>
struct CoeffTraits<double> {
  static bool is_zero(double c) { return c == 0.0; }
};
template <>
struct CoeffTraits<LinExpr> {
  static bool is_zero(const LinExpr& c) { return c.is_zero(); }
};

template <class C>
class Poly {
 public:
  using TermMap = std::map<Monomial, C, GradedLexLess>;

  explicit Poly(VarSetPtr vars) : vars_(std::move(vars)) {
    if (!vars_) throw std::invalid_argument("Poly: null VarSet");
  }

  static Poly zero(VarSetPtr vars) { return Poly(std::move(vars)); }

  static Poly constant(VarSetPtr vars, C c) {
    Poly p(std::move(vars));
    p.set_coeff(Monomial(p.vars_->size()), std::move(c));
    return p;
  }

  static Poly variable(VarSetPtr vars, const std::string& name, int power = 1) {
    Poly p(vars);
    int idx = vars->index_of(name);
    if (idx < 0) throw std::invalid_argument("Poly::variable: unknown symbol " + name);
    Monomial m(vars->size());
    m.exp[idx] = power;
    p.set_coeff(m, C(1));
    return p;
  }

  static Poly monomial(VarSetPtr vars, Monomial m, C c = C(1)) {
    Poly p(vars);
    p.set_coeff(std::move(m), std::move(c));
    return p;
  }

  const VarSet& vars() const { return *vars_; }
  VarSetPtr vars_ptr() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t n_terms() const { return terms_.size(); }

  // -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
    return d;
  }

  C coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? C(0) : it->second;
  }

  void set_coeff(Monomial m, C c) {
    if (m.exp.size() != vars_->size()) throw std::invalid_argument("Poly: monomial arity");
    if (CoeffTraits<C>::is_zero(c))
      terms_.erase(m);
    else
      terms_[std::move(m)] = std::move(c);
  }

  void add_term(const Monomial& m, const C& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!CoeffTraits<C>::is_zero(c)) terms_.emplace(m, c);
    } else {
      it->second = it->second + c;
      if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    require_same_vars(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
  }
  Poly operator-() const {
    Poly r(vars_);
    for (const auto& [m, c] : terms_) r.terms_[m] = C(0) - c;
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }

  Poly operator*(const Poly& o) const {
    require_same_vars(o);
    Poly r(vars_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  Poly scaled(const C& s) const {
    Poly r(vars_);
    if (CoeffTraits<C>::is_zero(s)) return r;
    for (const auto& [m, c] : terms_) r.set_coeff(m, c * s);
    return r;
  }

  bool operator==(const Poly& o) const { return *vars_ == *o.vars_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  // Formal partial derivative; v must be a state variable.
  Poly differentiate(const std::string& v) const {
    int idx = vars_->index_of(v);
    if (idx < 0 || vars_->is_param(idx))
      throw std::invalid_argument("differentiate: not a state variable: " + v);
    Poly r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m.exp[idx] == 0) continue;
      Monomial dm = m;
      int e = dm.exp[idx]--;
      r.add_term(dm, c * C(e));
    }
    return r;
  }

  // (x,y) -> (-x,-y): each term picks up (-1)^(ex+ey).
  Poly apply_symmetry() const {
    int ix = vars_->index_of("x"), iy = vars_->index_of("y");
    if (ix < 0 || iy < 0) throw std::invalid_argument("apply_symmetry: VarSet lacks x or y");
    Poly r(vars_);
    for (const auto& [m, c] : terms_) {
      if ((m.exp[ix] + m.exp[iy]) % 2 == 0)
        r.terms_[m] = c;
      else
        r.terms_[m] = C(0) - c;
    }
    return r;
  }

  bool is_symmetric() const { return apply_symmetry() == *this; }

  // Substitute variable := q (same VarSet).
  Poly substituted(const std::string& v, const Poly& q) const {
    require_same_vars(q);
    int idx = vars_->index_of(v);
    if (idx < 0) throw std::invalid_argument("substituted: unknown variable " + v);
    Poly r(vars_);
    for (const auto& [m, c] : terms_) {
      Monomial base = m;
      int e = base.exp[idx];
      base.exp[idx] = 0;
      Poly term = Poly::monomial(vars_, base, c);
      for (int k = 0; k < e; ++k) term = term * q;
      r += term;
    }
    return r;
  }

  template <class V>
  V eval(const std::map<std::string, V>& point) const {
    V acc(0);
    for (const auto& [m, c] : terms_) {
      V t = coeff_as<V>(c);
      for (size_t i = 0; i < m.exp.size(); ++i) {
        if (m.exp[i] == 0) continue;
        auto it = point.find(vars_->name(i));
        if (it == point.end())
          throw std::invalid_argument("Poly::eval: missing assignment for " + vars_->name(i));
        V b = it->second;
        for (int k = 0; k < m.exp[i]; ++k) t = t * b;
      }
      acc = acc + t;
    }
    return acc;
  }

 private:
  template <class V>
  static V coeff_as(const C& c);

  void require_same_vars(const Poly& o) const {
    if (*vars_ != *o.vars_) throw std::invalid_argument("Poly: VarSet mismatch");
  }

  VarSetPtr vars_;
  TermMap terms_;
};

template <>
template <>
inline Rational Poly<Rational>::coeff_as<Rational>(const Rational& c) {
  return c;
}
template <>
template <>
inline double Poly<Rational>::coeff_as<double>(const Rational& c) {
  return to_double(c);
}
template <>
template <>
inline double Poly<double>::coeff_as<double>(const double& c) {
  return c;
}

using RPoly = Poly<Rational>;
using DPoly = Poly<double>;
using LPoly = Poly<LinExpr>;

// d/dt V along x' = f(x):  sum_i f_i dV/dx_i.  Parameter variables ride along
// as constants.
template <class C>
Poly<C> lie_derivative(const Poly<C>& V, const std::vector<Poly<C>>& f) {
  const VarSet& vs = V.vars();
  if (f.size() != vs.n_state()) throw std::invalid_argument("lie_derivative: dim mismatch");
  Poly<C> r(V.vars_ptr());
  for (size_t i = 0; i < f.size(); ++i) r += f[i] * V.differentiate(vs.state_vars()[i]);
  return r;
}

inline LPoly lift(const RPoly& p) {
  LPoly r(p.vars_ptr());
  for (const auto& [m, c] : p.terms()) r.set_coeff(m, LinExpr(c));
  return r;
}

inline DPoly to_float(const RPoly& p) {
  DPoly r(p.vars_ptr());
  for (const auto& [m, c] : p.terms()) r.set_coeff(m, to_double(c));
  return r;
}

// Substitutes rational values for (some) unknowns of an affine-coefficient
// polynomial; fully-substituted polynomials convert back to exact mode.
inline RPoly substitute_unknowns(const LPoly& p, const std::map<std::string, Rational>& vals) {
  RPoly r(p.vars_ptr());
  for (const auto& [m, c] : p.terms()) r.set_coeff(m, c.eval(vals));
  return r;
}

// ---------------------------------------------------------------------------
// Textual form, e.g. "3/8*x^2*y - 2*r*z^2".  Round-trippable; terms print in
// descending graded-lex order.

// parameters print before state variables, as in "2*r*z^2"
inline std::string monomial_str(const VarSet& vs, const Monomial& m) {
  std::string s;
  auto append = [&](size_t i) {
    if (m.exp[i] == 0) return;
    if (!s.empty()) s += "*";
    s += vs.name(i);
    if (m.exp[i] > 1) s += "^" + std::to_string(m.exp[i]);
  };
  for (size_t i = vs.n_state(); i < vs.size(); ++i) append(i);
  for (size_t i = 0; i < vs.n_state(); ++i) append(i);
  return s;
}

inline std::string to_string(const RPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = c;
    if (out.empty()) {
      if (a < 0) {
        out += "-";
        a = -a;
      }
    } else {
      out += (a < 0) ? " - " : " + ";
      if (a < 0) a = -a;
    }
    std::string ms = monomial_str(p.vars(), m);
    if (ms.empty())
      out += rat_str(a);
    else if (a == 1)
      out += ms;
    else
      out += rat_str(a) + "*" + ms;
  }
  return out;
}

RPoly parse_poly(VarSetPtr vars, const std::string& text);

}  // namespace sosbound::polyalg
