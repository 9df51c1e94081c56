#include "sosbound/sosform.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sosbound::sosform {

using polyalg::GradedLexLess;
using polyalg::monomial_str;
using ratlin::RatMat;

SFunction build_bound_poly(const RPoly& phi, const std::vector<RPoly>& f, const AuxAnsatz& ansatz,
                           Sense sense, const BoundAnsatz& bound) {
  VarSetPtr vars = phi.vars_ptr();
  for (const auto& fi : f)
    if (fi.vars() != *vars) throw std::invalid_argument("build_bound_poly: VarSet mismatch in f");
  if (f.size() != vars->n_state())
    throw std::invalid_argument("build_bound_poly: |f| != #state vars");
  for (const auto& [m, c] : bound.fixed_part.terms()) {
    for (size_t i = 0; i < vars->n_state(); ++i)
      if (m.exp[i] != 0)
        throw std::invalid_argument("build_bound_poly: bound ansatz must use parameters only");
  }
  if (ansatz.basis_polys.size() != ansatz.coeff_names.size())
    throw std::invalid_argument("build_bound_poly: ansatz coeff/basis size mismatch");

  // phi - bound + sum_i c_i * (f.grad B_i), then negated for the upper sense
  LPoly core = polyalg::lift(phi) + polyalg::lift(-bound.fixed_part);
  if (bound.unknown)
    core.add_term(Monomial(vars->size()), LinExpr::unknown(*bound.unknown, Rational(-1)));

  SFunction out(LPoly(vars), sense);
  out.bound_unknown = bound.unknown;
  out.phi = phi;
  out.bound_fixed_part = bound.fixed_part;
  if (bound.unknown) out.unknown_degree[*bound.unknown] = 0;
  for (size_t i = 0; i < ansatz.basis_polys.size(); ++i) {
    const RPoly lie = polyalg::lie_derivative(ansatz.basis_polys[i], f);
    const LinExpr ci = LinExpr::unknown(ansatz.coeff_names[i]);
    for (const auto& [m, c] : lie.terms()) core.add_term(m, ci * c);
    out.unknown_degree[ansatz.coeff_names[i]] = ansatz.basis_polys[i].degree();
  }
  out.ansatz_polys = ansatz.basis_polys;
  out.ansatz_names = ansatz.coeff_names;
  out.poly = (sense == Sense::Lower) ? core : -core;
  return out;
}

namespace {

// all monomials over nvars with total degree in [lo, hi]
void enum_monomials(size_t nvars, int lo, int hi, std::vector<Monomial>& out) {
  Monomial m(nvars);
  std::function<void(size_t, int)> rec = [&](size_t pos, int deg) {
    if (pos == nvars) {
      if (deg >= lo) out.push_back(m);
      return;
    }
    for (int e = 0; deg + e <= hi; ++e) {
      m.exp[pos] = e;
      rec(pos + 1, deg + e);
    }
    m.exp[pos] = 0;
  };
  rec(0, 0);
}

int xy_parity(const polyalg::VarSet& vs, const Monomial& m) {
  int ix = vs.index_of("x"), iy = vs.index_of("y");
  int p = 0;
  if (ix >= 0) p += m.exp[ix];
  if (iy >= 0) p += m.exp[iy];
  return p % 2;
}

RPoly content_normalized(const RPoly& p) {
  if (p.is_zero()) return p;
  // divide by gcd of numerators / lcm of denominators, leading coeff positive
  BigInt num_gcd = 0, den_lcm = 1;
  for (const auto& [m, c] : p.terms()) {
    num_gcd = boost::multiprecision::gcd(num_gcd, BigInt(boost::multiprecision::abs(numerator(c))));
    den_lcm = boost::multiprecision::lcm(den_lcm, denominator(c));
  }
  Rational content(num_gcd, den_lcm);
  RPoly q = p.scaled(Rational(1) / content);
  const auto& lead = *q.terms().rbegin();
  if (lead.second < 0) q = -q;
  return q;
}

}  // namespace

AuxAnsatz gen_lorenz_V_basis(int degree, bool include_r, VarSetPtr vars) {
  if (degree < 2 || degree % 2 != 0)
    throw std::invalid_argument("gen_lorenz_V_basis: degree must be even and >= 2");
  const auto& vs = *vars;
  if (include_r && vs.n_param() != 1)
    throw std::invalid_argument("gen_lorenz_V_basis: include_r needs one parameter variable");

  AuxAnsatz out;
  auto push = [&](RPoly p) {
    out.coeff_names.push_back("c" + std::to_string(out.basis_polys.size()));
    out.basis_polys.push_back(std::move(p));
  };

  // symmetric monomials of degree 1 .. degree-1, pure-parameter ones excluded
  std::vector<Monomial> monos;
  enum_monomials(vs.size(), 1, degree - 1, monos);
  std::sort(monos.begin(), monos.end(), GradedLexLess{});
  for (const auto& m : monos) {
    if (xy_parity(vs, m) != 0) continue;
    bool pure_param = true;
    for (size_t i = 0; i < vs.n_state(); ++i)
      if (m.exp[i] != 0) pure_param = false;
    if (pure_param) continue;
    push(RPoly::monomial(vars, m));
  }

  // top degree: x^p (y^2+z^2)^q, or r^s x^p (y^2+z^2-2rz)^q with r analytic
  RPoly xv = RPoly::variable(vars, "x");
  RPoly core = RPoly::variable(vars, "y", 2) + RPoly::variable(vars, "z", 2);
  if (include_r) {
    const std::string& r = vs.param_vars()[0];
    core += RPoly::variable(vars, r).scaled(Rational(-2)) * RPoly::variable(vars, "z");
  }
  int smax = include_r ? degree : 0;
  for (int s = 0; s <= smax; ++s) {
    for (int p = degree - s; p >= 0; --p) {
      int rem = degree - s - p;
      if (p % 2 != 0 || rem % 2 != 0) continue;
      int q = rem / 2;
      if (p == 0 && q == 0) continue;  // pure r^degree contributes nothing
      RPoly e = RPoly::constant(vars, Rational(1));
      if (s > 0) e = e * RPoly::variable(vars, vs.param_vars()[0], s);
      if (p > 0) e = e * RPoly::variable(vars, "x", p);
      for (int k = 0; k < q; ++k) e = e * core;
      push(std::move(e));
    }
  }
  return out;
}

AuxAnsatz gen_lorenz_V_basis(int degree, bool include_r) {
  VarSetPtr vars = include_r ? polyalg::make_varset({"x", "y", "z"}, {"r"})
                             : polyalg::make_varset({"x", "y", "z"});
  return gen_lorenz_V_basis(degree, include_r, vars);
}

BasisPair gen_basis_pair(const SFunction& s) {
  const auto& vs = s.poly.vars();
  VarSetPtr vars = s.poly.vars_ptr();
  int maxdeg = s.poly.degree();
  if (maxdeg < 0) return {};
  int d = (maxdeg + 1) / 2;

  std::set<Monomial, GradedLexLess> smonos;
  for (const auto& [m, c] : s.poly.terms()) smonos.insert(m);

  std::vector<Monomial> cand;
  enum_monomials(vs.size(), 0, d, cand);
  std::sort(cand.begin(), cand.end(), GradedLexLess{});
  std::vector<Monomial> by_parity[2];
  for (const auto& m : cand) by_parity[xy_parity(vs, m)].push_back(m);

  // keep a candidate only if some same-parity product lands on an S monomial;
  // over-inclusive at worst, assembly errors loudly if anything is missing
  BasisPair out;
  for (int par = 0; par < 2; ++par) {
    for (const auto& m : by_parity[par]) {
      bool hit = false;
      for (const auto& m2 : by_parity[par]) {
        if (smonos.count(m * m2)) {
          hit = true;
          break;
        }
      }
      if (hit) {
        auto poly = RPoly::monomial(vars, m);
        (par == 0 ? out.sym : out.anti).push_back(std::move(poly));
      }
    }
  }
  return out;
}

BasisPair reduce_basis(const BasisPair& pair, const std::vector<Substitution>& locus,
                       const std::vector<NullVector>& extra_null_vectors) {
  auto restrict_block = [&](const std::vector<RPoly>& block) -> std::vector<RPoly> {
    if (block.empty() || locus.empty()) return block;
    std::vector<RPoly> restricted;
    for (const auto& b : block) {
      RPoly r = b;
      for (const auto& sub : locus) {
        if (r.vars().index_of(sub.var) < 0)
          throw std::invalid_argument("reduce_basis: unknown variable " + sub.var);
        r = r.substituted(sub.var, sub.value);
      }
      restricted.push_back(std::move(r));
    }
    // kernel of (coeff vector -> restricted polynomial)
    std::set<Monomial, GradedLexLess> monos;
    for (const auto& r : restricted)
      for (const auto& [m, c] : r.terms()) monos.insert(m);
    std::vector<Monomial> rows(monos.begin(), monos.end());
    RatMat a(rows.size(), block.size());
    for (size_t j = 0; j < restricted.size(); ++j)
      for (size_t i = 0; i < rows.size(); ++i) a.at(i, j) = restricted[j].coeff(rows[i]);
    auto kernel = ratlin::kernel_basis(a);
    std::vector<RPoly> out;
    for (const auto& v : kernel) {
      RPoly p(block[0].vars_ptr());
      for (size_t j = 0; j < block.size(); ++j)
        if (v[j] != 0) p += block[j].scaled(v[j]);
      out.push_back(content_normalized(p));
    }
    return out;
  };

  BasisPair reduced{restrict_block(pair.sym), restrict_block(pair.anti)};

  for (const auto& nv : extra_null_vectors) {
    std::vector<RPoly>& block = (nv.block == Block::Sym) ? reduced.sym : reduced.anti;
    if (nv.v.size() != block.size())
      throw std::invalid_argument("reduce_basis: null vector length mismatch");
    size_t p = block.size();
    for (size_t i = block.size(); i-- > 0;) {
      if (nv.v[i] != 0) {
        p = i;
        break;
      }
    }
    if (p == block.size()) continue;  // zero null vector
    std::vector<RPoly> merged;
    for (size_t i = 0; i < block.size(); ++i) {
      if (i == p) continue;
      RPoly e = block[i];
      if (nv.v[i] != 0) e += block[p].scaled(-nv.v[i] / nv.v[p]);
      merged.push_back(content_normalized(e));
    }
    block = std::move(merged);
  }
  return reduced;
}

size_t GramProblem::qs_col(size_t i, size_t j) const {
  size_t ns = n_sym();
  if (i > j || j >= ns) throw std::out_of_range("qs_col");
  return i * ns - i * (i - 1) / 2 + (j - i);
}
size_t GramProblem::qa_col(size_t i, size_t j) const {
  size_t na = n_anti();
  if (i > j || j >= na) throw std::out_of_range("qa_col");
  return nqs + i * na - i * (i - 1) / 2 + (j - i);
}
size_t GramProblem::scalar_col(const std::string& name) const {
  for (size_t k = 0; k < scalar_names.size(); ++k)
    if (scalar_names[k] == name) return nqs + nqa + k;
  throw std::out_of_range("scalar_col: " + name);
}

GramProblem assemble_gram_constraints(const SFunction& s, const BasisPair& basis) {
  GramProblem g;
  g.s = s;
  g.basis = basis;
  size_t ns = basis.sym.size(), na = basis.anti.size();
  g.nqs = ns * (ns + 1) / 2;
  g.nqa = na * (na + 1) / 2;

  std::set<std::string> names;
  for (const auto& [m, c] : s.poly.terms())
    for (const auto& [k, v] : c.lin) names.insert(k);
  for (const auto& n : names)
    if (!s.bound_unknown || n != *s.bound_unknown) g.scalar_names.push_back(n);
  if (s.bound_unknown && names.count(*s.bound_unknown))
    g.scalar_names.push_back(*s.bound_unknown);  // bound unknown last
  if (s.bound_unknown && names.count(*s.bound_unknown)) {
    g.objective = s.bound_unknown;
    g.maximize = (s.sense == Sense::Lower);
  }

  // expand all products once
  std::map<Monomial, std::vector<std::pair<size_t, Rational>>, GradedLexLess> gram_cols;
  auto add_products = [&](const std::vector<RPoly>& block, bool sym_block) {
    for (size_t i = 0; i < block.size(); ++i)
      for (size_t j = i; j < block.size(); ++j) {
        RPoly prod = block[i] * block[j];
        size_t col = sym_block ? g.qs_col(i, j) : g.qa_col(i, j);
        Rational mult = (i == j) ? 1 : 2;
        for (const auto& [m, c] : prod.terms()) gram_cols[m].emplace_back(col, c * mult);
      }
  };
  add_products(basis.sym, true);
  add_products(basis.anti, false);

  std::set<Monomial, GradedLexLess> all_monos;
  for (const auto& [m, c] : s.poly.terms()) all_monos.insert(m);
  for (const auto& [m, cols] : gram_cols) all_monos.insert(m);

  size_t ncols = g.nqs + g.nqa + g.scalar_names.size();

  // raw row per monomial, then keep an independent subset in monomial order
  std::vector<std::vector<Rational>> kept_rows;
  std::vector<std::vector<Rational>> red_rows;
  std::vector<Rational> red_rhs;
  std::vector<size_t> red_pivot;

  for (const auto& mono : all_monos) {
    std::vector<Rational> row(ncols, Rational(0));
    auto git = gram_cols.find(mono);
    if (git != gram_cols.end())
      for (const auto& [col, coef] : git->second) row[col] += coef;
    LinExpr sc = s.poly.coeff(mono);
    for (const auto& [k, v] : sc.lin) row[g.scalar_col(k)] -= v;
    Rational rhs = sc.constant;

    bool all_zero = std::all_of(row.begin(), row.end(), [](const Rational& q) { return q == 0; });
    if (all_zero) {
      if (rhs != 0) throw UnrepresentableError(monomial_str(s.poly.vars(), mono));
      continue;
    }

    // reduce against accumulated rows
    std::vector<Rational> work = row;
    Rational wrhs = rhs;
    for (size_t rrow = 0; rrow < red_rows.size(); ++rrow) {
      const Rational& f = work[red_pivot[rrow]];
      if (f == 0) continue;
      Rational fc = f;
      for (size_t j = 0; j < ncols; ++j) work[j] -= fc * red_rows[rrow][j];
      wrhs -= fc * red_rhs[rrow];
    }
    size_t piv = ncols;
    for (size_t j = 0; j < ncols; ++j)
      if (work[j] != 0) {
        piv = j;
        break;
      }
    if (piv == ncols) {
      if (wrhs != 0) throw UnrepresentableError(monomial_str(s.poly.vars(), mono));
      continue;  // redundant
    }
    Rational inv = Rational(1) / work[piv];
    for (size_t j = 0; j < ncols; ++j) work[j] *= inv;
    wrhs *= inv;
    // back-substitute into existing reduced rows to keep RREF form
    for (size_t rrow = 0; rrow < red_rows.size(); ++rrow) {
      const Rational& f = red_rows[rrow][piv];
      if (f == 0) continue;
      Rational fc = f;
      for (size_t j = 0; j < ncols; ++j) red_rows[rrow][j] -= fc * work[j];
      red_rhs[rrow] -= fc * wrhs;
    }
    red_rows.push_back(std::move(work));
    red_rhs.push_back(wrhs);
    red_pivot.push_back(piv);

    // keep the raw row
    g.row_monomials.push_back(mono);
    kept_rows.push_back(std::move(row));
    g.rhs.push_back(rhs);
  }
  g.a = RatMat(kept_rows.size(), ncols);
  for (size_t i = 0; i < kept_rows.size(); ++i)
    for (size_t j = 0; j < ncols; ++j) g.a.at(i, j) = std::move(kept_rows[i][j]);
  return g;
}

RPoly expand_gram(const BasisPair& basis, const RatMat& qs, const RatMat& qa) {
  if (basis.sym.empty() && basis.anti.empty())
    throw std::invalid_argument("expand_gram: empty basis");
  VarSetPtr vars = basis.sym.empty() ? basis.anti[0].vars_ptr() : basis.sym[0].vars_ptr();
  RPoly out(vars);
  auto accumulate = [&](const std::vector<RPoly>& block, const RatMat& q) {
    if (q.rows() != block.size() || q.cols() != block.size())
      throw std::invalid_argument("expand_gram: Gram dim mismatch");
    for (size_t i = 0; i < block.size(); ++i)
      for (size_t j = i; j < block.size(); ++j) {
        if (q.at(i, j) != q.at(j, i)) throw std::invalid_argument("expand_gram: not symmetric");
        if (q.at(i, j) == 0) continue;
        Rational mult = (i == j) ? q.at(i, j) : Rational(2) * q.at(i, j);
        out += (block[i] * block[j]).scaled(mult);
      }
  };
  accumulate(basis.sym, qs);
  accumulate(basis.anti, qa);
  return out;
}

GramProblem fix_scalar(const GramProblem& g, const std::string& name, const Rational& value) {
  GramProblem out = g;
  size_t col = g.scalar_col(name);
  size_t ncols = g.nqs + g.nqa + g.scalar_names.size();
  RatMat a(g.a.rows(), ncols - 1);
  for (size_t i = 0; i < g.a.rows(); ++i) {
    out.rhs[i] = g.rhs[i] - g.a.at(i, col) * value;
    for (size_t j = 0, jj = 0; j < ncols; ++j) {
      if (j == col) continue;
      a.at(i, jj++) = g.a.at(i, j);
    }
  }
  out.a = std::move(a);
  out.scalar_names.erase(out.scalar_names.begin() + (col - g.nqs - g.nqa));
  if (out.objective && *out.objective == name) out.objective.reset();
  std::map<std::string, Rational> sub;
  sub[name] = value;
  LPoly folded(g.s.poly.vars_ptr());
  for (const auto& [m, c] : g.s.poly.terms()) {
    LinExpr e = c;
    auto it = e.lin.find(name);
    if (it != e.lin.end()) {
      e.constant += it->second * value;
      e.lin.erase(it);
    }
    folded.set_coeff(m, e);
  }
  out.s.poly = std::move(folded);
  if (out.s.bound_unknown && *out.s.bound_unknown == name) {
    out.s.bound_unknown.reset();
    out.s.bound_fixed_part += RPoly::constant(g.s.phi.vars_ptr(), value);
  }
  return out;
}

SdpConversion to_sdp(const GramProblem& g, bool eliminate_scalars) {
  SdpConversion conv;
  conv.nqs = g.nqs;
  conv.nqa = g.nqa;

  size_t ns = g.n_sym(), na = g.n_anti();
  size_t nq = g.nqs + g.nqa;
  size_t nsc = g.scalar_names.size();

  conv.q_layout.resize(nq);
  for (size_t i = 0; i < ns; ++i)
    for (size_t j = i; j < ns; ++j)
      conv.q_layout[g.qs_col(i, j)] = {0, static_cast<int>(i), static_cast<int>(j)};
  for (size_t i = 0; i < na; ++i)
    for (size_t j = i; j < na; ++j)
      conv.q_layout[g.qa_col(i, j)] = {1, static_cast<int>(i), static_cast<int>(j)};

  // working copy of the system
  size_t nrows = g.a.rows();
  std::vector<std::vector<Rational>> rows(nrows, std::vector<Rational>(nq + nsc));
  std::vector<Rational> rhs = g.rhs;
  std::vector<bool> row_used(nrows, false);
  for (size_t i = 0; i < nrows; ++i)
    for (size_t j = 0; j < nq + nsc; ++j) rows[i][j] = g.a.at(i, j);

  // eliminate every scalar except the objective, remembering defining rows
  for (size_t k = 0; k < nsc && eliminate_scalars; ++k) {
    const std::string& name = g.scalar_names[k];
    if (g.objective && name == *g.objective) continue;
    size_t col = nq + k;
    size_t pivot = nrows;
    for (size_t i = 0; i < nrows; ++i)
      if (!row_used[i] && rows[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot == nrows) {
      // unconstrained coefficient: fix it to zero
      EliminatedScalar e;
      e.name = name;
      e.rhs = 0;
      conv.eliminated.push_back(std::move(e));
      continue;
    }
    row_used[pivot] = true;
    Rational inv = Rational(1) / rows[pivot][col];
    for (auto& v : rows[pivot]) v *= inv;
    rhs[pivot] *= inv;
    EliminatedScalar e;
    e.name = name;
    e.rhs = rhs[pivot];
    for (size_t j = 0; j < nq; ++j)
      if (rows[pivot][j] != 0) e.q_terms.emplace_back(j, -rows[pivot][j]);
    for (size_t j = 0; j < nsc; ++j)
      if (j != k && rows[pivot][nq + j] != 0)
        e.s_terms.emplace_back(g.scalar_names[j], -rows[pivot][nq + j]);
    conv.eliminated.push_back(std::move(e));
    for (size_t i = 0; i < nrows; ++i) {
      if (i == pivot || rows[i][col] == 0) continue;
      Rational f = rows[i][col];
      for (size_t j = 0; j < nq + nsc; ++j) rows[i][j] -= f * rows[pivot][j];
      rhs[i] -= f * rhs[pivot];
    }
  }

  SDPInstance& inst = conv.instance;
  inst.block_dims = {static_cast<int>(ns), static_cast<int>(na)};
  inst.phi_degree = std::max(0, g.s.phi.degree());
  inst.basis_degrees.resize(2);
  for (const auto& b : g.basis.sym) inst.basis_degrees[0].push_back(b.degree());
  for (const auto& b : g.basis.anti) inst.basis_degrees[1].push_back(b.degree());

  std::vector<size_t> kept_scalars;
  for (size_t k = 0; k < nsc; ++k) {
    bool is_obj = g.objective && g.scalar_names[k] == *g.objective;
    if (is_obj || !eliminate_scalars) kept_scalars.push_back(k);
  }
  for (size_t k = 0; k < kept_scalars.size(); ++k) {
    const std::string& nm = g.scalar_names[kept_scalars[k]];
    inst.free_names.push_back(nm);
    int w = inst.phi_degree;  // bound unknown scales with the moment degree
    auto it = g.s.unknown_degree.find(nm);
    if (it != g.s.unknown_degree.end()) w = inst.phi_degree - it->second;
    inst.free_degree_weight.push_back(w);
  }

  // drop dependent rows among the remaining ones (exact, rhs untouched)
  std::vector<std::vector<Rational>> red;
  std::vector<Rational> red_rhs_v;
  std::vector<size_t> red_piv;
  for (size_t i = 0; i < nrows; ++i) {
    if (row_used[i]) continue;
    std::vector<Rational> w(nq + kept_scalars.size());
    for (size_t j = 0; j < nq; ++j) w[j] = rows[i][j];
    for (size_t k = 0; k < kept_scalars.size(); ++k) w[nq + k] = rows[i][nq + kept_scalars[k]];
    Rational wr = rhs[i];
    for (size_t rr = 0; rr < red.size(); ++rr) {
      Rational f = w[red_piv[rr]];
      if (f == 0) continue;
      for (size_t j = 0; j < w.size(); ++j) w[j] -= f * red[rr][j];
      wr -= f * red_rhs_v[rr];
    }
    size_t piv = w.size();
    for (size_t j = 0; j < w.size(); ++j)
      if (w[j] != 0) {
        piv = j;
        break;
      }
    if (piv == w.size()) {
      if (wr != 0) {
        inst.structurally_infeasible = true;
        inst.note = "inconsistent constraint at monomial " +
                    monomial_str(g.s.poly.vars(), g.row_monomials[i]);
        return conv;
      }
      continue;
    }
    Rational inv = Rational(1) / w[piv];
    std::vector<Rational> wn = w;
    for (auto& v : wn) v *= inv;
    for (size_t rr = 0; rr < red.size(); ++rr) {
      Rational f = red[rr][piv];
      if (f == 0) continue;
      for (size_t j = 0; j < wn.size(); ++j) red[rr][j] -= f * wn[j];
      red_rhs_v[rr] -= f * (wr * inv);
    }
    red.push_back(wn);
    red_rhs_v.push_back(wr * inv);
    red_piv.push_back(piv);

    SdpConstraint c;
    for (size_t j = 0; j < nq; ++j) {
      if (rows[i][j] == 0) continue;
      auto [blk, bi, bj] = conv.q_layout[j];
      c.terms.push_back({blk, bi, bj, to_double(rows[i][j])});
    }
    for (size_t k = 0; k < kept_scalars.size(); ++k) {
      const Rational& v = rows[i][nq + kept_scalars[k]];
      if (v != 0) c.free_terms.emplace_back(static_cast<int>(k), to_double(v));
    }
    c.rhs = to_double(rhs[i]);
    c.monomial_degree = g.row_monomials[i].total_degree();
    c.monomial = monomial_str(g.s.poly.vars(), g.row_monomials[i]);
    inst.constraints.push_back(std::move(c));
  }

  if (g.objective) {
    inst.objective.assign(inst.free_names.size(), 0.0);
    for (size_t k = 0; k < inst.free_names.size(); ++k)
      if (inst.free_names[k] == *g.objective) inst.objective[k] = 1.0;
    inst.maximize = g.maximize;
  } else {
    // feasibility: blocks >= t I via X = X' + t I, maximize t
    conv.feasibility_mode = true;
    inst.free_names.push_back("t");
    inst.free_degree_weight.push_back(0);
    for (auto& c : inst.constraints) {
      double tr = 0.0;
      for (const auto& t : c.terms)
        if (t.i == t.j) tr += t.coeff;
      if (tr != 0.0) c.free_terms.emplace_back(static_cast<int>(inst.free_names.size()) - 1, tr);
    }
    inst.objective.assign(inst.free_names.size(), 0.0);
    inst.objective.back() = 1.0;
    inst.maximize = true;
  }
  return conv;
}

}  // namespace sosbound::sosform
