#include "sosbound/certify.hpp"

#include <algorithm>
#include <numeric>

namespace sosbound::certify {

using polyalg::monomial_str;
using sdpsolve::SDPSolution;

PsdDecision check_psd_exact(const RatMat& m) {
  if (!m.is_symmetric()) throw std::invalid_argument("check_psd_exact: not symmetric");
  ratlin::PsdWitness des = ratlin::check_psd_descartes(m);
  bool piv = ratlin::check_psd_pivoting(m);
  if (des.psd != piv)
    throw std::logic_error("check_psd_exact: Descartes and LDL^T routes disagree");
  PsdDecision out;
  out.psd = des.psd;
  if (!des.psd) {
    out.witness = "char-poly coefficient " + std::to_string(des.violated_coeff_index) +
                  " violates alternation: " + rat_str(des.violated_coeff_value);
  } else if (des.factorization) {
    out.witness = "ldlt";
    out.factorization = std::move(des.factorization);
  } else {
    out.witness = "psd-singular";
  }
  return out;
}

VerifyReport verify_certificate(const RationalCertificate& cert, const RPoly& phi,
                                const std::vector<RPoly>& f, const RPoly& V) {
  VerifyReport rep;
  RPoly lie = polyalg::lie_derivative(V, f);
  RPoly s = (cert.sense == Sense::Lower) ? phi - cert.bound_value + lie
                                         : cert.bound_value - phi - lie;
  RPoly expanded = sosform::expand_gram(cert.basis, cert.gram_s, cert.gram_a);
  RPoly diff = s - expanded;
  if (!diff.is_zero()) {
    const auto& [m, c] = *diff.terms().begin();
    rep.ok = false;
    rep.detail = "coefficient mismatch at monomial " + monomial_str(s.vars(), m) + " (residual " +
                 rat_str(c) + ")";
    return rep;
  }
  PsdDecision ps = check_psd_exact(cert.gram_s);
  if (!ps.psd) {
    rep.detail = "symmetric block not PSD: " + ps.witness;
    return rep;
  }
  PsdDecision pa = check_psd_exact(cert.gram_a);
  if (!pa.psd) {
    rep.detail = "antisymmetric block not PSD: " + pa.witness;
    return rep;
  }
  rep.ok = true;
  rep.detail = "exact identity and PSD verified";
  return rep;
}

ProjectionResult project_core(const GramProblem& g, const std::vector<Eigen::MatrixXd>& blocks,
                              const std::map<std::string, double>& scalars,
                              const std::optional<Rational>& bound_value,
                              const BigInt& denominator_limit) {
  ProjectionResult out;
  size_t ns = g.n_sym(), na = g.n_anti();
  size_t nq = g.nqs + g.nqa;
  size_t ncols = nq + g.scalar_names.size();

  // target columns: everything except the pinned bound unknown
  std::optional<size_t> bound_col;
  if (bound_value) {
    if (!g.objective) {
      out.note = "no bound unknown to pin";
      return out;
    }
    bound_col = g.scalar_col(*g.objective);
  }

  // rounded initial guess
  std::vector<Rational> x0(ncols, Rational(0));
  for (size_t i = 0; i < ns; ++i)
    for (size_t j = i; j < ns; ++j)
      x0[g.qs_col(i, j)] = cf_round(rational_from_double(blocks[0](i, j)), denominator_limit);
  for (size_t i = 0; i < na; ++i)
    for (size_t j = i; j < na; ++j)
      x0[g.qa_col(i, j)] = cf_round(rational_from_double(blocks[1](i, j)), denominator_limit);
  for (size_t k = 0; k < g.scalar_names.size(); ++k) {
    size_t col = nq + k;
    if (bound_col && col == *bound_col) {
      x0[col] = *bound_value;
      continue;
    }
    auto it = scalars.find(g.scalar_names[k]);
    if (it == scalars.end()) {
      out.note = "missing scalar value for " + g.scalar_names[k];
      return out;
    }
    x0[col] = cf_round(rational_from_double(it->second), denominator_limit);
  }

  // affine repair on the dependent set: pivot preference runs from the last
  // column backwards (bound column excluded; it is pinned)
  std::vector<size_t> col_order;
  for (size_t j = ncols; j-- > 0;)
    if (!bound_col || j != *bound_col) col_order.push_back(j);
  std::vector<Rational> zero(g.a.rows(), Rational(0));
  ratlin::Rref rr = ratlin::rref(g.a, zero, col_order);

  // residual r = rhs - A x0; then correct dependents by solving A_D d = r
  std::vector<Rational> resid = g.rhs;
  for (size_t i = 0; i < g.a.rows(); ++i)
    for (size_t j = 0; j < ncols; ++j)
      if (g.a.at(i, j) != 0) resid[i] -= g.a.at(i, j) * x0[j];

  RatMat ad(g.a.rows(), rr.pivot_col.size());
  for (size_t i = 0; i < g.a.rows(); ++i)
    for (size_t k = 0; k < rr.pivot_col.size(); ++k) ad.at(i, k) = g.a.at(i, rr.pivot_col[k]);
  auto delta = ratlin::solve(ad, resid);
  if (!delta) {
    out.note = "affine repair is inconsistent at the pinned bound";
    return out;
  }
  std::vector<Rational> x = x0;
  for (size_t k = 0; k < rr.pivot_col.size(); ++k) x[rr.pivot_col[k]] += (*delta)[k];

  // assemble certificate
  RationalCertificate cert;
  cert.sense = g.s.sense;
  cert.basis = g.basis;
  cert.gram_s = RatMat(ns, ns);
  cert.gram_a = RatMat(na, na);
  for (size_t i = 0; i < ns; ++i)
    for (size_t j = i; j < ns; ++j) {
      cert.gram_s.at(i, j) = x[g.qs_col(i, j)];
      cert.gram_s.at(j, i) = x[g.qs_col(i, j)];
    }
  for (size_t i = 0; i < na; ++i)
    for (size_t j = i; j < na; ++j) {
      cert.gram_a.at(i, j) = x[g.qa_col(i, j)];
      cert.gram_a.at(j, i) = x[g.qa_col(i, j)];
    }
  for (size_t k = 0; k < g.scalar_names.size(); ++k)
    out.scalar_values[g.scalar_names[k]] = x[nq + k];

  PsdDecision ps = check_psd_exact(cert.gram_s);
  if (!ps.psd) {
    out.note = "symmetric block not PSD after repair: " + ps.witness;
    return out;
  }
  PsdDecision pa = check_psd_exact(cert.gram_a);
  if (!pa.psd) {
    out.note = "antisymmetric block not PSD after repair: " + pa.witness;
    return out;
  }

  cert.phi = g.s.phi;
  cert.bound_value = g.s.bound_fixed_part;
  if (g.s.bound_unknown && out.scalar_values.count(*g.s.bound_unknown))
    cert.bound_value += RPoly::constant(cert.phi.vars_ptr(),
                                        out.scalar_values[*g.s.bound_unknown]);
  cert.V = RPoly::zero(cert.phi.vars_ptr());
  for (size_t i = 0; i < g.s.ansatz_polys.size(); ++i) {
    auto it = out.scalar_values.find(g.s.ansatz_names[i]);
    Rational ci = (it != out.scalar_values.end()) ? it->second : Rational(0);
    cert.aux_coeffs.push_back(ci);
    if (ci != 0) cert.V += g.s.ansatz_polys[i].scaled(ci);
  }
  out.certificate = std::move(cert);
  out.ok = true;
  out.note = "ok";
  return out;
}

ProjectionResult project_to_rational(const SDPSolution& sol, const SdpConversion& conv,
                                     const GramProblem& g, const BigInt& denominator_limit,
                                     const Rational& padding) {
  if (padding < 0) throw std::invalid_argument("project_to_rational: negative padding");
  std::map<std::string, double> scalars = sdpsolve::recover_free_scalars(conv, sol);
  std::optional<Rational> bound;
  if (g.objective) {
    double numeric = scalars.at(*g.objective);
    Rational target = rational_from_double(numeric);
    target += (g.s.sense == Sense::Upper) ? padding : Rational(-padding);
    bound = cf_round(target, denominator_limit);
  }
  return project_core(g, sol.gram_blocks, scalars, bound, denominator_limit);
}

sdpsolve::SDPSolution materialize_feasibility(const SdpConversion& conv,
                                              const sdpsolve::SDPSolution& sol) {
  if (!conv.feasibility_mode) return sol;
  sdpsolve::SDPSolution out = sol;
  auto it = out.free_scalars.find("t");
  double t = (it != out.free_scalars.end()) ? it->second : 0.0;
  for (auto& b : out.gram_blocks)
    b += t * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  if (it != out.free_scalars.end()) out.free_scalars.erase(it);
  return out;
}

EnclosureReport enclose_upper(const GramProblem& g, const SDPSolution& sol,
                              const SdpConversion& conv,
                              const std::vector<Rational>& padding_schedule,
                              const Resolver& resolve, const BigInt& denominator_limit) {
  if (g.s.sense != Sense::Upper)
    throw std::invalid_argument("enclose_upper: sense must be upper");
  EnclosureReport rep;
  if (!g.objective) throw std::invalid_argument("enclose_upper: no bound unknown");
  rep.numeric_optimum = sol.free_scalars.count(*g.objective)
                            ? sol.free_scalars.at(*g.objective)
                            : sol.objective_value;

  for (const Rational& pad : padding_schedule) {
    ProjectionResult pr;
    if (pad == 0) {
      if (sol.status == sdpsolve::SolveStatus::Optimal ||
          sol.status == sdpsolve::SolveStatus::Marginal)
        pr = project_to_rational(sol, conv, g, denominator_limit, Rational(0));
      else
        continue;
    } else {
      // simplest rational in the upper half of the padding window; never
      // below the numeric optimum
      Rational numeric = rational_from_double(rep.numeric_optimum);
      Rational pinned = simplest_in_interval(numeric + pad / 2, numeric + pad);
      GramProblem fixed = sosform::fix_scalar(g, *g.objective, pinned);
      SdpConversion fconv = sosform::to_sdp(fixed);
      if (fconv.instance.structurally_infeasible) continue;
      SDPSolution fsol = resolve(fconv.instance);
      if (fsol.status != sdpsolve::SolveStatus::Optimal &&
          fsol.status != sdpsolve::SolveStatus::Marginal)
        continue;
      double t = fsol.free_scalars.count("t") ? fsol.free_scalars.at("t") : 0.0;
      if (t <= 0) continue;
      SDPSolution msol = materialize_feasibility(fconv, fsol);
      std::map<std::string, double> scalars = sdpsolve::recover_free_scalars(fconv, msol);
      pr = project_core(fixed, msol.gram_blocks, scalars, std::nullopt, denominator_limit);
      if (pr.ok) pr.scalar_values[*g.objective] = pinned;
    }
    if (pr.ok) {
      rep.verified = true;
      rep.padding = pad;
      rep.certificate = pr.certificate;
      if (pr.scalar_values.count(*g.objective)) {
        // constant part of the certified bound
        rep.verified_bound = pr.scalar_values.at(*g.objective);
      }
      rep.note = "verified at padding " + rat_str(pad);
      return rep;
    }
    rep.note = pr.note;
  }
  rep.verified = false;
  if (rep.note.empty()) rep.note = "all paddings failed";
  return rep;
}

std::vector<Rational> default_padding_schedule(double numeric_optimum) {
  Rational scale = cf_round(std::max(1.0, std::abs(numeric_optimum)), 1000);
  std::vector<Rational> out{Rational(0)};
  for (long den : {1000000000L, 10000000L, 100000L, 1000L})
    out.push_back(scale / Rational(den));
  return out;
}

std::vector<SosTerm> sos_decompose(const RationalCertificate& cert) {
  std::vector<SosTerm> out;
  auto handle = [&](const std::vector<RPoly>& basis, const RatMat& q) {
    if (basis.empty()) return;
    ratlin::Ldlt f = ratlin::ldlt_psd(q);
    if (!f.ok) throw std::invalid_argument("sos_decompose: block not PSD");
    for (size_t k = 0; k < basis.size(); ++k) {
      if (f.d[k] == 0) continue;
      RPoly sq = basis[k];
      for (size_t j = k + 1; j < basis.size(); ++j)
        if (f.l.at(j, k) != 0) sq += basis[j].scaled(f.l.at(j, k));
      out.push_back({f.d[k], std::move(sq)});
    }
  };
  handle(cert.basis.sym, cert.gram_s);
  handle(cert.basis.anti, cert.gram_a);
  return out;
}

RPoly expand_sos(const std::vector<SosTerm>& terms) {
  if (terms.empty()) throw std::invalid_argument("expand_sos: empty");
  RPoly out(terms[0].square.vars_ptr());
  for (const auto& t : terms) out += (t.square * t.square).scaled(t.weight);
  return out;
}

}  // namespace sosbound::certify
