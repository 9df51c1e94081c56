#include "sosbound/sdpsolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sosbound::sdpsolve {

namespace {

// The interior-point loop runs in extended precision: marginally feasible
// optima (the normal case for sharp SOS bounds) push X onto the cone boundary
// where double-precision Schur systems floor out near 1e-8.
using Scalar = long double;
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct Work {
  int nblocks = 0;
  std::vector<int> dims;
  int m = 0;  // constraints
  int p = 0;  // free scalars
  std::vector<std::vector<Mat>> A;  // [constraint][block]
  Mat B;                            // m x p
  Vec b;
  Vec cy;             // objective on frees, internal minimize
  Scalar flip = 1.0;  // +1 min, -1 max
};

Scalar inner(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

Work build(const SDPInstance& inst) {
  Work w;
  w.dims = inst.block_dims;
  w.nblocks = static_cast<int>(inst.block_dims.size());
  w.m = static_cast<int>(inst.constraints.size());
  w.p = static_cast<int>(inst.free_names.size());
  w.A.assign(w.m, {});
  w.B = Mat::Zero(w.m, w.p);
  w.b = Vec::Zero(w.m);
  for (int i = 0; i < w.m; ++i) {
    const auto& c = inst.constraints[i];
    w.A[i].resize(w.nblocks);
    for (int k = 0; k < w.nblocks; ++k) w.A[i][k] = Mat::Zero(w.dims[k], w.dims[k]);
    for (const auto& t : c.terms) {
      if (t.i == t.j)
        w.A[i][t.block](t.i, t.i) += t.coeff;
      else {
        w.A[i][t.block](t.i, t.j) += Scalar(0.5) * t.coeff;
        w.A[i][t.block](t.j, t.i) += Scalar(0.5) * t.coeff;
      }
    }
    for (const auto& [k, v] : c.free_terms) w.B(i, k) += v;
    w.b(i) = c.rhs;
  }
  w.cy = Vec::Zero(w.p);
  w.flip = inst.maximize ? Scalar(-1) : Scalar(1);
  for (int k = 0; k < w.p; ++k) w.cy(k) = w.flip * inst.objective[k];
  return w;
}

bool chol(const Mat& a, Eigen::LLT<Mat>& out) {
  out.compute(a);
  Scalar shift = Scalar(1e-18) * std::max<Scalar>(1, a.trace()) / std::max(1, (int)a.rows());
  for (int att = 0; att < 6 && out.info() != Eigen::Success; ++att) {
    out.compute(a + shift * Mat::Identity(a.rows(), a.cols()));
    shift *= 100;
  }
  return out.info() == Eigen::Success;
}

// largest alpha in (0,1] keeping X + alpha D positive definite; eigenvalue
// based so boundary iterates cannot fool it
Scalar max_step(const Mat& x, const Mat& d) {
  if (x.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Mat> ex(x);
  Vec ev = ex.eigenvalues();
  Scalar lmax = ev.maxCoeff();
  if (!(lmax > 0)) return 0.0;
  Vec clamped = ev.cwiseMax(lmax * Scalar(1e-22));
  Mat li = clamped.cwiseSqrt().cwiseInverse().asDiagonal() * ex.eigenvectors().transpose();
  Mat s = li * d * li.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(Scalar(0.5) * (s + s.transpose()),
                                        Eigen::EigenvaluesOnly);
  Scalar lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0) return 1.0;
  return std::min<Scalar>(1.0, -1.0 / lmin);
}

// cone membership up to numerically-zero eigenvalues: boundary iterates of
// marginal problems sit exactly there
bool in_cone(const Mat& a) {
  if (a.rows() == 0) return true;
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) return true;
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  Scalar scale = std::max<Scalar>(1, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() >= -Scalar(1e-19) * scale;
}

}  // namespace

SDPSolution solve(const SDPInstance& inst, const SolverSettings& settings) {
  SDPSolution sol;
  if (inst.structurally_infeasible) {
    sol.status = SolveStatus::Infeasible;
    sol.trace.push_back("structurally infeasible: " + inst.note);
    return sol;
  }
  Work w = build(inst);
  int ntot = 0;
  for (int d : w.dims) ntot += d;
  if (ntot == 0) {
    sol.status = SolveStatus::NumericalFailure;
    sol.trace.push_back("no semidefinite blocks");
    return sol;
  }
  for (int i = 0; i < w.m; ++i) {
    Scalar an = 0;
    for (int k = 0; k < w.nblocks; ++k) an += w.A[i][k].norm();
    an += w.B.row(i).norm();
    if (an == 0 && std::abs(w.b(i)) > 0) {
      sol.status = SolveStatus::Infeasible;
      sol.trace.push_back("empty row with nonzero rhs: " + inst.constraints[i].monomial);
      return sol;
    }
  }

  Scalar data_scale = 1.0;
  for (int i = 0; i < w.m; ++i) {
    Scalar an = 0;
    for (int k = 0; k < w.nblocks; ++k) an = std::max(an, w.A[i][k].lpNorm<Eigen::Infinity>());
    data_scale = std::max(data_scale, std::abs(w.b(i)) / std::max<Scalar>(1, an));
  }
  Scalar xi = std::max<Scalar>(1, std::sqrt((Scalar)ntot)) * data_scale;

  std::vector<Mat> X(w.nblocks), Z(w.nblocks);
  for (int k = 0; k < w.nblocks; ++k) {
    X[k] = xi * Mat::Identity(w.dims[k], w.dims[k]);
    Z[k] = std::max<Scalar>(1, data_scale) * Mat::Identity(w.dims[k], w.dims[k]);
  }
  Vec y = Vec::Zero(w.p), lam = Vec::Zero(w.m);

  Scalar bnorm = 1 + w.b.norm(), cnorm = 1 + w.cy.norm();
  std::vector<Mat> R(w.nblocks), Rit(w.nblocks);  // NT factor, R^{-T}
  std::vector<Vec> lambda(w.nblocks);

  int it = 0;
  bool converged = false;
  bool failed = false;
  int small_steps = 0;
  std::vector<Scalar> relgap_hist, pres_hist;
  Scalar pres = 0, dres = 0, relgap = 0, pobj = 0, dobj = 0;

  for (it = 0; it < settings.max_iterations; ++it) {
    Vec rp = w.b - w.B * y;
    for (int i = 0; i < w.m; ++i)
      for (int k = 0; k < w.nblocks; ++k) rp(i) -= inner(w.A[i][k], X[k]);
    std::vector<Mat> Rd(w.nblocks);
    for (int k = 0; k < w.nblocks; ++k) {
      Rd[k] = -Z[k];
      for (int i = 0; i < w.m; ++i)
        if (lam(i) != 0) Rd[k] -= lam(i) * w.A[i][k];
    }
    Vec ry = w.cy - w.B.transpose() * lam;

    Scalar gap = 0;
    for (int k = 0; k < w.nblocks; ++k) gap += inner(X[k], Z[k]);
    pobj = w.cy.dot(y);
    dobj = w.b.dot(lam);
    pres = rp.norm() / bnorm;
    Scalar dresm = 0;
    for (int k = 0; k < w.nblocks; ++k) dresm = std::max(dresm, Rd[k].norm());
    dres = std::max(dresm / bnorm, ry.norm() / cnorm);
    relgap = gap / (1 + std::abs(pobj) + std::abs(dobj));
    {
      // pobj - dobj = gap + corr holds identically at every iterate
      Scalar corr = ry.dot(y) - lam.dot(rp);
      for (int k = 0; k < w.nblocks; ++k) corr += inner(Rd[k], X[k]);
      sol.iterate_log.push_back(
          {(double)pobj, (double)dobj, (double)gap, (double)corr});
      std::ostringstream os;
      os << "it " << it << " pobj " << (double)(w.flip * pobj) << " dobj "
         << (double)(w.flip * dobj) << " relgap " << (double)relgap << " pres " << (double)pres
         << " dres " << (double)dres;
      sol.trace.push_back(os.str());
    }

    if (relgap <= settings.gap_tolerance && pres <= settings.feasibility_tolerance &&
        dres <= settings.feasibility_tolerance) {
      converged = true;
      break;
    }
    if (!std::isfinite((double)gap) || !std::isfinite((double)pres) || gap > 1e18 ||
        lam.norm() + y.norm() > 1e16) {
      failed = true;
      sol.trace.push_back("diverged");
      break;
    }
    if (gap >= 0 && gap / ntot < 1e-16 && pres > 1e3 * settings.feasibility_tolerance) {
      sol.status = SolveStatus::Infeasible;
      sol.trace.push_back("gap collapsed with large primal residual");
      sol.iterations = it;
      return sol;
    }
    // stagnation: essentially no progress over a long stretch
    relgap_hist.push_back(relgap);
    pres_hist.push_back(pres);
    if (it >= 60) {
      Scalar org = relgap_hist[it - 40], opr = pres_hist[it - 40];
      bool flat = relgap > Scalar(0.8) * org && pres > Scalar(0.8) * opr;
      if (flat && !(relgap <= 100 * settings.gap_tolerance)) {
        failed = true;
        sol.trace.push_back("stagnated");
        break;
      }
    }
    Scalar mu = gap / ntot;

    bool scale_ok = true;
    for (int k = 0; k < w.nblocks; ++k) {
      Eigen::LLT<Mat> lx, lz;
      if (!chol(X[k], lx) || !chol(Z[k], lz)) {
        scale_ok = false;
        break;
      }
      Mat Lx = lx.matrixL(), Lz = lz.matrixL();
      Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Vec sv = svd.singularValues();
      if (sv.minCoeff() <= 0) {
        scale_ok = false;
        break;
      }
      lambda[k] = sv;
      R[k] = Lx * svd.matrixV() * sv.array().rsqrt().matrix().asDiagonal();
      Mat lxinv_t = Lx.transpose().triangularView<Eigen::Upper>().solve(
          Mat::Identity(w.dims[k], w.dims[k]));
      Rit[k] = lxinv_t * svd.matrixV() * sv.array().sqrt().matrix().asDiagonal();
    }
    if (!scale_ok) {
      failed = true;
      sol.trace.push_back("NT scaling failed");
      break;
    }

    std::vector<std::vector<Mat>> Ah(w.m, std::vector<Mat>(w.nblocks));
    for (int i = 0; i < w.m; ++i)
      for (int k = 0; k < w.nblocks; ++k) Ah[i][k] = R[k].transpose() * w.A[i][k] * R[k];
    Mat M = Mat::Zero(w.m, w.m);
    for (int i = 0; i < w.m; ++i)
      for (int j = i; j < w.m; ++j) {
        Scalar s = 0;
        for (int k = 0; k < w.nblocks; ++k) s += inner(Ah[i][k], Ah[j][k]);
        M(i, j) = s;
        M(j, i) = s;
      }
    // augmented KKT: the free-variable columns keep the system solvable even
    // when constraint rows are dependent in their X parts alone
    Mat K = Mat::Zero(w.m + w.p, w.m + w.p);
    K.topLeftCorner(w.m, w.m) = M;
    if (w.p > 0) {
      K.topRightCorner(w.m, w.p) = w.B;
      K.bottomLeftCorner(w.p, w.m) = w.B.transpose();
    }
    Eigen::FullPivLU<Mat> Kf(K);
    if (!Kf.isInvertible()) {
      Scalar reg = Scalar(1e-16) * std::max<Scalar>(1, M.trace()) / std::max(1, w.m);
      for (int attempt = 0; attempt < 6 && !Kf.isInvertible(); ++attempt) {
        Mat Kr = K;
        Kr.topLeftCorner(w.m, w.m) += reg * Mat::Identity(w.m, w.m);
        Kr.bottomRightCorner(w.p, w.p) -= reg * Mat::Identity(w.p, w.p);
        Kf.compute(Kr);
        reg *= 1000;
      }
    }

    std::vector<Mat> Rdh(w.nblocks);
    for (int k = 0; k < w.nblocks; ++k) Rdh[k] = R[k].transpose() * Rd[k] * R[k];

    auto solve_kkt = [&](const std::vector<Mat>& Rc, Vec& dlam, Vec& dy) {
      Vec h = rp;
      for (int i = 0; i < w.m; ++i)
        for (int k = 0; k < w.nblocks; ++k) {
          h(i) -= inner(w.A[i][k], Rc[k]);
          h(i) += inner(Ah[i][k], Rdh[k]);
        }
      Vec rhs(w.m + w.p);
      rhs.head(w.m) = h;
      rhs.tail(w.p) = ry;
      Vec xsol = Kf.solve(rhs);
      // one round of iterative refinement on the true matrix
      xsol += Kf.solve(rhs - K * xsol);
      dlam = xsol.head(w.m);
      dy = xsol.tail(w.p);
    };
    auto directions = [&](const std::vector<Mat>& Rc, Vec& dlam, Vec& dy, std::vector<Mat>& dX,
                          std::vector<Mat>& dZ) {
      solve_kkt(Rc, dlam, dy);
      dX.resize(w.nblocks);
      dZ.resize(w.nblocks);
      for (int k = 0; k < w.nblocks; ++k) {
        dZ[k] = Rd[k];
        for (int i = 0; i < w.m; ++i)
          if (dlam(i) != 0) dZ[k] -= dlam(i) * w.A[i][k];
        dZ[k] = Scalar(0.5) * (dZ[k] + dZ[k].transpose());
        Mat dZh = R[k].transpose() * dZ[k] * R[k];
        dX[k] = Rc[k] - R[k] * dZh * R[k].transpose();
        dX[k] = Scalar(0.5) * (dX[k] + dX[k].transpose());
      }
    };

    // predictor (affine scaling): Rc = -X
    std::vector<Mat> Rc(w.nblocks);
    for (int k = 0; k < w.nblocks; ++k) Rc[k] = -X[k];
    Vec dlam, dy;
    std::vector<Mat> dX, dZ;
    directions(Rc, dlam, dy, dX, dZ);

    Scalar ap = 1.0, ad = 1.0;
    for (int k = 0; k < w.nblocks; ++k) {
      ap = std::min(ap, max_step(X[k], dX[k]));
      ad = std::min(ad, max_step(Z[k], dZ[k]));
    }
    Scalar gap_aff = 0;
    for (int k = 0; k < w.nblocks; ++k)
      gap_aff += inner(X[k] + Scalar(0.99) * ap * dX[k], Z[k] + Scalar(0.99) * ad * dZ[k]);
    gap_aff = std::max<Scalar>(gap_aff, 0);
    Scalar sigma = gap_aff / gap;
    sigma = sigma * sigma * sigma;
    sigma = std::min<Scalar>(std::max<Scalar>(sigma, 1e-12), 0.999);
    // repeated blocked steps: recenter before pushing again
    if (small_steps >= 2) sigma = std::max<Scalar>(sigma, 0.9);

    // corrector: diagonal NT complementarity with Mehrotra cross term
    for (int k = 0; k < w.nblocks; ++k) {
      Mat dXhat = Rit[k].transpose() * dX[k] * Rit[k];
      Mat dZhat = R[k].transpose() * dZ[k] * R[k];
      Mat cross = Scalar(0.5) * (dXhat * dZhat + dZhat * dXhat);
      const Vec& lv = lambda[k];
      Mat G(w.dims[k], w.dims[k]);
      for (int a = 0; a < w.dims[k]; ++a)
        for (int b2 = 0; b2 < w.dims[k]; ++b2) {
          Scalar num = Scalar(-2) * cross(a, b2);
          if (a == b2) num += Scalar(2) * (sigma * mu - lv(a) * lv(a));
          G(a, b2) = num / (lv(a) + lv(b2));
        }
      Rc[k] = R[k] * G * R[k].transpose();
      Rc[k] = Scalar(0.5) * (Rc[k] + Rc[k].transpose());
    }
    directions(Rc, dlam, dy, dX, dZ);

    // push the fraction toward 1 as the gap closes; marginal optima need
    // nearly full steps to reach tolerance at the cone boundary
    Scalar tau =
        std::min<Scalar>(0.9999, std::max<Scalar>(settings.step_fraction, 1 - 50 * relgap));
    ap = 1.0;
    ad = 1.0;
    for (int k = 0; k < w.nblocks; ++k) {
      ap = std::min(ap, tau * max_step(X[k], dX[k]));
      ad = std::min(ad, tau * max_step(Z[k], dZ[k]));
    }
    // the cone is non-negotiable: back off until both iterates stay inside
    auto all_in_cone = [&](const std::vector<Mat>& base, const std::vector<Mat>& dir, Scalar a) {
      for (int k = 0; k < w.nblocks; ++k)
        if (!in_cone(base[k] + a * dir[k])) return false;
      return true;
    };
    for (int back = 0; back < 40 && ap > 0 && !all_in_cone(X, dX, ap); ++back) ap *= Scalar(0.5);
    for (int back = 0; back < 40 && ad > 0 && !all_in_cone(Z, dZ, ad); ++back) ad *= Scalar(0.5);
    small_steps = (std::min(ap, ad) < Scalar(0.05)) ? small_steps + 1 : 0;
    for (int k = 0; k < w.nblocks; ++k) {
      X[k] += ap * dX[k];
      Z[k] += ad * dZ[k];
      X[k] = Scalar(0.5) * (X[k] + X[k].transpose());
      Z[k] = Scalar(0.5) * (Z[k] + Z[k].transpose());
    }
    y += ap * dy;
    lam += ad * dlam;
  }

  sol.iterations = it;
  sol.gram_blocks.resize(w.nblocks);
  for (int k = 0; k < w.nblocks; ++k) sol.gram_blocks[k] = X[k].cast<double>();
  for (int k = 0; k < w.p; ++k) sol.free_scalars[inst.free_names[k]] = (double)y(k);
  sol.objective_value = (double)(w.flip * pobj);
  sol.duality_gap = (double)relgap;
  sol.primal_residual = (double)pres;
  sol.dual_residual = (double)dres;
  Scalar mineig = std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k < w.nblocks; ++k) {
    if (w.dims[k] == 0) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(X[k], Eigen::EigenvaluesOnly);
    mineig = std::min(mineig, es.eigenvalues().minCoeff());
  }
  sol.min_block_eigenvalue = std::isfinite((double)mineig) ? (double)mineig : 0.0;

  if (converged) {
    sol.status = (sol.min_block_eigenvalue < 10 * settings.feasibility_tolerance)
                     ? SolveStatus::Marginal
                     : SolveStatus::Optimal;
  } else {
    sol.status = SolveStatus::NumericalFailure;
    if (!failed) sol.trace.push_back("iteration limit reached");
  }
  return sol;
}

void UnscaleMap::apply(SDPSolution& sol, const SDPInstance& scaled_inst) const {
  for (size_t k = 0; k < sol.gram_blocks.size(); ++k) {
    auto& Q = sol.gram_blocks[k];
    for (int i = 0; i < Q.rows(); ++i)
      for (int j = 0; j < Q.cols(); ++j)
        Q(i, j) *= std::pow(scale, phi_degree - basis_degrees[k][i] - basis_degrees[k][j]);
  }
  for (size_t k = 0; k < scaled_inst.free_names.size(); ++k) {
    auto itf = sol.free_scalars.find(scaled_inst.free_names[k]);
    if (itf != sol.free_scalars.end()) itf->second *= std::pow(scale, free_weights[k]);
  }
  sol.objective_value *= std::pow(scale, phi_degree);
}

std::pair<SDPInstance, UnscaleMap> rescale_problem(const SDPInstance& inst, double state_scale) {
  if (!(state_scale > 0)) throw std::invalid_argument("rescale_problem: scale must be positive");
  SDPInstance out = inst;
  UnscaleMap map;
  map.scale = state_scale;
  map.phi_degree = inst.phi_degree;
  map.free_weights = inst.free_degree_weight;
  map.basis_degrees = inst.basis_degrees;
  for (auto& c : out.constraints) {
    // scaled coefficient of monomial mu picks up s^(|mu| - deg phi)
    double row_factor = std::pow(state_scale, c.monomial_degree - inst.phi_degree);
    c.rhs *= row_factor;
    for (auto& [k, v] : c.free_terms)
      v *= row_factor * std::pow(state_scale, inst.free_degree_weight[k]);
  }
  return {out, map};
}

std::map<std::string, double> recover_free_scalars(const sosform::SdpConversion& conv,
                                                   const SDPSolution& sol) {
  std::map<std::string, double> vals = sol.free_scalars;
  auto q_value = [&](size_t col) {
    auto [blk, i, j] = conv.q_layout[col];
    return sol.gram_blocks[blk](i, j);
  };
  for (auto it = conv.eliminated.rbegin(); it != conv.eliminated.rend(); ++it) {
    double v = to_double(it->rhs);
    for (const auto& [col, coef] : it->q_terms) v += to_double(coef) * q_value(col);
    for (const auto& [name, coef] : it->s_terms) {
      auto f = vals.find(name);
      if (f == vals.end()) throw std::logic_error("recover_free_scalars: missing " + name);
      v += to_double(coef) * f->second;
    }
    vals[it->name] = v;
  }
  return vals;
}

}  // namespace sosbound::sdpsolve
