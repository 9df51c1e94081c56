#include "sosbound/ratlin.hpp"

#include <numeric>
#include <stdexcept>

namespace sosbound::ratlin {

RatMat RatMat::operator*(const RatMat& o) const {
  if (c_ != o.r_) throw std::invalid_argument("RatMat: dim mismatch");
  RatMat out(r_, o.c_);
  for (size_t i = 0; i < r_; ++i)
    for (size_t k = 0; k < c_; ++k) {
      const Rational& aik = at(i, k);
      if (aik == 0) continue;
      for (size_t j = 0; j < o.c_; ++j) {
        const Rational& okj = o.at(k, j);
        if (okj != 0) out.at(i, j) += aik * okj;
      }
    }
  return out;
}

bool RatMat::is_symmetric() const {
  if (r_ != c_) return false;
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = i + 1; j < c_; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

Rref rref(const RatMat& a, const std::vector<Rational>& b,
          const std::vector<size_t>& col_order) {
  if (b.size() != a.rows()) throw std::invalid_argument("rref: rhs size");
  Rref r;
  r.mat = a;
  r.rhs = b;
  r.row_origin.resize(a.rows());
  std::iota(r.row_origin.begin(), r.row_origin.end(), size_t{0});

  size_t lead = 0;
  for (size_t ci : col_order) {
    if (lead >= r.mat.rows()) break;
    size_t pivot = lead;
    while (pivot < r.mat.rows() && r.mat.at(pivot, ci) == 0) ++pivot;
    if (pivot == r.mat.rows()) continue;
    if (pivot != lead) {
      for (size_t j = 0; j < r.mat.cols(); ++j) std::swap(r.mat.at(pivot, j), r.mat.at(lead, j));
      std::swap(r.rhs[pivot], r.rhs[lead]);
      std::swap(r.row_origin[pivot], r.row_origin[lead]);
    }
    Rational inv = Rational(1) / r.mat.at(lead, ci);
    for (size_t j = 0; j < r.mat.cols(); ++j) r.mat.at(lead, j) *= inv;
    r.rhs[lead] *= inv;
    for (size_t i = 0; i < r.mat.rows(); ++i) {
      if (i == lead) continue;
      Rational f = r.mat.at(i, ci);
      if (f == 0) continue;
      for (size_t j = 0; j < r.mat.cols(); ++j) r.mat.at(i, j) -= f * r.mat.at(lead, j);
      r.rhs[i] -= f * r.rhs[lead];
    }
    r.pivot_col.push_back(ci);
    ++lead;
  }
  for (size_t i = lead; i < r.mat.rows(); ++i) {
    bool all_zero = true;
    for (size_t j = 0; j < r.mat.cols() && all_zero; ++j)
      if (r.mat.at(i, j) != 0) all_zero = false;
    if (all_zero && r.rhs[i] != 0) {
      r.inconsistent = true;
      r.inconsistent_row = r.row_origin[i];
      return r;
    }
  }
  return r;
}

Rref rref(const RatMat& a, const std::vector<Rational>& b) {
  std::vector<size_t> order(a.cols());
  std::iota(order.begin(), order.end(), size_t{0});
  return rref(a, b, order);
}

std::vector<std::vector<Rational>> kernel_basis(const RatMat& a) {
  std::vector<Rational> zero(a.rows(), Rational(0));
  Rref r = rref(a, zero);
  std::vector<bool> is_pivot(a.cols(), false);
  for (size_t c : r.pivot_col) is_pivot[c] = true;

  std::vector<std::vector<Rational>> basis;
  for (size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(a.cols(), Rational(0));
    v[f] = 1;
    for (size_t row = 0; row < r.pivot_col.size(); ++row) v[r.pivot_col[row]] = -r.mat.at(row, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<Rational>> solve(const RatMat& a, const std::vector<Rational>& b) {
  Rref r = rref(a, b);
  if (r.inconsistent) return std::nullopt;
  std::vector<Rational> x(a.cols(), Rational(0));
  for (size_t row = 0; row < r.pivot_col.size(); ++row) x[r.pivot_col[row]] = r.rhs[row];
  return x;
}

Ldlt ldlt_psd(const RatMat& m) {
  if (!m.is_symmetric()) throw std::invalid_argument("ldlt_psd: not symmetric");
  size_t n = m.rows();
  Ldlt out;
  out.l = RatMat::identity(n);
  out.d.assign(n, Rational(0));
  RatMat w = m;  // working Schur complement, full storage

  for (size_t k = 0; k < n; ++k) {
    Rational piv = w.at(k, k);
    if (piv == 0) {
      // PSD requires the whole residual row to vanish with the pivot
      for (size_t j = k + 1; j < n; ++j)
        if (w.at(k, j) != 0) {
          out.ok = false;
          out.bad_index = k;
          return out;
        }
      out.d[k] = 0;
      continue;
    }
    if (piv < 0) {
      out.ok = false;
      out.bad_index = k;
      return out;
    }
    out.d[k] = piv;
    for (size_t i = k + 1; i < n; ++i) {
      Rational lik = w.at(i, k) / piv;
      out.l.at(i, k) = lik;
      if (lik == 0) continue;
      for (size_t j = k + 1; j <= i; ++j) {
        w.at(i, j) -= lik * w.at(k, j);
        w.at(j, i) = w.at(i, j);
      }
    }
  }
  out.ok = true;
  return out;
}

std::vector<Rational> charpoly(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("charpoly: not square");
  size_t n = m.rows();
  std::vector<Rational> c(n + 1, Rational(0));
  c[0] = 1;
  RatMat mk = m;
  for (size_t k = 1; k <= n; ++k) {
    Rational tr(0);
    for (size_t i = 0; i < n; ++i) tr += mk.at(i, i);
    c[k] = -tr / Rational(static_cast<long>(k));
    if (k == n) break;
    for (size_t i = 0; i < n; ++i) mk.at(i, i) += c[k];
    mk = m * mk;
  }
  return c;
}

PsdWitness check_psd_descartes(const RatMat& m) {
  PsdWitness w;
  if (m.rows() == 0) {
    w.psd = true;
    return w;
  }
  std::vector<Rational> c = charpoly(m);
  // PSD <=> coefficient of lambda^(n-k) has sign (-1)^k, zeros allowed.
  for (size_t k = 1; k < c.size(); ++k) {
    Rational signed_coeff = (k % 2 == 0) ? c[k] : Rational(-c[k]);
    if (signed_coeff < 0) {
      w.psd = false;
      w.violated_coeff_index = k;
      w.violated_coeff_value = c[k];
      return w;
    }
  }
  w.psd = true;
  Ldlt f = ldlt_psd(m);
  bool nonsingular = f.ok;
  for (const Rational& d : f.d)
    if (d == 0) nonsingular = false;
  if (nonsingular) w.factorization = std::move(f);
  return w;
}

bool check_psd_pivoting(const RatMat& m) {
  if (!m.is_symmetric()) throw std::invalid_argument("check_psd_pivoting: not symmetric");
  size_t n = m.rows();
  RatMat w = m;
  std::vector<bool> done(n, false);
  for (size_t step = 0; step < n; ++step) {
    // greedy max diagonal among remaining
    size_t p = n;
    for (size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (p == n || w.at(i, i) > w.at(p, p)) p = i;
    }
    if (p == n) break;
    Rational piv = w.at(p, p);
    if (piv < 0) return false;
    if (piv == 0) {
      // all remaining diagonals <= 0, hence all are 0; PSD iff the whole
      // remaining block vanishes
      for (size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (size_t j = 0; j < n; ++j)
          if (!done[j] && w.at(i, j) != 0) return false;
      }
      return true;
    }
    done[p] = true;
    for (size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      Rational f = w.at(i, p) / piv;
      if (f == 0) continue;
      for (size_t j = 0; j < n; ++j)
        if (!done[j]) w.at(i, j) -= f * w.at(p, j);
    }
    for (size_t i = 0; i < n; ++i) {
      if (!done[i]) {
        w.at(p, i) = 0;
        w.at(i, p) = 0;
      }
    }
  }
  return true;
}

}  // namespace sosbound::ratlin
