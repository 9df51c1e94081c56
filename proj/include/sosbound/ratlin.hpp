#pragma once

// Dense exact-rational linear algebra: elimination, kernels, LDL^T, and
// characteristic polynomials.  Sized for the small systems this project
// produces (Gram blocks <= ~35, constraint systems <= a few hundred rows).

#include <optional>
#include <vector>

#include "sosbound/rational.hpp"

namespace sosbound::ratlin {

class RatMat {
 public:
  RatMat() = default;
  RatMat(size_t rows, size_t cols) : r_(rows), c_(cols), a_(rows * cols, Rational(0)) {}

  size_t rows() const { return r_; }
  size_t cols() const { return c_; }
  Rational& at(size_t i, size_t j) { return a_[i * c_ + j]; }
  const Rational& at(size_t i, size_t j) const { return a_[i * c_ + j]; }

  static RatMat identity(size_t n) {
    RatMat m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  RatMat transposed() const {
    RatMat t(c_, r_);
    for (size_t i = 0; i < r_; ++i)
      for (size_t j = 0; j < c_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  RatMat operator*(const RatMat& o) const;
  bool is_symmetric() const;

 private:
  size_t r_ = 0, c_ = 0;
  std::vector<Rational> a_;
};

// Row-reduces [A | b] in place over the given column order (columns earlier in
// `col_order` are preferred as pivots).  Returns pivot column per reduced row.
struct Rref {
  RatMat mat;                     // reduced A
  std::vector<Rational> rhs;     // reduced b
  std::vector<size_t> pivot_col; // one per nonzero row, in elimination order
  std::vector<size_t> row_origin;// original row index each reduced row started as
  bool inconsistent = false;     // a zero row with nonzero rhs appeared
  size_t inconsistent_row = 0;   // original index of the offending row
};

Rref rref(const RatMat& a, const std::vector<Rational>& b,
          const std::vector<size_t>& col_order);

Rref rref(const RatMat& a, const std::vector<Rational>& b);

// Kernel basis of A (columns = variables), one vector per free column, in the
// standard form: free coordinate 1, pivot coordinates back-substituted.
std::vector<std::vector<Rational>> kernel_basis(const RatMat& a);

// Solves A x = b when consistent; empty when inconsistent.  Free variables are
// set to zero.
std::optional<std::vector<Rational>> solve(const RatMat& a, const std::vector<Rational>& b);

// Natural-order LDL^T of a symmetric PSD matrix (zero pivots skip a zero
// row/col).  ok=false with `bad_index` set when the matrix is found not PSD:
// either a negative pivot or a zero pivot with a nonzero residual row.
struct Ldlt {
  bool ok = false;
  size_t bad_index = 0;
  RatMat l;                   // unit lower triangular
  std::vector<Rational> d;   // pivots (>= 0 when ok)
};

Ldlt ldlt_psd(const RatMat& m);

// det(lambda I - M) coefficients by Faddeev-LeVerrier: index k holds the
// coefficient of lambda^(n-k); [0] is always 1.
std::vector<Rational> charpoly(const RatMat& m);

// Rationals are exact, so the two PSD routes (Descartes sign alternation on
// the characteristic polynomial, and pivoted LDL^T) must agree; disagreement
// would be an internal error.
struct PsdWitness {
  bool psd = false;
  // not-psd: the violated characteristic coefficient (index + value)
  size_t violated_coeff_index = 0;
  Rational violated_coeff_value{0};
  // psd and nonsingular: the LDL^T factorization
  std::optional<Ldlt> factorization;
};

PsdWitness check_psd_descartes(const RatMat& m);

// Complete PSD decision by greedy max-diagonal pivoting; independent of the
// Descartes route.
bool check_psd_pivoting(const RatMat& m);

}  // namespace sosbound::ratlin
