#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "sosbound/ratlin.hpp"

using namespace sosbound;
using namespace sosbound::ratlin;

namespace {

RatMat from_rows(std::initializer_list<std::initializer_list<long>> rows, long den = 1) {
  size_t r = rows.size(), c = rows.begin()->size();
  RatMat m(r, c);
  size_t i = 0;
  for (const auto& row : rows) {
    size_t j = 0;
    for (long v : row) m.at(i, j++) = Rational(v, den);
    ++i;
  }
  return m;
}

RatMat random_symmetric(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> num(-8, 8), den(1, 5);
  RatMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m.at(i, j) = Rational(num(rng), den(rng));
      m.at(j, i) = m.at(i, j);
    }
  return m;
}

RatMat gram_of_random(std::mt19937& rng, int n, int rank) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
  RatMat g(rank, n);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = Rational(num(rng), den(rng));
  return g.transposed() * g;  // PSD by construction, rank-deficient when rank < n
}

double float_min_eig(const RatMat& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) a(i, j) = to_double(m.at(i, j));
  if (m.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double float_norm(const RatMat& m) {
  double s = 0;
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) s += to_double(m.at(i, j)) * to_double(m.at(i, j));
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("cf_round best approximation") {
  CHECK(cf_round(Rational(355, 113), BigInt(113)) == Rational(355, 113));
  CHECK(cf_round(Rational(355, 113), BigInt(100)) == Rational(311, 99));  // semiconvergent
  CHECK(cf_round(3.141592653589793, 1000) == Rational(355, 113));
  CHECK(cf_round(3e-11, 1000000) == Rational(0));
  CHECK(cf_round(Rational(2, 3), BigInt(10)) == Rational(2, 3));
  CHECK(cf_round(-3.141592653589793, 1000) == Rational(-355, 113));
  // snaps floats that are close to simple fractions
  CHECK(cf_round(0.3333333333333333, 1000000) == Rational(1, 3));
}

TEST_CASE("rref, solve, kernel") {
  RatMat a = from_rows({{1, 2, 3}, {2, 4, 6}, {0, 1, 1}});
  std::vector<Rational> b{Rational(6), Rational(12), Rational(2)};
  auto x = solve(a, b);
  REQUIRE(x.has_value());
  // residual check
  for (size_t i = 0; i < 3; ++i) {
    Rational acc(0);
    for (size_t j = 0; j < 3; ++j) acc += a.at(i, j) * (*x)[j];
    CHECK(acc == b[i]);
  }
  auto k = kernel_basis(a);
  CHECK(k.size() == 1);

  std::vector<Rational> bad{Rational(6), Rational(11), Rational(2)};
  CHECK(!solve(a, bad).has_value());
}

TEST_CASE("charpoly on a known matrix") {
  RatMat m = from_rows({{2, 1}, {1, 2}});
  auto c = charpoly(m);  // lambda^2 - 4 lambda + 3
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 1);
  CHECK(c[1] == -4);
  CHECK(c[2] == 3);
}

TEST_CASE("psd decisions on fixed matrices") {
  // the explicit z^3 symmetric Gram block at standard parameters
  RatMat qs(3, 3);
  qs.at(0, 0) = Rational(3, 8);
  qs.at(0, 1) = qs.at(1, 0) = Rational(-3, 16);
  qs.at(0, 2) = qs.at(2, 0) = Rational(3, 16);
  qs.at(1, 1) = Rational(3, 8);
  qs.at(1, 2) = qs.at(2, 1) = Rational(-1, 2);
  qs.at(2, 2) = Rational(1);
  auto w = check_psd_descartes(qs);
  CHECK(w.psd);
  CHECK(w.factorization.has_value());  // positive definite
  CHECK(check_psd_pivoting(qs));

  RatMat bad = from_rows({{1, 2}, {2, 1}});  // det = -3
  auto wb = check_psd_descartes(bad);
  CHECK(!wb.psd);
  CHECK(!check_psd_pivoting(bad));

  RatMat zero(3, 3);
  CHECK(check_psd_descartes(zero).psd);
  CHECK(check_psd_pivoting(zero));

  // xy^3 symmetric block with Qa = 2 beta at beta = 8/3 (rank 2, PSD)
  Rational beta(8, 3);
  RatMat qx(3, 3);
  qx.at(0, 0) = 4 * beta;
  qx.at(0, 1) = qx.at(1, 0) = -(2 + beta);
  qx.at(0, 2) = qx.at(2, 0) = -4 * beta;
  qx.at(1, 1) = 4;
  qx.at(1, 2) = qx.at(2, 1) = 2 + beta;
  qx.at(2, 2) = 4 * beta;
  CHECK(check_psd_descartes(qx).psd);
  CHECK(check_psd_pivoting(qx));
}

TEST_CASE("ldlt of psd matrices") {
  RatMat m = from_rows({{4, 2}, {2, 2}});
  auto f = ldlt_psd(m);
  REQUIRE(f.ok);
  CHECK(f.d[0] == 4);
  CHECK(f.d[1] == 1);
  CHECK(f.l.at(1, 0) == Rational(1, 2));

  // zero pivot with nonzero row is not PSD
  RatMat bad = from_rows({{0, 1}, {1, 0}});
  CHECK(!ldlt_psd(bad).ok);

  // PSD with an interior zero row
  RatMat semi = from_rows({{1, 0, 1}, {0, 0, 0}, {1, 0, 2}});
  auto fs = ldlt_psd(semi);
  REQUIRE(fs.ok);
  CHECK(fs.d[1] == 0);
}

TEST_CASE("exact psd agrees with float eigenvalues on 1000 random matrices") {
  std::mt19937 rng(99);
  int checked = 0, psd_count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> dim(1, 6);
    int n = dim(rng);
    RatMat m = (trial % 3 == 0) ? gram_of_random(rng, n, std::max(1, n - 1))
                                : random_symmetric(rng, n);
    bool des = check_psd_descartes(m).psd;
    bool piv = check_psd_pivoting(m);
    REQUIRE(des == piv);  // two exact routes must agree
    double mineig = float_min_eig(m);
    double tol = 1e-10 * std::max(1.0, float_norm(m));
    if (des) CHECK(mineig >= -tol);
    if (mineig > tol) CHECK(des);  // clearly PD must be accepted
    ++checked;
    if (des) ++psd_count;
  }
  CHECK(checked == 1000);
  CHECK(psd_count > 200);  // the GtG share guarantees plenty of PSD cases
}
