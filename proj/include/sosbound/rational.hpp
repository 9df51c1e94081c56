#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosbound {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

// Exact: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite");
  return Rational(x);
}

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Rational rat_pow(const Rational& q, long e) {
  if (e < 0) {
    if (q == 0) throw std::domain_error("rat_pow: 0^negative");
    return Rational(1) / rat_pow(q, -e);
  }
  Rational r(1), b(q);
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// Best rational approximation with denominator <= max_den, by continued
// fractions with a final semiconvergent.  Ties resolve to the convergent.
inline Rational cf_round(const Rational& x, const BigInt& max_den) {
  if (max_den < 1) throw std::invalid_argument("cf_round: max_den < 1");
  BigInt p = numerator(x), q = denominator(x);
  if (q <= max_den) return x;
  bool neg = p < 0;
  if (neg) p = -p;
  // convergents h/k of p/q
  BigInt h0 = 1, k0 = 0, h1 = 0, k1 = 1;  // h0/k0 = 1/0, h1/k1 = 0/1
  BigInt a, r;
  BigInt num = p, den = q;
  while (den != 0) {
    a = num / den;
    r = num % den;
    BigInt h2 = a * h0 + h1, k2 = a * k0 + k1;
    if (k2 > max_den) {
      // best semiconvergent: h1 + t*h0 over k1 + t*k0 with largest t allowed
      BigInt t = (max_den - k1) / k0;
      BigInt sh = h0 * t + h1, sk = k0 * t + k1;
      Rational conv(h0, k0), semi(sh, sk), target(p, q);
      Rational best = (rat_abs(semi - target) < rat_abs(conv - target)) ? semi : conv;
      return neg ? Rational(-best) : best;
    }
    h1 = h0; k1 = k0; h0 = h2; k0 = k2;
    num = den; den = r;
  }
  Rational best(h0, k0);
  return neg ? Rational(-best) : best;
}

inline Rational cf_round(double x, long max_den = 1000000) {
  return cf_round(rational_from_double(x), BigInt(max_den));
}

// Smallest-denominator rational in the closed interval [lo, hi].
inline Rational simplest_in_interval(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw std::invalid_argument("simplest_in_interval: empty interval");
  if (lo <= 0 && 0 <= hi) return Rational(0);
  if (hi < 0) return -simplest_in_interval(Rational(-hi), Rational(-lo));
  // 0 < lo <= hi: walk the continued fraction of the interval
  Rational a = lo, b = hi;
  std::vector<BigInt> digits;
  while (true) {
    BigInt fa = numerator(a) / denominator(a);  // floor for positive a
    BigInt ca = (numerator(a) % denominator(a) == 0) ? fa : fa + 1;
    if (ca <= b) {
      digits.push_back(ca);
      break;
    }
    digits.push_back(fa);
    a -= fa;
    b -= fa;
    Rational na = Rational(1) / b, nb = Rational(1) / a;
    a = na;
    b = nb;
  }
  Rational v(digits.back());
  for (size_t i = digits.size() - 1; i-- > 0;) v = Rational(digits[i]) + Rational(1) / v;
  return v;
}

inline std::string rat_str(const Rational& q) {
  std::string s = numerator(q).str();
  if (denominator(q) != 1) s += "/" + denominator(q).str();
  return s;
}

// Parses "p", "p/q" or a plain decimal like "-0.25" / "2.5e-3".
inline Rational rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("rat_parse: zero denominator");
    return Rational(n, d);
  }
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
      s.find('E') != std::string::npos) {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("rat_parse: trailing junk in '" + s + "'");
    return rational_from_double(v);
  }
  return Rational(BigInt(s));
}

}  // namespace sosbound
