#include "sosbound/polyalg.hpp"

#include <cctype>

namespace sosbound::polyalg {

namespace {

struct Lexer {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  std::string number() {
    skip_ws();
    size_t start = i;
    while (i < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == '/' ||
            ((s[i] == 'e' || s[i] == 'E') && i + 1 < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '+' ||
              s[i + 1] == '-')) ||
            ((s[i] == '+' || s[i] == '-') && i > start && (s[i - 1] == 'e' || s[i - 1] == 'E'))))
      ++i;
    if (i == start) throw std::invalid_argument("parse_poly: expected number at '" + s.substr(i) + "'");
    return s.substr(start, i - start);
  }

  std::string ident() {
    skip_ws();
    size_t start = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    if (i == start) throw std::invalid_argument("parse_poly: expected identifier at '" + s.substr(i) + "'");
    return s.substr(start, i - start);
  }
};

}  // namespace

RPoly parse_poly(VarSetPtr vars, const std::string& text) {
  Lexer lx{text};
  RPoly out(vars);
  if (lx.done()) throw std::invalid_argument("parse_poly: empty input");

  bool first = true;
  while (!lx.done()) {
    int sign = 1;
    if (lx.eat('-')) sign = -1;
    else if (lx.eat('+')) sign = 1;
    else if (!first)
      throw std::invalid_argument("parse_poly: expected +/- between terms");
    first = false;

    Rational coeff(sign);
    Monomial mono(vars->size());
    bool any_factor = false;
    do {
      char c = lx.peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coeff *= rat_parse(lx.number());
      } else {
        std::string v = lx.ident();
        int idx = vars->index_of(v);
        if (idx < 0) throw std::invalid_argument("parse_poly: unknown variable " + v);
        int pow = 1;
        if (lx.eat('^')) pow = static_cast<int>(std::stol(lx.number()));
        if (pow < 0) throw std::invalid_argument("parse_poly: negative exponent");
        mono.exp[idx] += pow;
      }
      any_factor = true;
    } while (lx.eat('*'));
    if (!any_factor) throw std::invalid_argument("parse_poly: empty term");
    out.add_term(mono, coeff);
  }
  return out;
}

}  // namespace sosbound::polyalg
