#pragma once

// The quadratic field Q(sqrt(3)): values r + s*sqrt(3) with exact rational r, s.
// sqrt(3) is hard-coded as the only extension; the token `z` denotes sqrt(3) in
// the text syntax "p/q", "p/q+r/s*z", "p/q-r/s*z" (integers may omit "/1").

#include <cmath>
#include <stdexcept>
#include <string>

#include "paulisdp/rational.hpp"

namespace paulisdp {

struct QuadExt {
  Rational r;  // rational part
  Rational s;  // coefficient of sqrt(3)

  QuadExt() : r(0), s(0) {}
  QuadExt(Rational rat) : r(std::move(rat)), s(0) {}
  QuadExt(long v) : r(v), s(0) {}
  QuadExt(Rational rat, Rational srd) : r(std::move(rat)), s(std::move(srd)) {}

  bool operator==(const QuadExt& o) const { return r == o.r && s == o.s; }
  bool operator!=(const QuadExt& o) const { return !(*this == o); }
};

inline QuadExt operator+(const QuadExt& a, const QuadExt& b) {
  return {a.r + b.r, a.s + b.s};
}
inline QuadExt operator-(const QuadExt& a, const QuadExt& b) {
  return {a.r - b.r, a.s - b.s};
}
inline QuadExt operator-(const QuadExt& a) { return {-a.r, -a.s}; }
inline QuadExt operator*(const QuadExt& a, const QuadExt& b) {
  return {a.r * b.r + 3 * a.s * b.s, a.r * b.s + a.s * b.r};
}
inline QuadExt& operator+=(QuadExt& a, const QuadExt& b) { return a = a + b; }
inline QuadExt& operator-=(QuadExt& a, const QuadExt& b) { return a = a - b; }
inline QuadExt& operator*=(QuadExt& a, const QuadExt& b) { return a = a * b; }

inline bool is_zero(const QuadExt& a) { return a.r == 0 && a.s == 0; }

// Division via the conjugate: 1/(r+s z) = (r - s z)/(r^2 - 3 s^2).
inline QuadExt operator/(const QuadExt& a, const QuadExt& b) {
  if (is_zero(b)) throw std::domain_error("QuadExt division by zero");
  const Rational norm = b.r * b.r - 3 * b.s * b.s;
  // norm == 0 would mean r = +-s*sqrt(3), impossible over Q unless both vanish.
  const QuadExt conj{b.r / norm, -b.s / norm};
  return a * conj;
}
inline QuadExt& operator/=(QuadExt& a, const QuadExt& b) { return a = a / b; }

// Exact sign of r + s*sqrt(3): -1, 0, +1. When the parts disagree in sign the
// verdict follows the comparison of r^2 with 3 s^2 (sign of the dominant part).
inline int qsign(const QuadExt& a) {
  const int sr = sign(a.r), ss = sign(a.s);
  if (sr == 0 && ss == 0) return 0;
  if (ss == 0) return sr;
  if (sr == 0) return ss;
  if (sr == ss) return sr;
  const int c = cmp(a.r * a.r, 3 * a.s * a.s);
  if (c == 0) return 0;  // unreachable for nonzero parts; kept for totality
  return c > 0 ? sr : ss;
}

inline double to_double(const QuadExt& a) {
  return to_double(a.r) + to_double(a.s) * std::sqrt(3.0);
}

inline std::string to_string(const QuadExt& a) {
  if (a.s == 0) return to_string(a.r);
  if (a.s > 0) return to_string(a.r) + "+" + to_string(Rational(a.s)) + "*z";
  return to_string(a.r) + "-" + to_string(Rational(-a.s)) + "*z";
}

// Parses the QuadExt text syntax. The sqrt-part, when present, is separated by
// the first sign character after position 0 and must end in "*z" (or bare "z"
// for a unit coefficient).
inline QuadExt parse_quadext(const std::string& tok) {
  if (tok.empty()) throw std::invalid_argument("empty QuadExt token");
  std::size_t sep = std::string::npos;
  for (std::size_t k = 1; k < tok.size(); ++k) {
    if (tok[k] == '+' || tok[k] == '-') {
      sep = k;
      break;
    }
  }
  if (sep == std::string::npos) {
    if (tok.find('z') != std::string::npos)
      throw std::invalid_argument("bad QuadExt token: " + tok);
    return QuadExt(parse_rational(tok));
  }
  const std::string left = tok.substr(0, sep);
  std::string right = tok.substr(sep + 1);
  const bool neg = tok[sep] == '-';
  if (right.size() < 1 || right.back() != 'z')
    throw std::invalid_argument("bad QuadExt token: " + tok);
  right.pop_back();
  if (!right.empty() && right.back() == '*') right.pop_back();
  Rational s = right.empty() ? Rational(1) : parse_rational(right);
  if (neg) s = -s;
  return {parse_rational(left), s};
}

}  // namespace paulisdp
