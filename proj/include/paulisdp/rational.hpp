#pragma once

// Exact rational arithmetic on top of GMP's mpq, plus the text syntax shared by
// all file formats: "p" or "p/q" with an optional leading minus.

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace paulisdp {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// -1, 0, +1
inline int sign(const Rational& q) { return sgn(q); }

inline double to_double(const Rational& q) { return q.get_d(); }

inline bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t k = (s[0] == '-') ? 1 : 0;
  if (k == s.size()) return false;
  for (; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') return false;
  return true;
}

// Parses "p" or "p/q" (q > 0 after canonicalization); rejects anything else.
inline Rational parse_rational(const std::string& s) {
  const std::size_t slash = s.find('/');
  if (slash == std::string::npos) {
    if (!is_integer_token(s)) throw std::invalid_argument("bad rational: " + s);
    Rational q(s);
    return q;
  }
  const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  if (!is_integer_token(num) || !is_integer_token(den) || den[0] == '-')
    throw std::invalid_argument("bad rational: " + s);
  Rational q(s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Exact integer power with a possibly negative exponent (base != 0 for e < 0).
inline Rational rational_pow(long base, long e) {
  if (e >= 0) {
    Rational r = 1;
    for (long i = 0; i < e; ++i) r *= base;
    return r;
  }
  if (base == 0) throw std::invalid_argument("0 to a negative power");
  Rational r = 1;
  for (long i = 0; i < -e; ++i) r *= base;
  return 1 / r;
}

}  // namespace paulisdp
