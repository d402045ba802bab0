#pragma once

// Closed-form correlation data of the target 2n-qubit state: per-weight sums A,
// per-string diagonal values a, and the witness gap. Everything exact; the
// dense density matrix is never formed. The defining data is the swap-overlap
// law tr(pi_S Phi) = 1 / min(2^|S|, 2^{n-|S|}).

#include <stdexcept>
#include <vector>

#include "paulisdp/rational.hpp"

namespace paulisdp {

// tr(pi_S Phi) for |S| = s: 1 / min(2^s, 2^{n-s}).
inline Rational swap_expectation(int s, int n) {
  if (s < 0 || s > n) throw std::out_of_range("swap_expectation: s out of range");
  const int e = s < n - s ? s : n - s;
  return rational_pow(2, -e);
}

namespace detail {
inline Rational binom_rat(int n, int k) {
  if (k < 0 || k > n) return 0;
  Rational c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - i + 1) / i;
  return c;
}
}  // namespace detail

// A_i = Sum_{j=0..i} C(n,i) C(i,j) (-1)^{i-j} 2^j / min(2^j, 2^{n-j}).
inline Rational weight_sum(int i, int n) {
  if (i < 0 || i > n) throw std::out_of_range("weight_sum: i out of range");
  Rational acc = 0;
  for (int j = 0; j <= i; ++j) {
    const int sgn = ((i - j) % 2 == 0) ? 1 : -1;
    acc += sgn * detail::binom_rat(i, j) * rational_pow(2, j) * swap_expectation(j, n);
  }
  return detail::binom_rat(n, i) * acc;
}

// a_i = A_i / (3^i C(n,i)): the common diagonal value of a weight-i string.
inline Rational diagonal_entry(int i, int n) {
  if (i < 0 || i > n) throw std::out_of_range("diagonal_entry: i out of range");
  return weight_sum(i, n) / (rational_pow(3, i) * detail::binom_rat(n, i));
}

struct CorrelationTable {
  int n = 0;
  std::vector<Rational> A;  // per-weight sums, index 0..n
  std::vector<Rational> a;  // per-string diagonal values, index 0..n
};

inline CorrelationTable correlation_table(int n) {
  CorrelationTable t;
  t.n = n;
  for (int i = 0; i <= n; ++i) {
    t.A.push_back(weight_sum(i, n));
    t.a.push_back(diagonal_entry(i, n));
  }
  return t;
}

// tr(W' Phi) = theta - Sum_{i=4..7} A_i = theta - 127 for the n=7 state;
// a negative value certifies entanglement detection by the witness.
inline double witness_gap(double theta_value) {
  Rational s = 0;
  for (int i = 4; i <= 7; ++i) s += weight_sum(i, 7);
  return theta_value - to_double(s);
}

}  // namespace paulisdp
