#pragma once

// The symmetry-reduction engine for the quaternary Hamming/Terwilliger scheme:
// orbit-class counting (gamma), the block-diagonalization coefficients (beta,
// alpha), variable/block index sets, primal block assembly, dual y-value
// reconstruction, and the small-n orbit-averaging oracle.
//
// Conventions: binomials and multinomials are 0 for any negative or
// out-of-range argument, which silently prunes inadmissible index tuples.
// alpha always lives in Q(sqrt(3)); it is rational exactly when i+j is even.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "paulisdp/exact_psd.hpp"
#include "paulisdp/pauli.hpp"
#include "paulisdp/quadfield.hpp"

namespace paulisdp {

inline long long binomial_ll(int a, int b) {
  if (b < 0 || a < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  long long c = 1;
  for (int i = 1; i <= b; ++i) c = c * (a - i + 1) / i;
  return c;
}

// n! / (p1! p2! p3! p4! (n - p1 - p2 - p3 - p4)!); 0 when invalid.
inline long long multinomial4(int n, int p1, int p2, int p3, int p4) {
  if (p1 < 0 || p2 < 0 || p3 < 0 || p4 < 0) return 0;
  const int rest = n - p1 - p2 - p3 - p4;
  if (rest < 0) return 0;
  long long r = binomial_ll(n, p1);
  r *= binomial_ll(n - p1, p2);
  r *= binomial_ll(n - p1 - p2, p3);
  r *= binomial_ll(n - p1 - p2 - p3, p4);
  return r;
}

// gamma^{t,p}_{i,j} = 3^{i+j-t} 2^{t-p} multinom(n; p, t-p, i-t, j-t):
// the number of ordered Pauli pairs with orbit key (i,j,t,p) at size n.
inline long long gamma_norm(int i, int j, int t, int p, int n) {
  const long long m = multinomial4(n, p, t - p, i - t, j - t);
  if (m == 0) return 0;
  long long r = m;
  for (int e = 0; e < i + j - t; ++e) r *= 3;
  for (int e = 0; e < t - p; ++e) r *= 2;
  return r;
}

// beta^{m,t}_{i,j,k} = Sum_{u=0..m} (-1)^{t-u} C(u,t) C(m-2k, m-k-u)
//                      C(m-k-u, i-u) C(m-k-u, j-u).
inline long long beta_coeff(int i, int j, int k, int m, int t) {
  long long acc = 0;
  for (int u = 0; u <= m; ++u) {
    const long long term = binomial_ll(u, t) * binomial_ll(m - 2 * k, m - k - u) *
                           binomial_ll(m - k - u, i - u) * binomial_ll(m - k - u, j - u);
    if (term == 0) continue;
    acc += (((t - u) & 1) != 0) ? -term : term;
  }
  return acc;
}

// alpha(i,j,t,p,a,k) = 3^{(i+j)/2 - t} beta^{n-a,t-a}_{i-a,j-a,k-a}
//                      Sum_{g=0..p} 2^{t-a-p+g} (-1)^{a-g} C(a,g) C(t-a, p-g).
// Exact element of Q(sqrt(3)); the sqrt(3) factor appears exactly when i+j is odd.
inline QuadExt alpha_coeff(int i, int j, int t, int p, int a, int k, int n) {
  const long long b = beta_coeff(i - a, j - a, k - a, n - a, t - a);
  if (b == 0) return QuadExt(0);
  Rational gsum = 0;
  for (int g = 0; g <= p; ++g) {
    const long long c1 = binomial_ll(a, g), c2 = binomial_ll(t - a, p - g);
    if (c1 == 0 || c2 == 0) continue;
    Rational term = rational_pow(2, t - a - p + g) * static_cast<long>(c1 * c2);
    if (((a - g) & 1) != 0) term = -term;
    gsum += term;
  }
  if (gsum == 0) return QuadExt(0);
  const Rational coef = Rational(static_cast<long>(b)) * gsum;
  const int e = i + j - 2 * t;  // exponent of sqrt(3)
  if (e % 2 == 0) return QuadExt(coef * rational_pow(3, e / 2));
  // e odd (possibly negative): 3^{e/2} = 3^{(e-1)/2} * sqrt(3), (e-1) even
  return QuadExt(Rational(0), coef * rational_pow(3, (e - 1) / 2));
}

inline double alpha_coeff_double(int i, int j, int t, int p, int a, int k, int n) {
  return to_double(alpha_coeff(i, j, t, p, a, k, n));
}

// All admissible keys (0 <= p <= t <= min(i,j), i+j-t <= n), i.e. exactly the
// keys with gamma_norm > 0, in lexicographic (j, i, t, p) order.
struct VariableIndexSet {
  int n = 0;
  std::vector<OrbitKey> keys;
};

inline VariableIndexSet variable_index_set(int n) {
  if (n < 1) throw std::invalid_argument("variable_index_set: n >= 1 required");
  VariableIndexSet vs;
  vs.n = n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      for (int t = 0; t <= (i < j ? i : j); ++t) {
        if (i + j - t > n) continue;
        for (int p = 0; p <= t; ++p) vs.keys.push_back({i, j, t, p});
      }
  return vs;
}

// Blocks (a,k) with 0 <= a <= k <= n+a-k and dim = n+a-2k+1.
struct BlockIndex {
  int a = 0, k = 0, dim = 0;
};

struct BlockIndexSet {
  int n = 0;
  std::vector<BlockIndex> blocks;
};

inline BlockIndexSet block_index_set(int n) {
  if (n < 1) throw std::invalid_argument("block_index_set: n >= 1 required");
  BlockIndexSet bs;
  bs.n = n;
  for (int a = 0; a <= n; ++a)
    for (int k = a; 2 * k <= n + a; ++k)
      bs.blocks.push_back({a, k, n + a - 2 * k + 1});
  return bs;
}

namespace detail {
// Admissible (t,p) pairs for matrix position (i,j): iterate t from
// max(0, i+j-n) to min(i,j), p from 0 to t.
template <typename Fn>
inline void for_each_class_at(int i, int j, int n, Fn&& fn) {
  const int tmin = i + j - n > 0 ? i + j - n : 0;
  const int tmax = i < j ? i : j;
  for (int t = tmin; t <= tmax; ++t)
    for (int p = 0; p <= t; ++p) fn(t, p);
}
}  // namespace detail

// Block (a,k) entry (i,j), i,j in [k, n+a-k]: Sum_{t,p} alpha(i,j,t,p,a,k) x^{t,p}_{i,j}.
// Missing keys are treated as 0; unknown keys are an error.
inline std::vector<ExactSymMatrix> assemble_blocks(const std::map<OrbitKey, QuadExt>& x,
                                                   int n) {
  for (const auto& [key, val] : x)
    if (key.i > n || key.j > n || gamma_norm(key.i, key.j, key.t, key.p, n) == 0)
      throw std::invalid_argument("assemble_blocks: key outside index set");
  std::vector<ExactSymMatrix> out;
  for (const BlockIndex& blk : block_index_set(n).blocks) {
    ExactSymMatrix M(blk.dim, std::vector<QuadExt>(blk.dim, QuadExt(0)));
    for (int r = 0; r < blk.dim; ++r)
      for (int c = r; c < blk.dim; ++c) {
        const int i = blk.k + r, j = blk.k + c;
        QuadExt acc(0);
        detail::for_each_class_at(i, j, n, [&](int t, int p) {
          const auto it = x.find({i, j, t, p});
          if (it == x.end() || is_zero(it->second)) return;
          acc += alpha_coeff(i, j, t, p, blk.a, blk.k, n) * it->second;
        });
        M[r][c] = acc;
        M[c][r] = acc;
      }
    out.push_back(std::move(M));
  }
  return out;
}

// Floating twin of assemble_blocks for solver/oracle use; alpha values come
// from the same exact code path, converted at this boundary.
inline std::vector<Eigen::MatrixXd> assemble_blocks_double(
    const std::map<OrbitKey, double>& x, int n) {
  std::vector<Eigen::MatrixXd> out;
  for (const BlockIndex& blk : block_index_set(n).blocks) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(blk.dim, blk.dim);
    for (int r = 0; r < blk.dim; ++r)
      for (int c = r; c < blk.dim; ++c) {
        const int i = blk.k + r, j = blk.k + c;
        double acc = 0;
        detail::for_each_class_at(i, j, n, [&](int t, int p) {
          const auto it = x.find({i, j, t, p});
          if (it == x.end() || it->second == 0.0) return;
          acc += alpha_coeff_double(i, j, t, p, blk.a, blk.k, n) * it->second;
        });
        M(r, c) = acc;
        M(c, r) = acc;
      }
    out.push_back(std::move(M));
  }
  return out;
}

// Dual reconstruction: y^{t,p}_{i,j} = (1/gamma) Sum_{k=0..min(i,j)}
// Sum_{a=max(0, max(i,j)+k-n)}^{k} alpha(i,j,t,p,a,k) Y^{(a,k)}[i-k][j-k].
// Shares alpha with the primal assembly above.
inline std::map<OrbitKey, QuadExt> dual_y_values(
    const std::map<std::pair<int, int>, ExactSymMatrix>& Y, int n) {
  for (const BlockIndex& blk : block_index_set(n).blocks) {
    const auto it = Y.find({blk.a, blk.k});
    if (it == Y.end() || it->second.size() != std::size_t(blk.dim))
      throw std::invalid_argument("dual_y_values: block dimension mismatch");
  }
  std::map<OrbitKey, QuadExt> y;
  for (const OrbitKey& key : variable_index_set(n).keys) {
    const int lo = key.i < key.j ? key.i : key.j;
    const int hi = key.i < key.j ? key.j : key.i;
    QuadExt acc(0);
    for (int k = 0; k <= lo; ++k) {
      const int amin = hi + k - n > 0 ? hi + k - n : 0;
      for (int a = amin; a <= k; ++a) {
        const QuadExt al = alpha_coeff(key.i, key.j, key.t, key.p, a, k, n);
        if (is_zero(al)) continue;
        acc += al * Y.at({a, k})[key.i - k][key.j - k];
      }
    }
    y[key] = acc /
             QuadExt(Rational(static_cast<long>(gamma_norm(key.i, key.j, key.t, key.p, n))));
  }
  return y;
}

// Orbit-class averaging of a dense matrix indexed by enumerate_paulis order:
// x^{t,p}_{i,j} = (1/gamma) Sum over pairs in the class of G[a][b]. Averaging
// over orbit classes equals averaging over S_3 wr S_n since orbits coincide.
inline std::map<OrbitKey, double> symmetrize_small(
    const std::vector<std::vector<double>>& G, int n) {
  if (n > 3) throw std::invalid_argument("symmetrize_small: oracle scale is n <= 3");
  const std::vector<PauliString> ps = enumerate_paulis(n);
  if (G.size() != ps.size()) throw std::invalid_argument("symmetrize_small: dim mismatch");
  std::map<OrbitKey, double> sums;
  std::map<OrbitKey, long long> counts;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    if (G[a].size() != ps.size())
      throw std::invalid_argument("symmetrize_small: dim mismatch");
    for (std::size_t b = 0; b < ps.size(); ++b) {
      const OrbitKey key = orbit_key(ps[a], ps[b]);
      sums[key] += G[a][b];
      counts[key] += 1;
    }
  }
  std::map<OrbitKey, double> x;
  for (const auto& [key, s] : sums) x[key] = s / double(counts[key]);
  return x;
}

}  // namespace paulisdp
