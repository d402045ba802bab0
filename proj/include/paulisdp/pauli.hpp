#pragma once

// Phase-free Pauli strings in the symplectic bit-pair encoding, their products,
// commutation, enumeration, wreath-product orbit keys, and the
// anti-commutativity graph on strings of weight >= delta.

#include <bit>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace paulisdp {

// Site k carries X iff bit k of x_bits, Z iff bit k of z_bits, Y iff both,
// I iff neither. Global phase is not represented.
struct PauliString {
  int n = 0;
  std::uint32_t x_bits = 0;
  std::uint32_t z_bits = 0;

  bool operator==(const PauliString& o) const = default;
};

inline void require_same_n(const PauliString& a, const PauliString& b) {
  if (a.n != b.n) throw std::invalid_argument("Pauli length mismatch");
}

inline std::uint32_t support(const PauliString& p) { return p.x_bits | p.z_bits; }

inline int weight(const PauliString& p) {
  return std::popcount(support(p));
}

// Sitewise XOR: equals E_a * E_b (and E_a^dag * E_b) up to phase.
inline PauliString product(const PauliString& a, const PauliString& b) {
  require_same_n(a, b);
  return {a.n, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits};
}

// True iff the symplectic inner product <a, b> = |a.x & b.z| + |a.z & b.x| is odd.
inline bool anticommutes(const PauliString& a, const PauliString& b) {
  require_same_n(a, b);
  const int ip = std::popcount(a.x_bits & b.z_bits) + std::popcount(a.z_bits & b.x_bits);
  return (ip & 1) != 0;
}

// All 4^n strings in a fixed order: ascending (z_bits << n) | x_bits, so index
// 0 is the identity and n=1 enumerates [I, X, Z, Y].
inline std::vector<PauliString> enumerate_paulis(int n) {
  if (n < 1 || n > 12) throw std::out_of_range("enumerate_paulis: n must be in [1, 12]");
  const std::uint32_t m = 1u << n;
  std::vector<PauliString> out;
  out.reserve(std::size_t(m) * m);
  for (std::uint32_t z = 0; z < m; ++z)
    for (std::uint32_t x = 0; x < m; ++x)
      out.push_back({n, x, z});
  return out;
}

// Invariants of an ordered Pauli pair under the wreath product S_3 wr S_n:
// i = wt(a), j = wt(b), t = |supp(a) and supp(b)|, p = i + j - t - wt(a*b).
struct OrbitKey {
  int i = 0, j = 0, t = 0, p = 0;
  auto operator<=>(const OrbitKey&) const = default;
};

inline OrbitKey orbit_key(const PauliString& a, const PauliString& b) {
  require_same_n(a, b);
  const int i = weight(a), j = weight(b);
  const int t = std::popcount(support(a) & support(b));
  const int p = i + j - t - weight(product(a, b));
  return {i, j, t, p};
}

// Graph on the non-identity Pauli strings of weight >= delta with an edge
// exactly where two strings anticommute.
struct AnticommGraph {
  int n = 0;
  int delta = 0;
  std::vector<PauliString> vertices;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v indices
};

inline std::vector<PauliString> graph_vertices(int n, int delta) {
  if (delta < 1 || delta > n) throw std::out_of_range("build_graph: need 1 <= delta <= n");
  std::vector<PauliString> verts;
  for (const PauliString& p : enumerate_paulis(n))
    if (weight(p) >= delta) verts.push_back(p);
  return verts;
}

// Closed form Sum_{i=delta..n} 3^i C(n,i); cross-checked against enumeration.
inline std::size_t graph_vertex_count(int n, int delta) {
  if (delta < 1 || delta > n) throw std::out_of_range("graph_vertex_count: bad delta");
  std::size_t total = 0;
  for (int i = delta; i <= n; ++i) {
    std::size_t c = 1;
    for (int k = 1; k <= i; ++k) c = c * std::size_t(n - k + 1) / k;
    std::size_t pw = 1;
    for (int k = 0; k < i; ++k) pw *= 3;
    total += pw * c;
  }
  return total;
}

// Streams each anticommuting pair (u < v) without materializing the edge set.
inline void for_each_edge(const std::vector<PauliString>& vertices,
                          const std::function<void(std::uint32_t, std::uint32_t)>& fn) {
  const std::size_t nv = vertices.size();
  for (std::size_t u = 0; u < nv; ++u)
    for (std::size_t v = u + 1; v < nv; ++v)
      if (anticommutes(vertices[u], vertices[v]))
        fn(std::uint32_t(u), std::uint32_t(v));
}

inline AnticommGraph build_graph(int n, int delta) {
  AnticommGraph g;
  g.n = n;
  g.delta = delta;
  g.vertices = graph_vertices(n, delta);
  for_each_edge(g.vertices, [&g](std::uint32_t u, std::uint32_t v) {
    g.edges.emplace_back(u, v);
  });
  return g;
}

// Edge-list text format: header "# n=<n> delta=<delta> vertices=<V>", then one
// "u v" pair (0-based vertex indices) per line.
inline void export_edge_list(int n, int delta, std::ostream& os) {
  const std::vector<PauliString> verts = graph_vertices(n, delta);
  os << "# n=" << n << " delta=" << delta << " vertices=" << verts.size() << "\n";
  for_each_edge(verts, [&os](std::uint32_t u, std::uint32_t v) {
    os << u << " " << v << "\n";
  });
}

}  // namespace paulisdp
