#pragma once

// Constructors for every SDP instance the pipeline needs, in the shared
// solver-neutral standard form:
//   - build_theta:                   Lovasz theta of an explicit graph (bordered layout)
//   - build_theta_sym:               symmetry-reduced theta of the anticommutativity
//                                    graph, over orbit-class variables and the small
//                                    block decomposition
//   - build_reduced_feasibility:     symmetry-reduced moment-matrix feasibility with
//                                    the diagonal pinned to prescribed per-weight sums
//   - build_theta_body_feasibility:  reduced theta-body membership at a given target
//
// Orbit classes (i,j,t,p) and (j,i,t,p) describe transposed positions of a
// symmetric matrix and are merged into one scalar variable named with i >= j.

#include <optional>
#include <set>
#include <string>

#include "paulisdp/correlations.hpp"
#include "paulisdp/pauli.hpp"
#include "paulisdp/sdp_instance.hpp"
#include "paulisdp/terwilliger.hpp"

namespace paulisdp {

inline std::string class_var_name(OrbitKey key) {
  if (key.i < key.j) std::swap(key.i, key.j);
  return "x_" + std::to_string(key.i) + "_" + std::to_string(key.j) + "_" +
         std::to_string(key.t) + "_" + std::to_string(key.p);
}

// Bordered Lovasz theta layout: block 0 is [[1, x^T], [x, M]] of dimension
// |V|+1; scalar variable a carries the common value of the border entry and
// the diagonal entry of vertex a.
struct GraphSdp {
  int vertices = 0;
  SdpInstance sdp;

  int x_var(int a) const { return a; }
  EntryRef corner() const { return {0, 0, 0}; }
  EntryRef border_entry(int a) const { return {0, 0, a + 1}; }
  EntryRef body_entry(int a, int b) const {
    return a <= b ? EntryRef{0, a + 1, b + 1} : EntryRef{0, b + 1, a + 1};
  }
};

inline GraphSdp build_theta_layout(const AnticommGraph& g, bool export_only = false) {
  const int count = int(g.vertices.size());
  if (count > 5000 && !export_only)
    throw std::length_error(
        "build_theta: graph exceeds the 5000-vertex direct-solve guard "
        "(pass export_only to build anyway)");
  GraphSdp layout;
  layout.vertices = count;
  SdpInstance& inst = layout.sdp;
  inst.metadata = "theta n=" + std::to_string(g.n) + " delta=" + std::to_string(g.delta) +
                  " vertices=" + std::to_string(count);
  inst.add_block("theta", count + 1);
  for (int a = 0; a < count; ++a) inst.add_variable("x" + std::to_string(a));
  for (int a = 0; a < count; ++a) inst.objective[a] = 1.0;

  Constraint corner;
  corner.form.add_entry(0, 0, 0, 1.0);
  corner.rhs = 1.0;
  inst.constraints.push_back(std::move(corner));
  for (int a = 0; a < count; ++a) {
    Constraint border;
    border.form.add_entry(0, 0, a + 1, 1.0);
    border.form.add_var(a, -1.0);
    inst.constraints.push_back(std::move(border));
  }
  for (int a = 0; a < count; ++a) {
    Constraint diag;
    diag.form.add_entry(0, a + 1, a + 1, 1.0);
    diag.form.add_var(a, -1.0);
    inst.constraints.push_back(std::move(diag));
  }
  for (const auto& [u, v] : g.edges) {
    Constraint edge;
    edge.form.add_entry(0, int(u) + 1, int(v) + 1, 1.0);
    inst.constraints.push_back(std::move(edge));
  }
  return layout;
}

inline SdpInstance build_theta(const AnticommGraph& g, bool export_only = false) {
  return build_theta_layout(g, export_only).sdp;
}

namespace detail {

// Shared skeleton of the reduced instances: merged class variables, the block
// list, and one coupling constraint per block entry tying it to its linear
// combination of class variables.
struct ReducedSkeleton {
  VariableIndexSet keys;
  BlockIndexSet blocks;
  std::map<OrbitKey, int> var_of;  // canonical (i>=j) key -> variable index
};

inline ReducedSkeleton start_reduced(SdpInstance& inst, int n) {
  ReducedSkeleton sk;
  sk.keys = variable_index_set(n);
  sk.blocks = block_index_set(n);
  for (const OrbitKey& key : sk.keys.keys) {
    if (key.i < key.j) continue;  // mirror of an earlier canonical class
    sk.var_of[key] = inst.add_variable(class_var_name(key));
  }
  for (const BlockIndex& b : sk.blocks.blocks)
    inst.add_block("Y_" + std::to_string(b.a) + "_" + std::to_string(b.k), b.dim);
  return sk;
}

inline int canonical_var(const ReducedSkeleton& sk, OrbitKey key) {
  if (key.i < key.j) std::swap(key.i, key.j);
  return sk.var_of.at(key);
}

inline void add_entry_couplings(SdpInstance& inst, const ReducedSkeleton& sk, int n) {
  for (std::size_t bi = 0; bi < sk.blocks.blocks.size(); ++bi) {
    const BlockIndex& b = sk.blocks.blocks[bi];
    for (int r = 0; r < b.dim; ++r)
      for (int c = r; c < b.dim; ++c) {
        const int wi = r + b.k, wj = c + b.k;
        Constraint tie;
        tie.form.add_entry(int(bi), r, c, 1.0);
        for_each_class_at(wi, wj, n, [&](int t, int p) {
          tie.form.add_var(canonical_var(sk, {wi, wj, t, p}),
                           -alpha_coeff_double(wi, wj, t, p, b.a, b.k, n));
        });
        inst.constraints.push_back(std::move(tie));
      }
  }
}

inline void pin_var(SdpInstance& inst, std::set<int>& pinned, int q, double value) {
  if (!pinned.insert(q).second && value == 0.0) return;
  Constraint pin;
  pin.form.add_var(q, 1.0);
  pin.rhs = value;
  inst.constraints.push_back(std::move(pin));
}

// normalization, diagonal/border couplings, and structural zeros (t-p odd)
inline void add_core_constraints(SdpInstance& inst, const ReducedSkeleton& sk, int n,
                                 std::set<int>& pinned) {
  pin_var(inst, pinned, canonical_var(sk, {0, 0, 0, 0}), 1.0);
  for (int i = 1; i <= n; ++i) {
    Constraint couple;
    couple.form.add_var(canonical_var(sk, {i, 0, 0, 0}), 1.0);
    couple.form.add_var(canonical_var(sk, {i, i, i, i}), -1.0);
    inst.constraints.push_back(std::move(couple));
  }
  for (const auto& [key, q] : sk.var_of)
    if (((key.t - key.p) & 1) != 0) pin_var(inst, pinned, q, 0.0);
}

inline void add_endpoint_delta_pins(SdpInstance& inst, const ReducedSkeleton& sk, int delta,
                                    std::set<int>& pinned) {
  for (const auto& [key, q] : sk.var_of)
    if ((key.i > 0 && key.i < delta) || (key.j > 0 && key.j < delta))
      pin_var(inst, pinned, q, 0.0);
}

}  // namespace detail

// Symmetry-reduced Lovasz theta of the anticommutativity graph G_{n,delta}:
//   maximize sum_{i>=1} gamma^{i,i}_{i,i} x_{i,i,i,i}
// over class variables with x_{0,0,0,0} = 1, border/diagonal coupling,
// structural zeros, endpoint pins below delta, and the PSD block coupling.
inline SdpInstance build_theta_sym(int n, int delta) {
  if (n < 1 || n > 10 || delta < 1 || delta > n)
    throw std::out_of_range("build_theta_sym: need 1 <= delta <= n <= 10");
  SdpInstance inst;
  inst.metadata = "theta-sym n=" + std::to_string(n) + " delta=" + std::to_string(delta);
  detail::ReducedSkeleton sk = detail::start_reduced(inst, n);
  for (int i = 1; i <= n; ++i)
    inst.objective[detail::canonical_var(sk, {i, i, i, i})] =
        double(gamma_norm(i, i, i, i, n));
  std::set<int> pinned;
  detail::add_core_constraints(inst, sk, n, pinned);
  detail::add_endpoint_delta_pins(inst, sk, delta, pinned);
  detail::add_entry_couplings(inst, sk, n);
  return inst;
}

enum class PinMode { per_weight, total };

// Feasibility form of the reduced moment-matrix SDP with the diagonal pinned
// to the prescribed per-weight sums A_i (or their total). Zero objective.
// When a per-weight sum vanishes, every class touching that weight is pinned
// to zero as well: a PSD matrix with a zero diagonal entry has a zero row, so
// the pins only remove slack that no feasible point could use, and they keep
// the restricted problem strictly feasible for interior-point detection.
inline SdpInstance build_reduced_feasibility(int n, const CorrelationTable& diag,
                                             std::optional<int> delta_opt = std::nullopt,
                                             PinMode pin_mode = PinMode::per_weight) {
  if (diag.n != n)
    throw std::invalid_argument("build_reduced_feasibility: table size does not match n");
  SdpInstance inst;
  inst.metadata = "reduced-feasibility n=" + std::to_string(n) +
                  (delta_opt ? " delta=" + std::to_string(*delta_opt) : "") +
                  (pin_mode == PinMode::total ? " pin=total" : " pin=per-weight");
  detail::ReducedSkeleton sk = detail::start_reduced(inst, n);
  std::set<int> pinned;
  detail::add_core_constraints(inst, sk, n, pinned);
  if (pin_mode == PinMode::per_weight) {
    for (int i = 1; i <= n; ++i) {
      Constraint pin;
      pin.form.add_var(detail::canonical_var(sk, {i, i, i, i}),
                       double(gamma_norm(i, i, i, i, n)));
      pin.rhs = to_double(diag.A[std::size_t(i)]);
      inst.constraints.push_back(std::move(pin));
    }
    for (int i = 1; i <= n; ++i) {
      if (sign(diag.A[std::size_t(i)]) != 0) continue;
      for (const auto& [key, q] : sk.var_of)
        if (key.i == i || key.j == i) detail::pin_var(inst, pinned, q, 0.0);
    }
  } else {
    Constraint pin;
    double total = 0.0;
    for (int i = 1; i <= n; ++i) {
      pin.form.add_var(detail::canonical_var(sk, {i, i, i, i}),
                       double(gamma_norm(i, i, i, i, n)));
      total += to_double(diag.A[std::size_t(i)]);
    }
    pin.rhs = total;
    inst.constraints.push_back(std::move(pin));
  }
  if (delta_opt) {
    const int delta = *delta_opt;
    detail::add_endpoint_delta_pins(inst, sk, delta, pinned);
    for (const auto& [key, q] : sk.var_of) {
      const int product_weight = key.i + key.j - key.t - key.p;
      if (product_weight > 0 && product_weight < delta) detail::pin_var(inst, pinned, q, 0.0);
    }
  }
  detail::add_entry_couplings(inst, sk, n);
  return inst;
}

// Reduced theta-body membership test: the theta constraints of G_{n,delta}
// with zero objective plus 1 + sum_{i>=1} gamma^{i,i}_{i,i} x_{i,i,i,i} = target.
inline SdpInstance build_theta_body_feasibility(int n, int delta, double target) {
  if (target <= 0.0) throw std::invalid_argument("build_theta_body_feasibility: target must be positive");
  SdpInstance inst = build_theta_sym(n, delta);
  inst.objective.clear();
  inst.metadata = "theta-body n=" + std::to_string(n) + " delta=" + std::to_string(delta) +
                  " target=" + detail::fmt_double(target);
  Constraint sum;
  detail::ReducedSkeleton sk;  // rebuild the variable map for name lookup
  sk.keys = variable_index_set(n);
  for (const OrbitKey& key : sk.keys.keys)
    if (key.i >= key.j) sk.var_of[key] = inst.find_variable(class_var_name(key));
  for (int i = 1; i <= n; ++i)
    sum.form.add_var(detail::canonical_var(sk, {i, i, i, i}),
                     double(gamma_norm(i, i, i, i, n)));
  sum.rhs = target - 1.0;
  inst.constraints.push_back(std::move(sum));
  return inst;
}

}  // namespace paulisdp
