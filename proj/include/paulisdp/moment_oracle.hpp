#pragma once

// Brute-force moment matrices of small separable ensembles, with a checker for
// every structural constraint the symmetry-reduced SDP relies on: positive
// semidefiniteness, unit normalization, the diagonal/first-column identity,
// vanishing real part on anticommuting pairs, and nonnegative real diagonal.
// Dense complex 64-bit arithmetic; intended for n <= 3 only.

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "paulisdp/pauli.hpp"

namespace paulisdp {

// Probabilistic mixture of pure states on n qubits.
struct Ensemble {
  int n = 0;
  std::vector<std::pair<double, Eigen::VectorXcd>> terms;  // (p_i, psi_i)
};

// 4^n x 4^n complex matrix indexed by enumerate_paulis order.
struct MomentMatrix {
  int n = 0;
  Eigen::MatrixXcd entries;
};

// Action of the Hermitian Pauli string E = i^{|x&z|} X^x Z^z on a state:
// (E psi)[b ^ x] = i^{|x&z|} (-1)^{|b&z|} psi[b]. E is Hermitian and E^2 = I.
inline Eigen::VectorXcd apply_pauli(const PauliString& E, const Eigen::VectorXcd& psi) {
  const std::size_t dim = std::size_t(1) << E.n;
  if (std::size_t(psi.size()) != dim)
    throw std::invalid_argument("apply_pauli: state dimension does not match qubit count");
  static const std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> phase = i_pow[std::popcount(E.x_bits & E.z_bits) % 4];
  Eigen::VectorXcd out(psi.size());
  for (std::uint32_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & E.z_bits) & 1) != 0 ? -1.0 : 1.0;
    out[b ^ E.x_bits] = phase * sign * psi[b];
  }
  return out;
}

// <psi| E |psi>; real for every Pauli string since E is Hermitian.
inline std::complex<double> pauli_expectation(const PauliString& E, const Eigen::VectorXcd& psi) {
  return psi.dot(apply_pauli(E, psi));  // Eigen's dot conjugates the left argument
}

// Seeded mixture of 1..4 normalized complex-Gaussian states.
inline Ensemble random_ensemble(int n, std::uint64_t seed) {
  if (n < 1 || n > 3) throw std::out_of_range("random_ensemble: n must be in [1,3]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(1, 4);
  std::uniform_real_distribution<double> weight_dist(0.1, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int terms = size_dist(rng);
  const Eigen::Index dim = Eigen::Index(1) << n;

  Ensemble e;
  e.n = n;
  double total = 0.0;
  std::vector<double> weights(terms);
  for (double& w : weights) total += (w = weight_dist(rng));
  for (int t = 0; t < terms; ++t) {
    Eigen::VectorXcd psi(dim);
    for (Eigen::Index q = 0; q < dim; ++q) psi[q] = {gauss(rng), gauss(rng)};
    psi.normalize();
    e.terms.emplace_back(weights[t] / total, std::move(psi));
  }
  return e;
}

// Gamma_{ab} = sum_i p_i <E_b>_i <E_a>_i <psi_i| E_a E_b |psi_i>, evaluated with
// explicit phases: precompute w_c = E_c psi so that <psi|E_a E_b|psi> = w_a^dag w_b.
inline MomentMatrix build_gamma(const Ensemble& e) {
  if (e.n < 1 || e.n > 3) throw std::out_of_range("build_gamma: n must be in [1,3]");
  const std::vector<PauliString> paulis = enumerate_paulis(e.n);
  const Eigen::Index count = Eigen::Index(paulis.size());
  const Eigen::Index dim = Eigen::Index(1) << e.n;

  MomentMatrix G;
  G.n = e.n;
  G.entries = Eigen::MatrixXcd::Zero(count, count);
  double total_weight = 0.0;
  for (const auto& [p, psi] : e.terms) {
    if (p < -1e-12) throw std::invalid_argument("build_gamma: negative mixture weight");
    if (psi.size() != dim)
      throw std::invalid_argument("build_gamma: state dimension does not match qubit count");
    if (std::abs(psi.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("build_gamma: state is not normalized");
    total_weight += p;

    Eigen::MatrixXcd w(dim, count);  // column c = E_c psi
    Eigen::VectorXd v(count);        // v_c = <E_c> (real)
    for (Eigen::Index c = 0; c < count; ++c) {
      w.col(c) = apply_pauli(paulis[std::size_t(c)], psi);
      v[c] = psi.dot(w.col(c)).real();
    }
    const Eigen::MatrixXcd prods = w.adjoint() * w;  // prods(a,b) = <psi|E_a E_b|psi>
    for (Eigen::Index a = 0; a < count; ++a)
      for (Eigen::Index b = 0; b < count; ++b) G.entries(a, b) += p * v[b] * v[a] * prods(a, b);
  }
  if (std::abs(total_weight - 1.0) > 1e-9)
    throw std::invalid_argument("build_gamma: mixture weights must sum to 1");
  return G;
}

// Maximum violations of each structural constraint; all fields are >= 0 except
// min_eigenvalue, which stores the smallest eigenvalue of the Hermitian part.
struct ConstraintReport {
  double min_eigenvalue = 0.0;
  double psd_violation = 0.0;            // max(0, -min_eigenvalue)
  double identity_violation = 0.0;       // |Gamma_00 - 1|
  double norm_violation = 0.0;           // max_a |Gamma_aa - Gamma_a0|
  double anticommute_violation = 0.0;    // max |Re Gamma_ab| over anticommuting pairs
  double diagonal_violation = 0.0;       // max_a max(|Im Gamma_aa|, -Re Gamma_aa)
  double ensemble_diagonal_violation = 0.0;  // max_a |Gamma_aa - sum_i p_i <E_a>_i^2|

  double max_violation() const {
    double m = psd_violation;
    for (double x : {identity_violation, norm_violation, anticommute_violation,
                     diagonal_violation, ensemble_diagonal_violation})
      m = std::max(m, x);
    return m;
  }
  bool passes(double check_tol = 1e-10, double eig_floor = 1e-9) const {
    return psd_violation <= eig_floor && identity_violation <= check_tol &&
           norm_violation <= check_tol && anticommute_violation <= check_tol &&
           diagonal_violation <= check_tol && ensemble_diagonal_violation <= check_tol;
  }
};

inline ConstraintReport check_gamma_constraints(const MomentMatrix& G) {
  const std::vector<PauliString> paulis = enumerate_paulis(G.n);
  const Eigen::Index count = Eigen::Index(paulis.size());
  if (G.entries.rows() != count || G.entries.cols() != count)
    throw std::invalid_argument("check_gamma_constraints: matrix size does not match n");

  ConstraintReport rep;
  const Eigen::MatrixXcd herm = (G.entries + G.entries.adjoint()) / 2.0;
  rep.min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  rep.psd_violation = std::max(0.0, -rep.min_eigenvalue);
  rep.identity_violation = std::abs(G.entries(0, 0) - std::complex<double>(1.0));
  for (Eigen::Index a = 0; a < count; ++a) {
    rep.norm_violation = std::max(rep.norm_violation, std::abs(G.entries(a, a) - G.entries(a, 0)));
    rep.diagonal_violation = std::max(rep.diagonal_violation, std::abs(G.entries(a, a).imag()));
    rep.diagonal_violation = std::max(rep.diagonal_violation, -G.entries(a, a).real());
    for (Eigen::Index b = 0; b < count; ++b)
      if (anticommutes(paulis[std::size_t(a)], paulis[std::size_t(b)]))
        rep.anticommute_violation =
            std::max(rep.anticommute_violation, std::abs(G.entries(a, b).real()));
  }
  return rep;
}

inline ConstraintReport check_gamma_constraints(const MomentMatrix& G, const Ensemble& e) {
  ConstraintReport rep = check_gamma_constraints(G);
  const std::vector<PauliString> paulis = enumerate_paulis(G.n);
  for (std::size_t a = 0; a < paulis.size(); ++a) {
    double diag = 0.0;
    for (const auto& [p, psi] : e.terms) {
      const double v = pauli_expectation(paulis[a], psi).real();
      diag += p * v * v;
    }
    rep.ensemble_diagonal_violation =
        std::max(rep.ensemble_diagonal_violation,
                 std::abs(G.entries(Eigen::Index(a), Eigen::Index(a)) - diag));
  }
  return rep;
}

}  // namespace paulisdp
