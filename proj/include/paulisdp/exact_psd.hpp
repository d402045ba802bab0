#pragma once

// Exact positive-semidefiniteness decision for symmetric matrices over
// Q(sqrt(3)) by fraction-free-in-spirit symmetric Gaussian elimination (LDL^T
// in diagonal order). The verdict is a proof artifact:
//   - a negative pivot identifies a vector with negative quadratic form;
//   - a zero pivot with a nonzero entry in its row identifies an indefinite
//     2x2 principal minor [[0, v], [v, *]];
//   - otherwise the recorded pivots/multipliers reconstruct M = L D L^T,
//     which is a PSD witness.

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "paulisdp/quadfield.hpp"

namespace paulisdp {

using ExactSymMatrix = std::vector<std::vector<QuadExt>>;

struct PsdCheckResult {
  bool accepted = false;
  std::string witness;  // reason for rejection; empty when accepted
  // LDL^T data (meaningful when accepted): unit-lower L and diagonal D with
  // M = L * diag(pivots) * L^T exactly. Skipped (zero) pivots leave a zero
  // column in L.
  std::vector<QuadExt> pivots;
  std::vector<std::vector<QuadExt>> lower;
};

inline PsdCheckResult is_psd_exact(const ExactSymMatrix& M) {
  const std::size_t d = M.size();
  for (const auto& row : M)
    if (row.size() != d) throw std::invalid_argument("matrix not square");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (M[i][j] != M[j][i]) throw std::invalid_argument("matrix not symmetric");

  ExactSymMatrix A = M;
  PsdCheckResult res;
  res.pivots.assign(d, QuadExt(0));
  res.lower.assign(d, std::vector<QuadExt>(d, QuadExt(0)));
  for (std::size_t i = 0; i < d; ++i) res.lower[i][i] = QuadExt(1);

  for (std::size_t k = 0; k < d; ++k) {
    const QuadExt piv = A[k][k];
    const int s = qsign(piv);
    if (s < 0) {
      std::ostringstream os;
      os << "negative pivot at index " << k << ": " << to_string(piv);
      res.witness = os.str();
      return res;
    }
    if (s == 0) {
      for (std::size_t j = k + 1; j < d; ++j) {
        if (!is_zero(A[k][j])) {
          std::ostringstream os;
          os << "zero pivot at index " << k << " with nonzero off-diagonal at column "
             << j << " (indefinite 2x2 minor [[0, " << to_string(A[k][j]) << "], ["
             << to_string(A[k][j]) << ", " << to_string(A[j][j]) << "]])";
          res.witness = os.str();
          return res;
        }
      }
      continue;  // zero pivot with zero row contributes nothing
    }
    res.pivots[k] = piv;
    for (std::size_t r = k + 1; r < d; ++r) {
      const QuadExt mult = A[r][k] / piv;
      res.lower[r][k] = mult;
      if (is_zero(mult)) continue;
      for (std::size_t c = k + 1; c <= r; ++c) {
        A[r][c] -= mult * A[k][c];
        if (c != r) A[c][r] = A[r][c];
      }
    }
  }
  res.accepted = true;
  return res;
}

}  // namespace paulisdp
