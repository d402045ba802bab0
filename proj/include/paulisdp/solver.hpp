#pragma once

// Small dense primal-dual interior-point SDP solver for desk-scale instances
// (blocks up to ~64, a few hundred scalar coordinates). Pipeline:
//
//   1. canonicalize: lay out all coordinates (scalar variables, then the upper
//      triangles of every block), eliminate the equality constraints by dense
//      Gaussian elimination with complete pivoting, and parametrize the
//      solution set z = h + N u. The PSD conditions become one linear matrix
//      inequality per block: F0 + sum_q u_q Fq >= 0.
//   2. presolve: any diagonal entry whose affine form is identically zero
//      forces its whole row to vanish on every PSD point, so the row's
//      off-diagonal forms become equalities; eliminate them, drop the row,
//      repeat to a fixpoint.
//   3. Nesterov-Todd scaled predictor-corrector path following on the reduced
//      LMI (maximize c.u), Cholesky on the Schur complement.
//   4. instances with an identically-zero objective are treated as
//      feasibility problems via phase I: maximize lambda subject to
//      Z(u) - lambda I >= 0 and lambda <= 1.
//
// Convergence here is numeric corroboration only; exact conclusions come from
// the rational certificate checker.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "paulisdp/sdp_instance.hpp"

namespace paulisdp {

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

enum class SolveStatus { optimal, infeasible_suspected, iteration_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_suspected: return "infeasible_suspected";
    default: return "iteration_limit";
  }
}

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

// For feasibility instances (empty objective) primal_value holds the phase-I
// margin lambda: the instance is reported feasible when lambda is positive.
struct Solution {
  SolveStatus status = SolveStatus::iteration_limit;
  double primal_value = 0.0;
  double dual_value = 0.0;
  std::map<std::string, double> x;
  std::vector<Eigen::MatrixXd> block_matrices;  // per instance block, at the returned point
  Residuals residuals;
  int iterations = 0;
  std::string note;
};

// ---------------------------------------------------------------- pipeline --

// max c.u  s.t.  F0[b] + sum_q u_q Fq[b][q] >= 0 for every block b
struct LmiProblem {
  std::vector<Eigen::MatrixXd> F0;
  std::vector<std::vector<Eigen::MatrixXd>> Fq;  // [block][q]
  int nu = 0;
};

namespace detail {

// column layout: scalar variables first, then upper-triangle entries per block
struct ColumnLayout {
  int nvars = 0;
  std::vector<int> block_start;
  std::vector<int> block_dim;
  int total = 0;

  explicit ColumnLayout(const SdpInstance& inst) {
    nvars = int(inst.variables.size());
    int c = nvars;
    for (const auto& [label, dim] : inst.blocks) {
      block_start.push_back(c);
      block_dim.push_back(dim);
      c += dim * (dim + 1) / 2;
    }
    total = c;
  }
  int var_col(int q) const { return q; }
  int entry_col(int b, int i, int j) const {
    if (i > j) std::swap(i, j);
    const int d = block_dim[std::size_t(b)];
    return block_start[std::size_t(b)] + i * d - i * (i - 1) / 2 + (j - i);
  }
};

// Gaussian elimination with complete pivoting on [A|b]; returns the general
// solution z = h + N u, or consistent=false when some eliminated row demands a
// nonzero right-hand side.
struct EliminationResult {
  bool consistent = false;
  Eigen::VectorXd h;
  Eigen::MatrixXd N;
};

inline EliminationResult eliminate(Eigen::MatrixXd Ab, int ncol, double pivot_rel,
                                   double incons_tol) {
  const int m = int(Ab.rows());
  std::vector<int> colperm(static_cast<std::size_t>(ncol));
  for (int c = 0; c < ncol; ++c) colperm[std::size_t(c)] = c;
  int rank = 0;
  for (int step = 0; step < std::min(m, ncol); ++step) {
    int pr = -1, pc = -1;
    double piv = 0.0;
    for (int r = rank; r < m; ++r)
      for (int c = rank; c < ncol; ++c)
        if (std::abs(Ab(r, c)) > piv) {
          piv = std::abs(Ab(r, c));
          pr = r;
          pc = c;
        }
    const double magnitude = Ab.leftCols(ncol).cwiseAbs().maxCoeff();
    if (piv < pivot_rel * std::max(1.0, magnitude)) break;
    Ab.row(rank).swap(Ab.row(pr));
    Ab.col(rank).swap(Ab.col(pc));
    std::swap(colperm[std::size_t(rank)], colperm[std::size_t(pc)]);
    Ab.row(rank) /= Ab(rank, rank);
    for (int r2 = 0; r2 < m; ++r2)
      if (r2 != rank && Ab(r2, rank) != 0.0) Ab.row(r2) -= Ab(r2, rank) * Ab.row(rank);
    ++rank;
  }
  EliminationResult res;
  for (int r = rank; r < m; ++r)
    if (std::abs(Ab(r, ncol)) > incons_tol) return res;  // inconsistent
  res.consistent = true;
  const int nfree = ncol - rank;
  res.h = Eigen::VectorXd::Zero(ncol);
  res.N = Eigen::MatrixXd::Zero(ncol, nfree);
  for (int i = 0; i < rank; ++i) {
    res.h[colperm[std::size_t(i)]] = Ab(i, ncol);
    for (int f = 0; f < nfree; ++f) res.N(colperm[std::size_t(i)], f) = -Ab(i, rank + f);
  }
  for (int f = 0; f < nfree; ++f) res.N(colperm[std::size_t(rank + f)], f) = 1.0;
  return res;
}

}  // namespace detail

struct Canonicalization {
  bool consistent = false;
  detail::ColumnLayout layout;
  Eigen::VectorXd h;   // all coordinates: z = h + N u
  Eigen::MatrixXd N;
  LmiProblem lmi;
  Eigen::VectorXd cu;  // objective over u
  double c0 = 0.0;     // objective constant after elimination
};

inline Canonicalization canonicalize(const SdpInstance& inst) {
  inst.validate();
  Canonicalization cz{false, detail::ColumnLayout(inst), {}, {}, {}, {}, 0.0};
  const detail::ColumnLayout& lay = cz.layout;
  const int m = int(inst.constraints.size());
  Eigen::MatrixXd Ab = Eigen::MatrixXd::Zero(m, lay.total + 1);
  for (int r = 0; r < m; ++r) {
    const Constraint& con = inst.constraints[std::size_t(r)];
    for (const auto& [q, coeff] : con.form.vars) Ab(r, lay.var_col(q)) += coeff;
    for (const auto& [ref, coeff] : con.form.entries)
      Ab(r, lay.entry_col(ref.block, ref.i, ref.j)) += coeff;
    Ab(r, lay.total) = con.rhs;
  }
  detail::EliminationResult el = detail::eliminate(std::move(Ab), lay.total, 1e-12, 1e-8);
  if (!el.consistent) return cz;
  cz.consistent = true;
  cz.h = std::move(el.h);
  cz.N = std::move(el.N);
  const int nfree = int(cz.N.cols());

  cz.lmi.nu = nfree;
  for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
    const int d = inst.blocks[b].second;
    Eigen::MatrixXd F0 = Eigen::MatrixXd::Zero(d, d);
    std::vector<Eigen::MatrixXd> Fq(std::size_t(nfree), Eigen::MatrixXd::Zero(d, d));
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const int col = lay.entry_col(int(b), i, j);
        F0(i, j) = F0(j, i) = cz.h[col];
        for (int f = 0; f < nfree; ++f)
          if (cz.N(col, f) != 0.0) Fq[std::size_t(f)](i, j) = Fq[std::size_t(f)](j, i) = cz.N(col, f);
      }
    cz.lmi.F0.push_back(std::move(F0));
    cz.lmi.Fq.push_back(std::move(Fq));
  }
  cz.cu = Eigen::VectorXd::Zero(nfree);
  for (const auto& [q, coeff] : inst.objective) {
    cz.c0 += coeff * cz.h[lay.var_col(q)];
    cz.cu += coeff * cz.N.row(lay.var_col(q)).transpose();
  }
  return cz;
}

struct PresolveResult {
  bool consistent = false;
  LmiProblem lmi;
  Eigen::VectorXd cu;    // objective over the reduced parameters v
  Eigen::VectorXd haff;  // u = haff + Naff v
  Eigen::MatrixXd Naff;
};

inline PresolveResult presolve(const LmiProblem& in, const Eigen::VectorXd& cu_in) {
  PresolveResult pr;
  pr.lmi = in;
  pr.cu = cu_in;
  int m = in.nu;
  pr.haff = Eigen::VectorXd::Zero(m);
  pr.Naff = Eigen::MatrixXd::Identity(m, m);

  bool changed = true;
  while (changed) {
    changed = false;
    // forced linear forms from rows whose diagonal form is identically zero
    std::vector<Eigen::VectorXd> form_coeffs;
    std::vector<double> form_consts;
    for (std::size_t b = 0; b < pr.lmi.F0.size(); ++b) {
      const Eigen::MatrixXd& F0 = pr.lmi.F0[b];
      const auto& Fq = pr.lmi.Fq[b];
      const int d = int(F0.rows());
      for (int r = 0; r < d; ++r) {
        bool zero_diag = F0(r, r) == 0.0;
        for (int q = 0; zero_diag && q < m; ++q)
          if (Fq[std::size_t(q)](r, r) != 0.0) zero_diag = false;
        if (!zero_diag) continue;
        for (int s = 0; s < d; ++s) {
          if (s == r) continue;
          Eigen::VectorXd coeffs(m);
          bool any = F0(r, s) != 0.0;
          for (int q = 0; q < m; ++q) {
            coeffs[q] = Fq[std::size_t(q)](r, s);
            if (coeffs[q] != 0.0) any = true;
          }
          if (any) {
            form_coeffs.push_back(std::move(coeffs));
            form_consts.push_back(F0(r, s));
          }
        }
      }
    }
    if (!form_coeffs.empty()) {
      Eigen::MatrixXd Ab = Eigen::MatrixXd::Zero(int(form_coeffs.size()), m + 1);
      for (std::size_t r = 0; r < form_coeffs.size(); ++r) {
        Ab.row(int(r)).head(m) = form_coeffs[r].transpose();
        Ab(int(r), m) = -form_consts[r];
      }
      detail::EliminationResult el = detail::eliminate(std::move(Ab), m, 1e-11, 1e-8);
      if (!el.consistent) return pr;  // a PSD-forced equality cannot be met
      const int nfree = int(el.N.cols());
      if (nfree < m) {
        for (std::size_t b = 0; b < pr.lmi.F0.size(); ++b) {
          auto& Fq = pr.lmi.Fq[b];
          Eigen::MatrixXd& F0 = pr.lmi.F0[b];
          for (int q = 0; q < m; ++q)
            if (el.h[q] != 0.0) F0 += el.h[q] * Fq[std::size_t(q)];
          std::vector<Eigen::MatrixXd> Fq2(std::size_t(nfree),
                                           Eigen::MatrixXd::Zero(F0.rows(), F0.cols()));
          for (int f = 0; f < nfree; ++f)
            for (int q = 0; q < m; ++q)
              if (el.N(q, f) != 0.0) Fq2[std::size_t(f)] += el.N(q, f) * Fq[std::size_t(q)];
          Fq = std::move(Fq2);
        }
        pr.haff += pr.Naff * el.h;
        pr.Naff = pr.Naff * el.N;
        pr.cu = el.N.transpose() * pr.cu;
        m = nfree;
        pr.lmi.nu = m;
        changed = true;
      }
    }
    // drop rows/columns that became identically zero
    std::vector<Eigen::MatrixXd> nF0;
    std::vector<std::vector<Eigen::MatrixXd>> nFq;
    for (std::size_t b = 0; b < pr.lmi.F0.size(); ++b) {
      const Eigen::MatrixXd& F0 = pr.lmi.F0[b];
      const auto& Fq = pr.lmi.Fq[b];
      const int d = int(F0.rows());
      std::vector<int> keep;
      for (int r = 0; r < d; ++r) {
        bool nonzero = F0.row(r).cwiseAbs().maxCoeff() != 0.0;
        for (int q = 0; !nonzero && q < m; ++q)
          if (Fq[std::size_t(q)].row(r).cwiseAbs().maxCoeff() != 0.0) nonzero = true;
        if (nonzero) keep.push_back(r);
      }
      if (int(keep.size()) < d) changed = true;
      if (keep.empty()) continue;
      const int dk = int(keep.size());
      Eigen::MatrixXd F0k(dk, dk);
      std::vector<Eigen::MatrixXd> Fqk(std::size_t(m), Eigen::MatrixXd(dk, dk));
      for (int a = 0; a < dk; ++a)
        for (int c = 0; c < dk; ++c) {
          F0k(a, c) = F0(keep[std::size_t(a)], keep[std::size_t(c)]);
          for (int q = 0; q < m; ++q)
            Fqk[std::size_t(q)](a, c) = Fq[std::size_t(q)](keep[std::size_t(a)], keep[std::size_t(c)]);
        }
      nF0.push_back(std::move(F0k));
      nFq.push_back(std::move(Fqk));
    }
    pr.lmi.F0 = std::move(nF0);
    pr.lmi.Fq = std::move(nFq);
  }
  pr.consistent = true;
  return pr;
}

struct LmiSolution {
  SolveStatus status = SolveStatus::iteration_limit;
  Eigen::VectorXd u;
  double pobj = 0.0;
  double dobj = 0.0;
  double mu = 0.0;
  int iters = 0;
  double res_p = 0.0;
  double res_d = 0.0;
  std::vector<Eigen::MatrixXd> X;  // dual blocks
  std::vector<Eigen::MatrixXd> Z;  // slack blocks
};

namespace detail {

inline bool all_posdef(const std::vector<Eigen::MatrixXd>& Ms) {
  for (const Eigen::MatrixXd& M : Ms)
    if (Eigen::LLT<Eigen::MatrixXd>(M).info() != Eigen::Success) return false;
  return true;
}

// largest alpha with M + alpha dM > 0 (capped at 1)
inline double max_step(const std::vector<Eigen::MatrixXd>& Ms,
                       const std::vector<Eigen::MatrixXd>& dMs) {
  double amax = 1.0;
  for (std::size_t b = 0; b < Ms.size(); ++b) {
    Eigen::LLT<Eigen::MatrixXd> llt(Ms[b]);
    double lam = 0.0;
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd L = llt.matrixL();
      const Eigen::MatrixXd Y =
          L.triangularView<Eigen::Lower>().solve(dMs[b]).transpose();
      const Eigen::MatrixXd S = L.triangularView<Eigen::Lower>().solve(Y);
      lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>((S + S.transpose()) / 2.0,
                                                           Eigen::EigenvaluesOnly)
                .eigenvalues()
                .minCoeff();
    } else {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
          (dMs[b] + dMs[b].transpose()) / 2.0, Ms[b], Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
      lam = ges.eigenvalues().minCoeff();
    }
    if (lam < 0.0) amax = std::min(amax, -1.0 / lam);
  }
  return amax;
}

}  // namespace detail

inline LmiSolution solve_lmi(const LmiProblem& lmi, const Eigen::VectorXd& c_in,
                             const SolveOptions& opts = {}) {
  const int nb = int(lmi.F0.size());
  const int m = int(c_in.size());
  LmiSolution sol;
  sol.u = Eigen::VectorXd::Zero(m);
  if (nb == 0 || m == 0) {
    sol.status = SolveStatus::optimal;
    for (const Eigen::MatrixXd& F : lmi.F0) sol.Z.push_back(F);
    return sol;
  }
  std::vector<int> dims;
  int ntot = 0;
  for (const Eigen::MatrixXd& F : lmi.F0) {
    dims.push_back(int(F.rows()));
    ntot += int(F.rows());
  }
  const double cnorm = std::max(1.0, c_in.cwiseAbs().maxCoeff());
  const Eigen::VectorXd c = c_in / cnorm;
  double scale = 1.0;
  for (const Eigen::MatrixXd& F : lmi.F0) scale = std::max(scale, F.cwiseAbs().maxCoeff());
  double xi_d = scale;
  for (const auto& Fq : lmi.Fq)
    for (const Eigen::MatrixXd& F : Fq) xi_d = std::max(xi_d, F.cwiseAbs().maxCoeff());

  std::vector<Eigen::MatrixXd> Xs, Zs;
  for (int d : dims) {
    Xs.push_back(Eigen::MatrixXd::Identity(d, d));
    Zs.push_back(xi_d * Eigen::MatrixXd::Identity(d, d));
  }
  Eigen::VectorXd& u = sol.u;

  double pobj = 0.0, dobj = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    sol.iters = it;
    // residuals at the current iterate
    std::vector<Eigen::MatrixXd> Rd(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      Eigen::MatrixXd Zu = lmi.F0[std::size_t(b)];
      for (int q = 0; q < m; ++q)
        if (u[q] != 0.0) Zu += u[q] * lmi.Fq[std::size_t(b)][std::size_t(q)];
      Rd[std::size_t(b)] = Zs[std::size_t(b)] - Zu;
    }
    Eigen::VectorXd rp = c;
    for (int b = 0; b < nb; ++b)
      for (int q = 0; q < m; ++q)
        rp[q] += lmi.Fq[std::size_t(b)][std::size_t(q)].cwiseProduct(Xs[std::size_t(b)]).sum();
    double mu = 0.0;
    pobj = c.dot(u);
    dobj = 0.0;
    for (int b = 0; b < nb; ++b) {
      mu += Xs[std::size_t(b)].cwiseProduct(Zs[std::size_t(b)]).sum();
      dobj += lmi.F0[std::size_t(b)].cwiseProduct(Xs[std::size_t(b)]).sum();
    }
    mu /= ntot;
    sol.mu = mu;
    sol.res_p = rp.cwiseAbs().maxCoeff();
    sol.res_d = 0.0;
    for (const Eigen::MatrixXd& R : Rd) sol.res_d = std::max(sol.res_d, R.cwiseAbs().maxCoeff());
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (mu < opts.tol && sol.res_p < opts.tol * (1.0 + std::abs(pobj)) &&
        sol.res_d < opts.tol * scale && gap < 100.0 * opts.tol) {
      sol.status = SolveStatus::optimal;
      break;
    }
    if (mu < 1e-13) {
      sol.status = (sol.res_p < 1e-6 && sol.res_d < 1e-6 * scale) ? SolveStatus::optimal
                                                                  : SolveStatus::iteration_limit;
      break;
    }

    // Nesterov-Todd scaling point W per block
    std::vector<Eigen::MatrixXd> Ws(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      const Eigen::MatrixXd Lx =
          Eigen::LLT<Eigen::MatrixXd>(Xs[std::size_t(b)]).matrixL();
      const Eigen::MatrixXd Lz =
          Eigen::LLT<Eigen::MatrixXd>(Zs[std::size_t(b)]).matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Lx,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::MatrixXd G =
          Lx * svd.matrixV() * svd.singularValues().cwiseSqrt().cwiseInverse().asDiagonal();
      Ws[std::size_t(b)] = G * G.transpose();
    }

    // Schur complement M_pq = sum_b tr(Fp W Fq W)
    std::vector<std::vector<Eigen::MatrixXd>> WFW(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      WFW[std::size_t(b)].resize(std::size_t(m));
      for (int q = 0; q < m; ++q)
        WFW[std::size_t(b)][std::size_t(q)] =
            Ws[std::size_t(b)] * lmi.Fq[std::size_t(b)][std::size_t(q)] * Ws[std::size_t(b)];
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int b = 0; b < nb; ++b)
      for (int p = 0; p < m; ++p) {
        for (int q = p; q < m; ++q) {
          const double v =
              lmi.Fq[std::size_t(b)][std::size_t(p)].cwiseProduct(WFW[std::size_t(b)][std::size_t(q)]).sum();
          M(p, q) += v;
          if (q != p) M(q, p) += v;
        }
      }
    const Eigen::MatrixXd Mridge =
        M + (1e-13 * M.trace() / m) * Eigen::MatrixXd::Identity(m, m);
    Eigen::LLT<Eigen::MatrixXd> Mllt(Mridge);

    std::vector<Eigen::MatrixXd> Zinv(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b)
      Zinv[std::size_t(b)] = Eigen::LLT<Eigen::MatrixXd>(Zs[std::size_t(b)])
                                 .solve(Eigen::MatrixXd::Identity(dims[std::size_t(b)],
                                                                  dims[std::size_t(b)]));

    const auto newton = [&](double sigmu, Eigen::VectorXd& du,
                            std::vector<Eigen::MatrixXd>& dX,
                            std::vector<Eigen::MatrixXd>& dZ) {
      std::vector<Eigen::MatrixXd> base(static_cast<std::size_t>(nb));
      Eigen::VectorXd rhs = rp;
      for (int b = 0; b < nb; ++b) {
        base[std::size_t(b)] = sigmu * Zinv[std::size_t(b)] - Xs[std::size_t(b)] +
                               Ws[std::size_t(b)] * Rd[std::size_t(b)] * Ws[std::size_t(b)];
        for (int q = 0; q < m; ++q)
          rhs[q] += lmi.Fq[std::size_t(b)][std::size_t(q)].cwiseProduct(base[std::size_t(b)]).sum();
      }
      du = Mllt.solve(rhs);
      dX.assign(std::size_t(nb), {});
      dZ.assign(std::size_t(nb), {});
      for (int b = 0; b < nb; ++b) {
        Eigen::MatrixXd dz = -Rd[std::size_t(b)];
        Eigen::MatrixXd dx = base[std::size_t(b)];
        for (int q = 0; q < m; ++q) {
          if (du[q] == 0.0) continue;
          dz += du[q] * lmi.Fq[std::size_t(b)][std::size_t(q)];
          dx -= du[q] * WFW[std::size_t(b)][std::size_t(q)];
        }
        dZ[std::size_t(b)] = std::move(dz);
        dX[std::size_t(b)] = (dx + dx.transpose()) / 2.0;
      }
    };

    // predictor step fixes the centering weight
    Eigen::VectorXd du_a;
    std::vector<Eigen::MatrixXd> dX_a, dZ_a;
    newton(0.0, du_a, dX_a, dZ_a);
    const double ap_a = 0.99 * detail::max_step(Xs, dX_a);
    const double ad_a = 0.99 * detail::max_step(Zs, dZ_a);
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b)
      mu_aff += (Xs[std::size_t(b)] + ap_a * dX_a[std::size_t(b)])
                    .cwiseProduct(Zs[std::size_t(b)] + ad_a * dZ_a[std::size_t(b)])
                    .sum();
    mu_aff /= ntot;
    double sigma = std::min(1.0, std::pow(std::max(0.0, mu_aff / mu), 3.0));
    if (std::min(ap_a, ad_a) < 0.2) sigma = std::max(sigma, 0.5);

    Eigen::VectorXd du;
    std::vector<Eigen::MatrixXd> dX, dZ;
    newton(sigma * mu, du, dX, dZ);
    double ap = std::min(1.0, 0.98 * detail::max_step(Xs, dX));
    double ad = std::min(1.0, 0.98 * detail::max_step(Zs, dZ));

    const auto stepped = [&](const std::vector<Eigen::MatrixXd>& Ms,
                             const std::vector<Eigen::MatrixXd>& dMs, double a) {
      std::vector<Eigen::MatrixXd> out(Ms.size());
      for (std::size_t b = 0; b < Ms.size(); ++b) out[b] = Ms[b] + a * dMs[b];
      return out;
    };
    for (int tries = 0; tries < 40 && !detail::all_posdef(stepped(Xs, dX, ap)); ++tries) ap *= 0.8;
    for (int tries = 0; tries < 40 && !detail::all_posdef(stepped(Zs, dZ, ad)); ++tries) ad *= 0.8;
    for (int b = 0; b < nb; ++b) {
      Xs[std::size_t(b)] += ap * dX[std::size_t(b)];
      Zs[std::size_t(b)] += ad * dZ[std::size_t(b)];
    }
    u += ad * du;
  }
  sol.pobj = cnorm * c.dot(u);
  sol.dobj = cnorm * dobj;
  sol.X = std::move(Xs);
  sol.Z = std::move(Zs);
  return sol;
}

namespace detail {

inline void fill_solution_point(Solution& out, const SdpInstance& inst,
                                const Canonicalization& cz, const Eigen::VectorXd& u_full) {
  const Eigen::VectorXd z = cz.h + cz.N * u_full;
  for (std::size_t q = 0; q < inst.variables.size(); ++q)
    out.x[inst.variables[q]] = z[cz.layout.var_col(int(q))];
  for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
    const int d = inst.blocks[b].second;
    Eigen::MatrixXd B(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) B(i, j) = B(j, i) = z[cz.layout.entry_col(int(b), i, j)];
    out.block_matrices.push_back(std::move(B));
  }
}

}  // namespace detail

// Phase-I margin threshold: feasible when the optimized lambda exceeds this.
inline constexpr double kFeasibilityMargin = 1e-7;

inline Solution solve(const SdpInstance& inst, const SolveOptions& opts = {}) {
  Solution out;
  Canonicalization cz = canonicalize(inst);
  if (!cz.consistent) {
    out.status = SolveStatus::infeasible_suspected;
    out.note = "equality system inconsistent";
    return out;
  }
  PresolveResult pr = presolve(cz.lmi, cz.cu);
  if (!pr.consistent) {
    out.status = SolveStatus::infeasible_suspected;
    out.note = "zero-diagonal row forces an unsatisfiable equality";
    return out;
  }

  const bool feasibility_mode = inst.objective.empty();
  if (feasibility_mode) {
    if (pr.lmi.F0.empty()) {
      out.status = SolveStatus::optimal;
      out.primal_value = 1.0;
      out.note = "all blocks eliminated; linear system consistent";
      detail::fill_solution_point(out, inst, cz, pr.haff);
      return out;
    }
    if (pr.lmi.nu == 0) {
      // The equalities pin every coordinate; feasibility is a point check.  The
      // margin reported is the smallest eigenvalue, which may legitimately be
      // zero when the unique point lies on the cone boundary.
      double mineig = std::numeric_limits<double>::infinity();
      for (const Eigen::MatrixXd& B : pr.lmi.F0)
        mineig = std::min(mineig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly)
                                      .eigenvalues()
                                      .minCoeff());
      out.primal_value = out.dual_value = mineig;
      out.status = mineig >= -1e-6 ? SolveStatus::optimal : SolveStatus::infeasible_suspected;
      out.note = out.status == SolveStatus::optimal
                     ? "all coordinates determined; point is positive semidefinite"
                     : "all coordinates determined; point violates positive semidefiniteness";
      detail::fill_solution_point(out, inst, cz, pr.haff);
      return out;
    }
    // maximize lambda s.t. Z(v) - lambda I >= 0, lambda <= 1
    const int m = pr.lmi.nu;
    LmiProblem ph;
    ph.nu = m + 1;
    for (std::size_t b = 0; b < pr.lmi.F0.size(); ++b) {
      ph.F0.push_back(pr.lmi.F0[b]);
      std::vector<Eigen::MatrixXd> Fq = pr.lmi.Fq[b];
      Fq.push_back(-Eigen::MatrixXd::Identity(pr.lmi.F0[b].rows(), pr.lmi.F0[b].cols()));
      ph.Fq.push_back(std::move(Fq));
    }
    ph.F0.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
    std::vector<Eigen::MatrixXd> cap(std::size_t(m + 1), Eigen::MatrixXd::Zero(1, 1));
    cap[std::size_t(m)](0, 0) = -1.0;
    ph.Fq.push_back(std::move(cap));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m + 1);
    c[m] = 1.0;

    LmiSolution r = solve_lmi(ph, c, opts);
    const double lambda = r.u[m];
    out.primal_value = lambda;
    out.dual_value = r.dobj;
    out.residuals = {r.res_p, r.res_d,
                     std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj))};
    out.iterations = r.iters;
    if (r.status == SolveStatus::optimal)
      out.status = lambda > kFeasibilityMargin ? SolveStatus::optimal
                                               : SolveStatus::infeasible_suspected;
    else
      out.status = r.status;
    out.note = lambda > kFeasibilityMargin ? "feasible (phase-I margin positive)"
                                           : "phase-I margin not positive";
    detail::fill_solution_point(out, inst, cz, pr.haff + pr.Naff * r.u.head(m));
    return out;
  }

  const double c0 = cz.c0 + cz.cu.dot(pr.haff);
  if (pr.cu.size() == 0 || pr.lmi.F0.empty()) {
    // the parametrization fixed the objective (and possibly every coordinate)
    out.primal_value = out.dual_value = c0;
    detail::fill_solution_point(out, inst, cz, pr.haff);
    double mineig = 0.0;
    for (const Eigen::MatrixXd& B : out.block_matrices)
      mineig = std::min(mineig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .minCoeff());
    out.status = mineig >= -1e-6 ? SolveStatus::optimal : SolveStatus::infeasible_suspected;
    if (out.status == SolveStatus::infeasible_suspected)
      out.note = "unique candidate point violates positive semidefiniteness";
    return out;
  }

  LmiSolution r = solve_lmi(pr.lmi, pr.cu, opts);
  out.status = r.status;
  out.primal_value = c0 + r.pobj;
  out.dual_value = c0 + r.dobj;
  out.residuals = {r.res_p, r.res_d,
                   std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj))};
  out.iterations = r.iters;
  detail::fill_solution_point(out, inst, cz, pr.haff + pr.Naff * r.u);
  return out;
}

}  // namespace paulisdp
