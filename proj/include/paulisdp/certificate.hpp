#pragma once
// Exact verification of dual infeasibility certificates over Q(sqrt(3)).
//
// A certificate file bundles one exact symmetric matrix per symmetry-reduced
// block.  The verifier reconstructs the per-class dual values y^{t,p}_{i,j}
// from the blocks, checks every block for positive semidefiniteness, checks
// the linear dual constraints, and evaluates the dual objective — all in
// exact arithmetic.  An exactly feasible dual point with strictly positive
// objective proves the corresponding primal problem infeasible, so a `valid`
// report is a machine-checked infeasibility proof, not a numeric indication.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paulisdp/correlations.hpp"
#include "paulisdp/exact_psd.hpp"
#include "paulisdp/quadfield.hpp"
#include "paulisdp/terwilliger.hpp"

namespace paulisdp {

enum class CertificateKind { entanglement_dual, lovasz_dual };

inline const char* to_string(CertificateKind k) {
  return k == CertificateKind::entanglement_dual ? "entanglement_dual" : "lovasz_dual";
}

struct DualCertificate {
  CertificateKind kind = CertificateKind::entanglement_dual;
  int n = 0;
  int delta = 0;
  // (a,k) -> full symmetric matrix; the file stores only the upper triangle.
  std::map<std::pair<int, int>, ExactSymMatrix> blocks;
};

// Policy predicate: which dual classes must vanish.  Classes with a zero
// weight (i = 0 or j = 0) multiply free border rows, diagonal classes
// (i = j = t = p) multiply the pinned diagonal, and odd-parity classes
// (t - p odd) pair with primal variables that are themselves pinned to zero —
// all of these stay free.  Everything else must be exactly zero.
inline bool dual_zero_required(const OrbitKey& key) {
  if (key.i == 0 || key.j == 0) return false;
  if ((key.t - key.p) & 1) return false;
  if (key.i == key.j && key.j == key.t && key.t == key.p) return false;
  return true;
}

inline DualCertificate parse_certificate(std::istream& in) {
  // Comment-strip and tokenize; entries may wrap lines freely.
  std::vector<std::string> toks;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) toks.push_back(t);
  }
  std::size_t pos = 0;
  const auto next = [&](const char* what) -> const std::string& {
    if (pos >= toks.size())
      throw std::runtime_error(std::string("certificate truncated; expected ") + what);
    return toks[pos++];
  };
  const auto keyval = [&](const std::string& tok, const std::string& key) -> std::string {
    if (tok.rfind(key + "=", 0) != 0)
      throw std::runtime_error("certificate header: expected `" + key + "=...`, got `" + tok +
                               "`");
    return tok.substr(key.size() + 1);
  };

  DualCertificate cert;
  const std::string kind = keyval(next("kind"), "kind");
  if (kind == "entanglement_dual")
    cert.kind = CertificateKind::entanglement_dual;
  else if (kind == "lovasz_dual")
    cert.kind = CertificateKind::lovasz_dual;
  else
    throw std::runtime_error("certificate header: unknown kind `" + kind + "`");
  cert.n = std::stoi(keyval(next("n"), "n"));
  cert.delta = std::stoi(keyval(next("delta"), "delta"));
  if (cert.n < 1 || cert.n > 12)
    throw std::runtime_error("certificate header: n out of range");

  std::map<std::pair<int, int>, int> expected;
  for (const BlockIndex& b : block_index_set(cert.n).blocks) expected[{b.a, b.k}] = b.dim;

  while (pos < toks.size()) {
    if (next("`block`") != "block")
      throw std::runtime_error("certificate body: expected `block a k dim`");
    const int a = std::stoi(next("block row index a"));
    const int k = std::stoi(next("block column index k"));
    const int dim = std::stoi(next("block dimension"));
    const auto it = expected.find({a, k});
    if (it == expected.end())
      throw std::runtime_error("certificate body: block (" + std::to_string(a) + "," +
                               std::to_string(k) + ") does not exist at n=" +
                               std::to_string(cert.n));
    if (it->second != dim)
      throw std::runtime_error("certificate body: block (" + std::to_string(a) + "," +
                               std::to_string(k) + ") must have dimension " +
                               std::to_string(it->second) + ", file says " +
                               std::to_string(dim));
    if (cert.blocks.count({a, k}))
      throw std::runtime_error("certificate body: duplicate block (" + std::to_string(a) +
                               "," + std::to_string(k) + ")");
    ExactSymMatrix M(std::size_t(dim), std::vector<QuadExt>(std::size_t(dim), QuadExt(0)));
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const std::string& tok = next("matrix entry");
        QuadExt v;
        try {
          v = parse_quadext(tok);
        } catch (const std::exception& e) {
          throw std::runtime_error("certificate body: bad entry `" + tok + "` in block (" +
                                   std::to_string(a) + "," + std::to_string(k) +
                                   "): " + e.what());
        }
        M[std::size_t(i)][std::size_t(j)] = v;
        M[std::size_t(j)][std::size_t(i)] = v;
      }
    cert.blocks[{a, k}] = std::move(M);
  }
  for (const auto& [ak, dim] : expected)
    if (!cert.blocks.count(ak))
      throw std::runtime_error("certificate body: missing block (" +
                               std::to_string(ak.first) + "," + std::to_string(ak.second) +
                               ")");
  return cert;
}

inline DualCertificate parse_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open certificate file: " + path);
  return parse_certificate(in);
}

struct BlockVerdict {
  int a = 0, k = 0;
  bool accepted = false;
  std::string witness;  // rejection detail from the exact PSD check
};

struct VerificationReport {
  std::vector<BlockVerdict> psd_results;           // in block index order
  std::map<OrbitKey, QuadExt> constraint_residuals;  // exact values required to vanish
  QuadExt objective;
  std::optional<QuadExt> recovered_w;  // lovasz_dual only
  bool valid = false;
  std::string reason;  // first failing item when invalid; empty when valid
};

namespace detail {

// Shared first phase of both verifications: exact PSD check per block and the
// vanishing constraints on the reconstructed dual values.
inline std::map<OrbitKey, QuadExt> verify_common(const DualCertificate& cert,
                                                 VerificationReport& rep) {
  for (const BlockIndex& b : block_index_set(cert.n).blocks) {
    const PsdCheckResult r = is_psd_exact(cert.blocks.at({b.a, b.k}));
    rep.psd_results.push_back({b.a, b.k, r.accepted, r.witness});
    if (!r.accepted && rep.reason.empty())
      rep.reason = "block (" + std::to_string(b.a) + "," + std::to_string(b.k) +
                   ") is not positive semidefinite: " + r.witness;
  }
  std::map<OrbitKey, QuadExt> y = dual_y_values(cert.blocks, cert.n);
  for (const OrbitKey& key : variable_index_set(cert.n).keys) {
    if (!dual_zero_required(key)) continue;
    const QuadExt& v = y.at(key);
    rep.constraint_residuals[key] = v;
    if (!is_zero(v) && rep.reason.empty())
      rep.reason = "dual value for class (" + std::to_string(key.i) + "," +
                   std::to_string(key.j) + "," + std::to_string(key.t) + "," +
                   std::to_string(key.p) + ") must vanish but equals " + to_string(v);
  }
  return y;
}

}  // namespace detail

// Checks that the certificate is an exactly feasible dual point with strictly
// positive objective for the prescribed-diagonal feasibility problem whose
// per-weight diagonal sums are table.A.  Objective:
//   -y^{0,0}_{0,0} - Sum_{i=1..n} (2 y^{0,0}_{i,0} + y^{i,i}_{i,i}) A_i.
inline VerificationReport verify_entanglement_dual(const DualCertificate& cert,
                                                   const CorrelationTable& table) {
  if (cert.kind != CertificateKind::entanglement_dual)
    throw std::invalid_argument("verify_entanglement_dual: certificate kind mismatch");
  if (table.n != cert.n)
    throw std::invalid_argument("verify_entanglement_dual: table size mismatch");
  VerificationReport rep;
  const std::map<OrbitKey, QuadExt> y = detail::verify_common(cert, rep);
  QuadExt obj = -y.at({0, 0, 0, 0});
  for (int i = 1; i <= cert.n; ++i) {
    const QuadExt coeff = y.at({i, 0, 0, 0}) * QuadExt(Rational(2)) + y.at({i, i, i, i});
    obj -= coeff * QuadExt(table.A[std::size_t(i)]);
  }
  rep.objective = obj;
  if (qsign(obj) != 1 && rep.reason.empty())
    rep.reason = "objective " + to_string(obj) + " is not strictly positive";
  rep.valid = rep.reason.empty();
  return rep;
}

// Checks that the certificate proves the independence-bound feasibility primal
// (value pinned to 2^n - 1 + 1 = 2^n) infeasible.  The row multiplier w is
// recovered from the weight-delta constraint
//   y^{i,i}_{i,i} + 2 y^{0,0}_{i,0} + w = 0,   i in [delta, n],
// must be consistent across the whole range, and the objective
//   (2^n - 1) w - y^{0,0}_{0,0}
// must be strictly positive.
inline VerificationReport verify_lovasz_dual(const DualCertificate& cert) {
  if (cert.kind != CertificateKind::lovasz_dual)
    throw std::invalid_argument("verify_lovasz_dual: certificate kind mismatch");
  VerificationReport rep;
  const std::map<OrbitKey, QuadExt> y = detail::verify_common(cert, rep);
  const auto relation = [&](int i) {
    return y.at({i, i, i, i}) + QuadExt(Rational(2)) * y.at({i, 0, 0, 0});
  };
  const QuadExt w = -relation(cert.delta);
  rep.recovered_w = w;
  for (int i = cert.delta; i <= cert.n; ++i) {
    const QuadExt resid = relation(i) + w;
    rep.constraint_residuals[{i, i, i, i}] = resid;
    if (!is_zero(resid) && rep.reason.empty())
      rep.reason = "row multiplier from weight " + std::to_string(i) + " disagrees: " +
                   to_string(-relation(i)) + " vs " + to_string(w);
  }
  rep.objective = QuadExt(rational_pow(2, cert.n) - 1) * w - y.at({0, 0, 0, 0});
  if (qsign(rep.objective) != 1 && rep.reason.empty())
    rep.reason = "objective " + to_string(rep.objective) + " is not strictly positive";
  rep.valid = rep.reason.empty();
  return rep;
}

}  // namespace paulisdp
