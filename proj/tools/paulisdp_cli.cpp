// Command-line front end for the anticommutativity-graph SDP pipeline.
//
// Subcommands: graph, correlations, oracle, build, solve, verify-cert,
// reproduce.  Every subcommand prints human-readable text by default and a
// JSON document with --json; exit codes are the scripting interface (0 on
// success / valid, 1 on failure / invalid).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paulisdp/certificate.hpp"
#include "paulisdp/correlations.hpp"
#include "paulisdp/moment_oracle.hpp"
#include "paulisdp/pauli.hpp"
#include "paulisdp/sdp_builder.hpp"
#include "paulisdp/sdp_instance.hpp"
#include "paulisdp/solver.hpp"
#include "paulisdp/terwilliger.hpp"

using nlohmann::json;
using namespace paulisdp;

namespace {

#ifndef PAULISDP_DATA_DIR
#define PAULISDP_DATA_DIR "data"
#endif

struct GlobalOpts {
  unsigned long seed = 1;
  bool as_json = false;
  std::string out;       // redirect primary output when nonempty
  std::string data_dir = PAULISDP_DATA_DIR;
};

// Primary output goes to --out when given, stdout otherwise.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw CLI::ValidationError("--out", "cannot open " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- graph ----

int cmd_graph(const GlobalOpts& g, int n, int delta, bool count_only) {
  OutputTarget target(g.out);
  std::ostream& os = target.stream();
  if (count_only) {
    const std::size_t v = graph_vertex_count(n, delta);
    if (g.as_json) {
      os << json{{"n", n}, {"delta", delta}, {"vertices", v}}.dump(2) << "\n";
    } else {
      os << "n=" << n << " delta=" << delta << " vertices=" << v << "\n";
    }
    return 0;
  }
  // The full edge list can be large (tens of millions of lines at n=7), so it
  // is streamed rather than buffered; --json still gets the plain text format.
  export_edge_list(n, delta, os);
  return 0;
}

// --------------------------------------------------------- correlations ----

int cmd_correlations(const GlobalOpts& g, int n) {
  OutputTarget target(g.out);
  std::ostream& os = target.stream();
  const CorrelationTable t = correlation_table(n);
  Rational total(0);
  for (const Rational& v : t.A) total += v;
  if (g.as_json) {
    json ja = json::array(), jd = json::array();
    for (int i = 0; i <= n; ++i) {
      ja.push_back(to_string(t.A[std::size_t(i)]));
      jd.push_back(to_string(t.a[std::size_t(i)]));
    }
    os << json{{"n", n},
               {"weight_sums", ja},
               {"diagonal_values", jd},
               {"total", to_string(total)}}
              .dump(2)
       << "\n";
    return 0;
  }
  os << "per-weight correlation table, n=" << n << "\n";
  for (int i = 0; i <= n; ++i)
    os << "  i=" << i << "  A=" << to_string(t.A[std::size_t(i)])
       << "  a=" << to_string(t.a[std::size_t(i)]) << "\n";
  os << "  sum A = " << to_string(total) << "\n";
  return 0;
}

// ---------------------------------------------------------------- oracle ----

int cmd_oracle(const GlobalOpts& g, int n, int trials) {
  OutputTarget target(g.out);
  std::ostream& os = target.stream();
  int failures = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Ensemble e = random_ensemble(n, g.seed + static_cast<unsigned long>(t));
    const MomentMatrix G = build_gamma(e);
    const ConstraintReport rep = check_gamma_constraints(G, e);
    worst = std::max(worst, rep.max_violation());
    bool ok = rep.passes(1e-10, 1e-9);
    // chain into the symmetry-reduced form: class averages must assemble into
    // positive semidefinite blocks
    std::vector<std::vector<double>> re(G.entries.rows(),
                                        std::vector<double>(G.entries.cols()));
    for (Eigen::Index a = 0; a < G.entries.rows(); ++a)
      for (Eigen::Index b = 0; b < G.entries.cols(); ++b)
        re[std::size_t(a)][std::size_t(b)] = G.entries(a, b).real();
    for (const Eigen::MatrixXd& B : assemble_blocks_double(symmetrize_small(re, n), n)) {
      const double mineig =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      if (mineig < -1e-9) ok = false;
    }
    if (!ok) {
      ++failures;
      os << "trial " << t << " FAILED (max violation " << rep.max_violation() << ")\n";
    }
  }
  if (g.as_json) {
    os << json{{"n", n},
               {"seed", g.seed},
               {"trials", trials},
               {"failures", failures},
               {"worst_violation", worst},
               {"all_passed", failures == 0}}
              .dump(2)
       << "\n";
  } else if (failures == 0) {
    os << "all checks passed (" << trials << " random ensembles, n=" << n
       << ", worst violation " << worst << ")\n";
  } else {
    os << failures << "/" << trials << " ensembles failed\n";
  }
  return failures == 0 ? 0 : 1;
}

// ----------------------------------------------------------------- build ----

SdpInstance build_named(const std::string& problem, int n, int delta, double target,
                        bool export_only = false) {
  if (problem == "theta") return build_theta(build_graph(n, delta), export_only);
  if (problem == "theta-sym") return build_theta_sym(n, delta);
  if (problem == "feasibility")
    return build_reduced_feasibility(n, correlation_table(n), delta > 0
                                                                 ? std::optional<int>(delta)
                                                                 : std::nullopt);
  if (problem == "theta-body") return build_theta_body_feasibility(n, delta, target);
  throw CLI::ValidationError("--problem", "unknown problem " + problem);
}

int cmd_build(const GlobalOpts& g, const std::string& problem, int n, int delta,
              double target) {
  // export-only relaxes the size guard: huge direct instances may be written
  // out for external solvers even when the bundled solver would refuse them
  const SdpInstance inst = build_named(problem, n, delta, target, true);
  if (!g.out.empty()) {
    export_sdpa(inst, g.out);
    if (g.as_json) {
      std::cout << json{{"problem", problem},
                        {"variables", inst.variables.size()},
                        {"constraints", inst.constraints.size()},
                        {"blocks", inst.blocks.size()},
                        {"out", g.out}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "wrote " << g.out << " (" << inst.variables.size() << " variables, "
                << inst.constraints.size() << " constraints, " << inst.blocks.size()
                << " blocks)\n";
    }
    return 0;
  }
  export_sdpa(inst, std::cout);
  return 0;
}

// ----------------------------------------------------------------- solve ----

int cmd_solve(const GlobalOpts& g, const std::string& problem, int n, int delta,
              double target, const std::string& sdpa_path) {
  OutputTarget out(g.out);
  std::ostream& os = out.stream();
  os << std::setprecision(10);
  SdpInstance inst =
      sdpa_path.empty() ? build_named(problem, n, delta, target) : parse_sdpa(sdpa_path);
  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = solve(inst);
  const double secs = seconds_since(t0);
  const bool feasibility = inst.objective.empty();
  if (g.as_json) {
    json j{{"status", to_string(sol.status)},
           {"iterations", sol.iterations},
           {"seconds", secs},
           {"note", sol.note}};
    if (feasibility)
      j["margin"] = sol.primal_value;
    else {
      j["value"] = sol.primal_value;
      j["dual_value"] = sol.dual_value;
    }
    os << j.dump(2) << "\n";
  } else {
    os << "status      " << to_string(sol.status) << "\n";
    if (feasibility)
      os << "margin      " << sol.primal_value << "\n";
    else
      os << "value       " << sol.primal_value << "\n"
         << "dual value  " << sol.dual_value << "\n";
    os << "iterations  " << sol.iterations << "\n"
       << "time        " << secs << " s\n";
    if (!sol.note.empty()) os << "note        " << sol.note << "\n";
  }
  return sol.status == SolveStatus::iteration_limit ? 1 : 0;
}

// ----------------------------------------------------------- verify-cert ----

json report_json(const DualCertificate& cert, const VerificationReport& rep) {
  json blocks = json::array();
  for (const BlockVerdict& b : rep.psd_results)
    blocks.push_back({{"a", b.a}, {"k", b.k}, {"accepted", b.accepted}});
  json residuals = json::array();
  for (const auto& [key, v] : rep.constraint_residuals)
    residuals.push_back({{"class", {key.i, key.j, key.t, key.p}},
                         {"value", to_string(v)},
                         {"zero", is_zero(v)}});
  json j{{"kind", to_string(cert.kind)},
         {"n", cert.n},
         {"delta", cert.delta},
         {"psd_blocks", blocks},
         {"residuals", residuals},
         {"objective", to_string(rep.objective)},
         {"valid", rep.valid}};
  if (rep.recovered_w) j["recovered_w"] = to_string(*rep.recovered_w);
  if (!rep.valid) j["reason"] = rep.reason;
  return j;
}

int cmd_verify_cert(const GlobalOpts& g, const std::string& path,
                    const std::string& table_spec) {
  OutputTarget out(g.out);
  std::ostream& os = out.stream();
  const DualCertificate cert = parse_certificate(path);
  VerificationReport rep;
  if (cert.kind == CertificateKind::entanglement_dual) {
    int table_n = cert.n;
    if (!table_spec.empty()) {
      if (table_spec.rfind("n=", 0) != 0)
        throw CLI::ValidationError("--table", "expected n=<int>");
      table_n = std::stoi(table_spec.substr(2));
    }
    rep = verify_entanglement_dual(cert, correlation_table(table_n));
  } else {
    rep = verify_lovasz_dual(cert);
  }
  if (g.as_json) {
    os << report_json(cert, rep).dump(2) << "\n";
    return rep.valid ? 0 : 1;
  }
  os << "certificate " << path << "\n"
     << "kind        " << to_string(cert.kind) << "  n=" << cert.n
     << "  delta=" << cert.delta << "\n";
  int rejected = 0;
  for (const BlockVerdict& b : rep.psd_results)
    if (!b.accepted) {
      ++rejected;
      os << "  block (" << b.a << "," << b.k << ") NOT positive semidefinite: " << b.witness
         << "\n";
    }
  os << "psd blocks  " << (rep.psd_results.size() - std::size_t(rejected)) << "/"
     << rep.psd_results.size() << " accepted (exact elimination)\n";
  int nonzero = 0;
  for (const auto& [key, v] : rep.constraint_residuals)
    if (!is_zero(v)) ++nonzero;
  os << "residuals   " << rep.constraint_residuals.size() - std::size_t(nonzero) << "/"
     << rep.constraint_residuals.size() << " exactly zero\n";
  if (rep.recovered_w) os << "multiplier  w = " << to_string(*rep.recovered_w) << "\n";
  os << "objective   " << to_string(rep.objective) << "\n";
  if (rep.valid)
    os << "VALID: exact dual point with positive objective (infeasibility proven)\n";
  else
    os << "INVALID: " << rep.reason << "\n";
  return rep.valid ? 0 : 1;
}

// ------------------------------------------------------------- reproduce ----

int cmd_reproduce(const GlobalOpts& g) {
  OutputTarget out(g.out);
  std::ostream& os = out.stream();
  os << std::setprecision(10);
  const auto t0 = std::chrono::steady_clock::now();
  const auto stage_failed = [&](const std::string& stage) {
    os << "STAGE FAILED: " << stage << "\n";
    return 1;
  };

  os << "[1/5] per-weight correlation table (n=7)\n";
  const CorrelationTable table = correlation_table(7);
  for (int i = 0; i <= 7; ++i)
    os << "      i=" << i << "  A=" << to_string(table.A[std::size_t(i)])
       << "  a=" << to_string(table.a[std::size_t(i)]) << "\n";
  Rational total(0);
  for (const Rational& v : table.A) total += v;
  os << "      sum A = " << to_string(total) << "\n";
  if (total != Rational(128)) return stage_failed("correlation table total");

  os << "[2/5] anticommutativity graph, n=7 delta=4\n";
  const std::size_t nverts = graph_vertex_count(7, 4);
  os << "      vertices " << nverts << "\n";
  if (nverts != 15228) return stage_failed("graph vertex count");

  os << "[3/5] symmetry-reduced independence bound (numeric)\n";
  const Solution sol = solve(build_theta_sym(7, 4));
  os << "      value " << sol.primal_value << "  (" << sol.iterations << " iterations, "
     << seconds_since(t0) << " s elapsed)\n";
  if (sol.status != SolveStatus::optimal || std::abs(sol.primal_value - 126.8876) > 1e-3)
    return stage_failed("reduced independence bound");
  os << "      witness gap " << witness_gap(sol.primal_value) << " (negative: the witness "
     << "bound exceeds the relaxation value)\n";
  if (witness_gap(sol.primal_value) >= 0) return stage_failed("witness gap sign");

  os << "[4/5] exact dual certificate: prescribed-diagonal problem infeasible\n";
  const DualCertificate ent =
      parse_certificate(g.data_dir + "/cert_entanglement.qcert");
  const VerificationReport rent = verify_entanglement_dual(ent, table);
  os << "      objective " << to_string(rent.objective) << "  valid="
     << (rent.valid ? "yes" : "no") << "\n";
  if (!rent.valid || rent.objective != QuadExt(Rational(1)))
    return stage_failed("prescribed-diagonal certificate");

  os << "[5/5] exact dual certificate: independence bound below 128\n";
  const DualCertificate lov = parse_certificate(g.data_dir + "/cert_lovasz.qcert");
  const VerificationReport rlov = verify_lovasz_dual(lov);
  os << "      objective " << to_string(rlov.objective) << "  valid="
     << (rlov.valid ? "yes" : "no") << "\n";
  if (!rlov.valid) return stage_failed("independence-bound certificate");

  os << "total time " << seconds_since(t0) << " s\n";
  os << "PHI_E8: ENTANGLED (exact certificate verified)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli anticommutativity graphs, their symmetry-reduced SDP bounds, and "
               "exact dual certificates"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for randomized subcommands");
  app.add_flag("--json", g.as_json, "emit JSON instead of human-readable text");
  app.add_option("--out", g.out, "write primary output to this file");
  app.add_option("--data-dir", g.data_dir, "directory holding bundled data files");

  int n = 7, delta = 4, trials = 25;
  bool count_only = false;
  double target = 128.0;
  std::string problem = "theta-sym", sdpa_path, cert_path, table_spec;

  CLI::App* graph = app.add_subcommand("graph", "enumerate an anticommutativity graph");
  graph->add_option("--n", n, "number of tensor factors")->required()->check(CLI::Range(1, 12));
  graph->add_option("--delta", delta, "minimum vertex weight")->check(CLI::Range(0, 12));
  graph->add_flag("--count-only", count_only, "print the vertex count only");

  CLI::App* corr = app.add_subcommand("correlations", "print the per-weight moment table");
  corr->add_option("--n", n, "number of tensor factors")->required()->check(CLI::Range(1, 16));

  CLI::App* oracle = app.add_subcommand(
      "oracle", "check random product ensembles against the moment-matrix constraints");
  oracle->add_option("--n", n, "number of tensor factors")->required()->check(CLI::Range(1, 3));
  oracle->add_option("--trials", trials, "number of random ensembles")->check(CLI::PositiveNumber);

  const auto add_problem_opts = [&](CLI::App* cmd, bool with_sdpa) {
    cmd->add_option("--problem", problem,
                    "one of theta, theta-sym, feasibility, theta-body");
    cmd->add_option("--n", n, "number of tensor factors")->check(CLI::Range(1, 12));
    cmd->add_option("--delta", delta, "minimum vertex weight")->check(CLI::Range(0, 12));
    cmd->add_option("--target", target, "pinned total for theta-body");
    if (with_sdpa) cmd->add_option("--sdpa", sdpa_path, "solve this SDPA file instead");
  };
  CLI::App* build = app.add_subcommand("build", "emit an SDP instance in SDPA format");
  add_problem_opts(build, false);
  CLI::App* solve_cmd = app.add_subcommand("solve", "build (or read) and solve an SDP");
  add_problem_opts(solve_cmd, true);

  CLI::App* vc = app.add_subcommand("verify-cert", "exactly verify a dual certificate");
  vc->add_option("certificate", cert_path, "path to a .qcert file")->required();
  vc->add_option("--table", table_spec, "correlation table selector, e.g. n=7");

  CLI::App* rep = app.add_subcommand(
      "reproduce", "full chain: tables, graph, numeric bound, exact certificates");

  // global flags (--seed, --json, --out, --data-dir) may appear after the
  // subcommand name
  for (CLI::App* s : {graph, corr, oracle, build, solve_cmd, vc, rep}) s->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (graph->parsed()) return cmd_graph(g, n, delta, count_only);
    if (corr->parsed()) return cmd_correlations(g, n);
    if (oracle->parsed()) return cmd_oracle(g, n, trials);
    if (build->parsed()) return cmd_build(g, problem, n, delta, target);
    if (solve_cmd->parsed()) return cmd_solve(g, problem, n, delta, target, sdpa_path);
    if (vc->parsed()) return cmd_verify_cert(g, cert_path, table_spec);
    if (rep->parsed()) return cmd_reproduce(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
