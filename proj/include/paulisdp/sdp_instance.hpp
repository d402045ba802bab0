#pragma once

// Solver-neutral container for block-diagonal SDPs with free scalar variables,
// plus a deterministic SDPA sparse (".dat-s") writer and parser.
//
// Model (maximization):
//   maximize    sum_q c_q x_q
//   subject to  for each constraint:  sum_q a_q x_q + sum_(b,i,j) g_{bij} B_b[i][j] = rhs
//               every block B_b positive semidefinite, x free scalars.
//
// SDPA encoding (documented in the file header): the file's dual problem
//   max tr(F_0 Y)  s.t.  tr(F_c Y) = rhs_c,  Y >= 0 block-diagonal
// represents the instance with Y = diag(PSD blocks..., D+, D-) where the two
// trailing diagonal blocks carry the scalars as x_q = D+[q][q] - D-[q][q].
// Off-diagonal block-entry coefficients are halved in the file (exact in
// binary) because the trace picks up both symmetric positions. Header
// comments record variable names, block labels, and the scalar block indices,
// so parsing a file we wrote reconstructs the instance exactly.

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace paulisdp {

struct EntryRef {
  int block = 0;  // index into SdpInstance::blocks
  int i = 0;      // row, 0-based, i <= j
  int j = 0;
  auto operator<=>(const EntryRef&) const = default;
};

// Sparse linear form over scalar variables (by index) and block entries.
struct LinearForm {
  std::map<int, double> vars;
  std::map<EntryRef, double> entries;
  bool operator==(const LinearForm&) const = default;

  void add_var(int q, double coeff) {
    if (coeff == 0.0) return;
    if ((vars[q] += coeff) == 0.0) vars.erase(q);
  }
  void add_entry(int block, int i, int j, double coeff) {
    if (coeff == 0.0) return;
    if (i > j) std::swap(i, j);
    const EntryRef ref{block, i, j};
    if ((entries[ref] += coeff) == 0.0) entries.erase(ref);
  }
};

struct Constraint {
  LinearForm form;
  double rhs = 0.0;  // relation is always equality
  bool operator==(const Constraint&) const = default;
};

struct SdpInstance {
  std::vector<std::pair<std::string, int>> blocks;  // (label, dim)
  std::vector<std::string> variables;               // ordered scalar names
  std::map<int, double> objective;                  // variable index -> coefficient (maximize)
  std::vector<Constraint> constraints;
  std::string metadata;

  bool operator==(const SdpInstance&) const = default;

  int add_block(const std::string& label, int dim) {
    blocks.emplace_back(label, dim);
    return int(blocks.size()) - 1;
  }
  int add_variable(const std::string& name) {
    variables.push_back(name);
    return int(variables.size()) - 1;
  }
  int find_variable(const std::string& name) const {
    for (std::size_t q = 0; q < variables.size(); ++q)
      if (variables[q] == name) return int(q);
    return -1;
  }
  void validate() const {
    for (const Constraint& c : constraints)
      for (const auto& [ref, coeff] : c.form.entries) {
        if (ref.block < 0 || std::size_t(ref.block) >= blocks.size())
          throw std::invalid_argument("SdpInstance: entry references unknown block");
        const int dim = blocks[std::size_t(ref.block)].second;
        if (ref.i < 0 || ref.i > ref.j || ref.j >= dim)
          throw std::invalid_argument("SdpInstance: entry indices out of range");
      }
  }
};

namespace detail {
inline std::string fmt_double(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data());
}
}  // namespace detail

inline void export_sdpa(const SdpInstance& inst, std::ostream& os) {
  inst.validate();
  const int npsd = int(inst.blocks.size());
  const int nvars = int(inst.variables.size());
  const bool scalars = nvars > 0;
  const int bplus = npsd + 1, bminus = npsd + 2;  // 1-based SDPA block numbers

  os << "* qsdp v1\n";
  os << "* meta " << inst.metadata << "\n";
  os << "* vars";
  for (const std::string& name : inst.variables) os << " " << name;
  os << "\n";
  for (int b = 0; b < npsd; ++b)
    os << "* block " << (b + 1) << " " << inst.blocks[std::size_t(b)].first << " "
       << inst.blocks[std::size_t(b)].second << "\n";
  os << "* scalarblocks " << (scalars ? bplus : 0) << " " << (scalars ? bminus : 0) << "\n";
  os << "* objconst 0\n";

  os << inst.constraints.size() << "\n";
  os << (npsd + (scalars ? 2 : 0)) << "\n";
  for (int b = 0; b < npsd; ++b)
    os << (b ? " " : "") << inst.blocks[std::size_t(b)].second;
  if (scalars) os << (npsd ? " " : "") << -nvars << " " << -nvars;
  os << "\n";
  for (std::size_t c = 0; c < inst.constraints.size(); ++c)
    os << (c ? " " : "") << detail::fmt_double(inst.constraints[c].rhs);
  os << "\n";

  const auto emit_form = [&](int matno, const std::map<int, double>& vars,
                             const std::map<EntryRef, double>& entries) {
    for (const auto& [ref, coeff] : entries) {
      const double v = ref.i == ref.j ? coeff : coeff / 2.0;
      os << matno << " " << (ref.block + 1) << " " << (ref.i + 1) << " " << (ref.j + 1) << " "
         << detail::fmt_double(v) << "\n";
    }
    for (const auto& [q, coeff] : vars) {
      os << matno << " " << bplus << " " << (q + 1) << " " << (q + 1) << " "
         << detail::fmt_double(coeff) << "\n";
      os << matno << " " << bminus << " " << (q + 1) << " " << (q + 1) << " "
         << detail::fmt_double(-coeff) << "\n";
    }
  };
  emit_form(0, inst.objective, {});
  for (std::size_t c = 0; c < inst.constraints.size(); ++c)
    emit_form(int(c) + 1, inst.constraints[c].form.vars, inst.constraints[c].form.entries);
}

inline void export_sdpa(const SdpInstance& inst, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("export_sdpa: cannot open " + path);
  export_sdpa(inst, os);
  if (!os) throw std::runtime_error("export_sdpa: write failed for " + path);
}

// Parses SDPA sparse files. Files carrying our header comments round-trip to
// the exact original instance; foreign files are represented faithfully by
// treating every block as a PSD block and introducing one scalar variable
// "objective" pinned to tr(F_0 Y) so the objective map stays scalar.
inline SdpInstance parse_sdpa(std::istream& is) {
  SdpInstance inst;
  bool own_format = false;
  int bplus = 0, bminus = 0;
  std::map<int, std::pair<std::string, int>> block_comments;

  std::string line;
  std::vector<std::string> body_tokens;
  bool in_body = false;
  while (std::getline(is, line)) {
    if (!in_body && (line.empty() || line[0] == '*' || line[0] == '"')) {
      std::istringstream ls(line);
      std::string star, tag;
      ls >> star >> tag;
      if (tag == "qsdp") own_format = true;
      if (tag == "meta") {
        std::string rest;
        std::getline(ls, rest);
        inst.metadata = rest.empty() ? rest : rest.substr(1);
      }
      if (tag == "vars") {
        std::string name;
        while (ls >> name) inst.variables.push_back(name);
      }
      if (tag == "block") {
        int idx = 0, dim = 0;
        std::string label;
        ls >> idx >> label >> dim;
        block_comments[idx] = {label, dim};
      }
      if (tag == "scalarblocks") ls >> bplus >> bminus;
      continue;
    }
    in_body = true;
    for (char& ch : line)
      if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) body_tokens.push_back(tok);
  }

  std::size_t pos = 0;
  const auto next_int = [&]() {
    if (pos >= body_tokens.size()) throw std::runtime_error("parse_sdpa: truncated file");
    return std::stoi(body_tokens[pos++]);
  };
  const auto next_double = [&]() {
    if (pos >= body_tokens.size()) throw std::runtime_error("parse_sdpa: truncated file");
    return std::stod(body_tokens[pos++]);
  };

  const int m = next_int();
  const int nblocks = next_int();
  std::vector<int> dims(static_cast<std::size_t>(nblocks));
  for (int b = 0; b < nblocks; ++b) dims[std::size_t(b)] = next_int();
  std::vector<double> rhs(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) rhs[std::size_t(c)] = next_double();

  if (own_format) {
    for (const auto& [idx, lab] : block_comments) {
      if (idx != int(inst.blocks.size()) + 1 || std::abs(dims[std::size_t(idx - 1)]) != lab.second)
        throw std::runtime_error("parse_sdpa: block comments disagree with dimension line");
      inst.blocks.emplace_back(lab.first, lab.second);
    }
  } else {
    for (int b = 0; b < nblocks; ++b)
      inst.blocks.emplace_back((dims[std::size_t(b)] < 0 ? "diag" : "psd") + std::to_string(b + 1),
                               std::abs(dims[std::size_t(b)]));
  }
  inst.constraints.assign(std::size_t(m), Constraint{});
  for (int c = 0; c < m; ++c) inst.constraints[std::size_t(c)].rhs = rhs[std::size_t(c)];

  LinearForm foreign_objective;
  while (pos < body_tokens.size()) {
    const int matno = next_int();
    const int blk = next_int();
    const int fi = next_int() - 1;
    const int fj = next_int() - 1;
    const double val = next_double();
    if (matno < 0 || matno > m) throw std::runtime_error("parse_sdpa: bad matrix number");
    if (own_format && (blk == bplus || blk == bminus)) {
      if (blk == bminus) continue;  // mirror of the D+ entry
      if (fi != fj) throw std::runtime_error("parse_sdpa: off-diagonal scalar entry");
      if (val == 0.0) continue;
      if (matno == 0)
        inst.objective[fi] = val;
      else
        inst.constraints[std::size_t(matno - 1)].form.vars[fi] = val;
      continue;
    }
    const double coeff = fi == fj ? val : 2.0 * val;
    if (matno == 0) {
      if (own_format) throw std::runtime_error("parse_sdpa: objective touches a PSD block");
      foreign_objective.add_entry(blk - 1, fi, fj, coeff);
    } else {
      inst.constraints[std::size_t(matno - 1)].form.add_entry(blk - 1, fi, fj, coeff);
    }
  }
  if (!own_format) {
    const int q = inst.add_variable("objective");
    inst.objective[q] = 1.0;
    Constraint tie;
    tie.form.add_var(q, 1.0);
    for (const auto& [ref, coeff] : foreign_objective.entries) tie.form.add_entry(ref.block, ref.i, ref.j, -coeff);
    tie.rhs = 0.0;
    inst.constraints.push_back(std::move(tie));
    inst.metadata = "foreign sdpa file";
  }
  inst.validate();
  return inst;
}

inline SdpInstance parse_sdpa(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("parse_sdpa: cannot open " + path);
  return parse_sdpa(is);
}

}  // namespace paulisdp
