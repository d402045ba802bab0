#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "paulisdp/sdp_instance.hpp"

using namespace paulisdp;

namespace {
SdpInstance tiny_instance() {
  // max x0 + 2*x1  s.t.  B0[0][0] - x0 = 0,  B0[0][1] + B1[0][0] = 1/3,  x1 = 5
  SdpInstance inst;
  inst.metadata = "tiny hand-built example";
  inst.add_block("alpha", 2);
  inst.add_block("beta", 1);
  const int x0 = inst.add_variable("x0");
  const int x1 = inst.add_variable("x1");
  inst.objective[x0] = 1.0;
  inst.objective[x1] = 2.0;
  Constraint c1;
  c1.form.add_entry(0, 0, 0, 1.0);
  c1.form.add_var(x0, -1.0);
  inst.constraints.push_back(c1);
  Constraint c2;
  c2.form.add_entry(0, 0, 1, 1.0);
  c2.form.add_entry(1, 0, 0, 1.0);
  c2.rhs = 1.0 / 3.0;
  inst.constraints.push_back(c2);
  Constraint c3;
  c3.form.add_var(x1, 1.0);
  c3.rhs = 5.0;
  inst.constraints.push_back(c3);
  return inst;
}
}  // namespace

TEST_CASE("linear forms merge and drop cancelling terms") {
  LinearForm f;
  f.add_var(0, 1.5);
  f.add_var(0, 0.5);
  CHECK(f.vars.at(0) == 2.0);
  f.add_var(0, -2.0);
  CHECK(f.vars.empty());
  f.add_entry(0, 1, 0, 3.0);  // normalized to (0,1)
  CHECK(f.entries.at({0, 0, 1}) == 3.0);
  f.add_entry(0, 0, 1, -3.0);
  CHECK(f.entries.empty());
  f.add_var(2, 0.0);
  CHECK(f.vars.empty());
}

TEST_CASE("instance validation rejects bad entry references") {
  SdpInstance inst = tiny_instance();
  CHECK_NOTHROW(inst.validate());
  Constraint bad;
  bad.form.add_entry(5, 0, 0, 1.0);
  inst.constraints.push_back(bad);
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst.constraints.pop_back();
  Constraint oob;
  oob.form.add_entry(0, 1, 2, 1.0);  // dim 2: j out of range
  inst.constraints.push_back(oob);
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}

TEST_CASE("sdpa export layout") {
  const SdpInstance inst = tiny_instance();
  std::ostringstream os;
  export_sdpa(inst, os);
  const std::string text = os.str();
  CHECK(text.find("* qsdp v1") == 0);
  CHECK(text.find("* vars x0 x1") != std::string::npos);
  CHECK(text.find("* block 1 alpha 2") != std::string::npos);
  CHECK(text.find("* scalarblocks 3 4") != std::string::npos);
  CHECK(text.find("\n3\n4\n2 1 -2 -2\n") != std::string::npos);  // m, nblocks, dims
  // off-diagonal coefficient is halved in the file
  CHECK(text.find("2 1 1 2 0.5") != std::string::npos);
  // scalar terms appear mirrored in the split diagonal blocks
  CHECK(text.find("0 3 1 1 1\n0 4 1 1 -1") != std::string::npos);
}

TEST_CASE("exports are deterministic and round-trip exactly") {
  const SdpInstance inst = tiny_instance();
  std::ostringstream a, b;
  export_sdpa(inst, a);
  export_sdpa(inst, b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  const SdpInstance back = parse_sdpa(in);
  CHECK(back == inst);
}

TEST_CASE("round-trip survives awkward coefficients") {
  SdpInstance inst;
  inst.metadata = "irrational-ish coefficients";
  inst.add_block("b", 3);
  const int q = inst.add_variable("t");
  inst.objective[q] = 0.1;  // not exactly representable; %.17g must round-trip
  Constraint c;
  c.form.add_entry(0, 0, 2, 1.0 / 3.0);
  c.form.add_entry(0, 1, 1, -7.25e-13);
  c.form.add_var(q, 3.0000000000000004);
  c.rhs = 1e300;
  inst.constraints.push_back(c);
  std::ostringstream os;
  export_sdpa(inst, os);
  std::istringstream in(os.str());
  CHECK(parse_sdpa(in) == inst);
}

TEST_CASE("instances without scalar variables omit the split blocks") {
  SdpInstance inst;
  inst.metadata = "pure feasibility";
  inst.add_block("only", 2);
  Constraint c;
  c.form.add_entry(0, 0, 0, 1.0);
  c.rhs = 1.0;
  inst.constraints.push_back(c);
  std::ostringstream os;
  export_sdpa(inst, os);
  CHECK(os.str().find("* scalarblocks 0 0") != std::string::npos);
  CHECK(os.str().find("\n1\n1\n2\n") != std::string::npos);
  std::istringstream in(os.str());
  CHECK(parse_sdpa(in) == inst);
}

TEST_CASE("foreign sdpa files gain a synthesized objective variable") {
  // classic toy file: 2 constraints, one 2x2 block plus one diagonal block
  const std::string text =
      "\" hand-written example\n"
      "2\n"
      "2\n"
      "{2, -1}\n"
      "10.0 20.0\n"
      "0 1 1 1 1.0\n"
      "0 1 1 2 2.0\n"
      "1 1 1 1 1.0\n"
      "1 2 1 1 1.0\n"
      "2 1 2 2 1.0\n";
  std::istringstream in(text);
  const SdpInstance inst = parse_sdpa(in);
  REQUIRE(inst.blocks.size() == 2);
  CHECK(inst.blocks[0] == std::pair<std::string, int>{"psd1", 2});
  CHECK(inst.blocks[1] == std::pair<std::string, int>{"diag2", 1});
  REQUIRE(inst.variables.size() == 1);
  CHECK(inst.variables[0] == "objective");
  CHECK(inst.objective.at(0) == 1.0);
  REQUIRE(inst.constraints.size() == 3);  // two from the file + the objective tie
  CHECK(inst.constraints[0].rhs == 10.0);
  CHECK(inst.constraints[0].form.entries.at({0, 0, 0}) == 1.0);
  CHECK(inst.constraints[0].form.entries.at({1, 0, 0}) == 1.0);
  // off-diagonal objective coefficient doubled back into the linear form
  CHECK(inst.constraints[2].form.entries.at({0, 0, 1}) == -4.0);
  CHECK(inst.constraints[2].form.vars.at(0) == 1.0);
}

TEST_CASE("truncated files are rejected") {
  std::istringstream in("2\n1\n");
  CHECK_THROWS_AS(parse_sdpa(in), std::runtime_error);
}
