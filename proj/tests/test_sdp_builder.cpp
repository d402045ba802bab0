#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "paulisdp/sdp_builder.hpp"

using namespace paulisdp;

namespace {
bool has_constraint(const SdpInstance& inst, const Constraint& want) {
  return std::find(inst.constraints.begin(), inst.constraints.end(), want) !=
         inst.constraints.end();
}

Constraint var_pin(const SdpInstance& inst, const std::string& name, double coeff, double rhs) {
  Constraint c;
  c.form.add_var(inst.find_variable(name), coeff);
  c.rhs = rhs;
  return c;
}
}  // namespace

TEST_CASE("bordered theta instance of the triangle") {
  const SdpInstance inst = build_theta(build_graph(1, 1));
  REQUIRE(inst.blocks.size() == 1);
  CHECK(inst.blocks[0] == std::pair<std::string, int>{"theta", 4});
  REQUIRE(inst.variables.size() == 3);
  CHECK(inst.objective == std::map<int, double>{{0, 1.0}, {1, 1.0}, {2, 1.0}});
  // corner + 3 border + 3 diagonal + 3 edges
  REQUIRE(inst.constraints.size() == 10);
  Constraint corner;
  corner.form.add_entry(0, 0, 0, 1.0);
  corner.rhs = 1.0;
  CHECK(has_constraint(inst, corner));
  Constraint border;
  border.form.add_entry(0, 0, 1, 1.0);
  border.form.add_var(0, -1.0);
  CHECK(has_constraint(inst, border));
  Constraint edge;  // vertices 0,1 anticommute in the triangle
  edge.form.add_entry(0, 1, 2, 1.0);
  CHECK(has_constraint(inst, edge));
  CHECK_NOTHROW(inst.validate());
}

TEST_CASE("theta layout helpers normalize entry references") {
  const GraphSdp layout = build_theta_layout(build_graph(1, 1));
  CHECK(layout.vertices == 3);
  CHECK(layout.corner() == EntryRef{0, 0, 0});
  CHECK(layout.border_entry(2) == EntryRef{0, 0, 3});
  CHECK(layout.body_entry(2, 0) == EntryRef{0, 1, 3});
  CHECK(layout.body_entry(0, 2) == EntryRef{0, 1, 3});
}

TEST_CASE("theta size guard") {
  AnticommGraph big;
  big.n = 12;
  big.delta = 12;
  big.vertices.assign(5001, PauliString{12, 0, 0});
  CHECK_THROWS_AS(build_theta(big), std::length_error);
  CHECK_NOTHROW(build_theta(big, /*export_only=*/true));
}

TEST_CASE("reduced theta instance at n=1") {
  const SdpInstance inst = build_theta_sym(1, 1);
  // classes (0,0,0,0),(1,0,0,0),(1,1,1,0),(1,1,1,1) after i<->j merging
  REQUIRE(inst.variables.size() == 4);
  CHECK(inst.variables[0] == "x_0_0_0_0");
  CHECK(inst.variables[1] == "x_1_0_0_0");
  CHECK(inst.variables[2] == "x_1_1_1_0");
  CHECK(inst.variables[3] == "x_1_1_1_1");
  REQUIRE(inst.blocks.size() == 2);
  CHECK(inst.blocks[0] == std::pair<std::string, int>{"Y_0_0", 2});
  CHECK(inst.blocks[1] == std::pair<std::string, int>{"Y_1_1", 1});
  CHECK(inst.objective == std::map<int, double>{{3, 3.0}});  // gamma^{1,1}_{1,1} = 3

  CHECK(has_constraint(inst, var_pin(inst, "x_0_0_0_0", 1.0, 1.0)));
  Constraint couple;
  couple.form.add_var(1, 1.0);
  couple.form.add_var(3, -1.0);
  CHECK(has_constraint(inst, couple));
  CHECK(has_constraint(inst, var_pin(inst, "x_1_1_1_0", 1.0, 0.0)));  // t-p odd

  // 1 + 1 + 1 structural plus 3 + 1 entry couplings
  REQUIRE(inst.constraints.size() == 7);
  for (int r = 0; r < 2; ++r)
    for (int c = r; c < 2; ++c) {
      Constraint tie;
      tie.form.add_entry(0, r, c, 1.0);
      detail::for_each_class_at(r, c, 1, [&](int t, int p) {
        OrbitKey key{std::max(r, c), std::min(r, c), t, p};
        tie.form.add_var(inst.find_variable(class_var_name(key)),
                         -alpha_coeff_double(r, c, t, p, 0, 0, 1));
      });
      CHECK(has_constraint(inst, tie));
    }
}

TEST_CASE("reduced theta instance at n=7, delta=4") {
  const SdpInstance inst = build_theta_sym(7, 4);
  const BlockIndexSet blocks = block_index_set(7);
  REQUIRE(inst.blocks.size() == blocks.blocks.size());
  long long entry_count = 0;
  for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
    CHECK(inst.blocks[b].second == blocks.blocks[b].dim);
    entry_count += blocks.blocks[b].dim * (blocks.blocks[b].dim + 1) / 2;
  }
  CHECK(entry_count == 200);  // sum of dim*(dim+1)/2 over the twenty blocks

  // merged variable count and pin count derived from the class list
  int canonical = 0, pins = 0;
  for (const OrbitKey& key : variable_index_set(7).keys) {
    if (key.i < key.j) continue;
    ++canonical;
    const bool odd = ((key.t - key.p) & 1) != 0;
    const bool below = (key.i > 0 && key.i < 4) || (key.j > 0 && key.j < 4);
    if (odd || below) ++pins;
  }
  CHECK(int(inst.variables.size()) == canonical);
  CHECK(inst.constraints.size() == std::size_t(1 + 7 + pins) + std::size_t(entry_count));
  CHECK(inst.objective.size() == 7);
  CHECK_NOTHROW(inst.validate());
}

TEST_CASE("reduced feasibility pins the diagonal sums") {
  const CorrelationTable tab = correlation_table(2);  // per-weight sums 1, 0, 3
  REQUIRE(to_double(tab.A[1]) == 0.0);
  REQUIRE(to_double(tab.A[2]) == 3.0);

  const SdpInstance inst = build_reduced_feasibility(2, tab);
  CHECK(inst.objective.empty());
  CHECK(has_constraint(inst, var_pin(inst, "x_1_1_1_1", 6.0, 0.0)));  // gamma = 3 C(2,1)
  CHECK(has_constraint(inst, var_pin(inst, "x_2_2_2_2", 9.0, 3.0)));  // gamma = 9 C(2,2)
  // the vanishing weight-1 sum forces every class touching weight 1 to zero
  CHECK(has_constraint(inst, var_pin(inst, "x_1_0_0_0", 1.0, 0.0)));
  CHECK(has_constraint(inst, var_pin(inst, "x_2_1_1_1", 1.0, 0.0)));
  CHECK(has_constraint(inst, var_pin(inst, "x_1_1_0_0", 1.0, 0.0)));
  CHECK_NOTHROW(inst.validate());

  CHECK_THROWS_AS(build_reduced_feasibility(3, tab), std::invalid_argument);
}

TEST_CASE("reduced feasibility total pin mode") {
  const CorrelationTable tab = correlation_table(2);
  const SdpInstance inst = build_reduced_feasibility(2, tab, std::nullopt, PinMode::total);
  Constraint total;
  total.form.add_var(inst.find_variable("x_1_1_1_1"), 6.0);
  total.form.add_var(inst.find_variable("x_2_2_2_2"), 9.0);
  total.rhs = 3.0;
  CHECK(has_constraint(inst, total));
  // no per-weight zero propagation in total mode
  CHECK(!has_constraint(inst, var_pin(inst, "x_1_0_0_0", 1.0, 0.0)));
}

TEST_CASE("reduced feasibility optional product-weight pins") {
  const CorrelationTable tab = correlation_table(3);
  const SdpInstance plain = build_reduced_feasibility(3, tab);
  const SdpInstance gapped = build_reduced_feasibility(3, tab, 2);
  CHECK(gapped.constraints.size() > plain.constraints.size());
  // class (3,2,2,2): even t-p, endpoints >= 2, but product weight 3+2-2-2 = 1 < 2,
  // so only the gapped variant pins it
  CHECK(!has_constraint(plain, var_pin(plain, "x_3_2_2_2", 1.0, 0.0)));
  CHECK(has_constraint(gapped, var_pin(gapped, "x_3_2_2_2", 1.0, 0.0)));
}

TEST_CASE("theta-body membership instance") {
  const SdpInstance inst = build_theta_body_feasibility(1, 1, 2.0);
  CHECK(inst.objective.empty());
  const Constraint& sum = inst.constraints.back();
  Constraint want;
  want.form.add_var(inst.find_variable("x_1_1_1_1"), 3.0);
  want.rhs = 1.0;  // target - 1
  CHECK(sum == want);
  CHECK_THROWS_AS(build_theta_body_feasibility(1, 1, 0.0), std::invalid_argument);
}

TEST_CASE("builder guards") {
  CHECK_THROWS_AS(build_theta_sym(0, 1), std::out_of_range);
  CHECK_THROWS_AS(build_theta_sym(3, 4), std::out_of_range);
  CHECK_THROWS_AS(build_theta_sym(11, 1), std::out_of_range);
}

TEST_CASE("all builder outputs round-trip through the sdpa format") {
  const CorrelationTable tab = correlation_table(2);
  const SdpInstance instances[] = {
      build_theta(build_graph(1, 1)),
      build_theta_sym(2, 1),
      build_reduced_feasibility(2, tab),
      build_reduced_feasibility(2, tab, 1, PinMode::total),
      build_theta_body_feasibility(1, 1, 1.5),
  };
  for (const SdpInstance& inst : instances) {
    std::ostringstream os;
    export_sdpa(inst, os);
    std::istringstream in(os.str());
    CHECK(parse_sdpa(in) == inst);
  }
}

TEST_CASE("exported bytes match the checked-in golden fixtures") {
  const auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto render = [](const SdpInstance& inst) {
    std::ostringstream os;
    export_sdpa(inst, os);
    return os.str();
  };
  const auto plain = [](int nv, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    AnticommGraph g;
    g.n = 1;
    g.delta = 1;
    g.vertices.assign(std::size_t(nv), PauliString{1, 0, 0});
    g.edges = std::move(edges);
    return g;
  };
  const std::string dir = std::string(PAULISDP_DATA_DIR) + "/";
  CHECK(render(build_theta(plain(2, {}))) == slurp(dir + "golden_theta_empty2.sdpa"));
  CHECK(render(build_theta(plain(3, {{0, 1}, {0, 2}, {1, 2}}))) ==
        slurp(dir + "golden_theta_k3.sdpa"));
}
