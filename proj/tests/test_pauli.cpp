#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "paulisdp/pauli.hpp"

using namespace paulisdp;

namespace {
// site k from the left in a spec string like "XIZ" maps to bit k
PauliString make(const std::string& sites) {
  PauliString p{int(sites.size()), 0, 0};
  for (std::size_t k = 0; k < sites.size(); ++k) {
    switch (sites[k]) {
      case 'I': break;
      case 'X': p.x_bits |= 1u << k; break;
      case 'Z': p.z_bits |= 1u << k; break;
      case 'Y': p.x_bits |= 1u << k; p.z_bits |= 1u << k; break;
      default: FAIL("bad site");
    }
  }
  return p;
}
}  // namespace

TEST_CASE("weight counts non-identity sites") {
  CHECK(weight(make("IIIIIII")) == 0);
  CHECK(weight(make("XIIIIII")) == 1);
  CHECK(weight(make("YZXIIII")) == 3);
}

TEST_CASE("product is sitewise XOR (phase-free)") {
  CHECK(product(make("X"), make("X")) == make("I"));
  CHECK(product(make("X"), make("Z")) == make("Y"));
  CHECK(product(make("XZ"), make("ZZ")) == make("YI"));
  CHECK_THROWS_AS(product(make("X"), make("XX")), std::invalid_argument);
}

TEST_CASE("anticommutes is the symplectic inner product mod 2") {
  CHECK(anticommutes(make("X"), make("Z")));
  CHECK_FALSE(anticommutes(make("XI"), make("IZ")));
  CHECK_FALSE(anticommutes(make("XX"), make("ZZ")));  // two anticommuting sites cancel
  CHECK_THROWS_AS(anticommutes(make("X"), make("XX")), std::invalid_argument);
}

TEST_CASE("enumerate_paulis order and guards") {
  const auto one = enumerate_paulis(1);
  REQUIRE(one.size() == 4);
  CHECK(one[0] == make("I"));
  CHECK(one[1] == make("X"));
  CHECK(one[2] == make("Z"));
  CHECK(one[3] == make("Y"));
  CHECK(enumerate_paulis(2).size() == 16);
  CHECK(enumerate_paulis(2)[0] == make("II"));
  CHECK(enumerate_paulis(7).size() == 16384);
  CHECK_THROWS_AS(enumerate_paulis(0), std::out_of_range);
  CHECK_THROWS_AS(enumerate_paulis(13), std::out_of_range);
}

TEST_CASE("orbit_key examples") {
  const OrbitKey k1 = orbit_key(make("XI"), make("IZ"));
  CHECK(k1 == OrbitKey{1, 1, 0, 0});
  const OrbitKey k2 = orbit_key(make("XI"), make("XI"));
  CHECK(k2 == OrbitKey{1, 1, 1, 1});
  const OrbitKey k3 = orbit_key(make("XX"), make("XZ"));
  CHECK(k3 == OrbitKey{2, 2, 2, 1});
}

TEST_CASE("orbit_key invariants on random pairs") {
  std::mt19937_64 rng(11);
  const auto all = enumerate_paulis(3);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const PauliString a = all[pick(rng)], b = all[pick(rng)];
    const OrbitKey k = orbit_key(a, b);
    CHECK(weight(product(a, b)) == k.i + k.j - k.t - k.p);
    CHECK(k.p >= 0);
    CHECK(k.p <= k.t);
    CHECK(k.t <= std::min(k.i, k.j));
    CHECK(k.i + k.j - k.t <= 3);
    CHECK(anticommutes(a, b) == anticommutes(b, a));
    CHECK_FALSE(anticommutes(a, a));
  }
}

TEST_CASE("t-p odd implies anticommutation, exhaustively for n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    const auto all = enumerate_paulis(n);
    for (const auto& a : all)
      for (const auto& b : all) {
        const OrbitKey k = orbit_key(a, b);
        if ((k.t - k.p) % 2 != 0) REQUIRE(anticommutes(a, b));
        // and conversely: anticommuting pairs have odd t-p
        if (anticommutes(a, b)) REQUIRE((k.t - k.p) % 2 != 0);
      }
  }
}

TEST_CASE("anti-commutativity graph construction") {
  const AnticommGraph tri = build_graph(1, 1);
  CHECK(tri.vertices.size() == 3);
  CHECK(tri.edges.size() == 3);

  const AnticommGraph g21 = build_graph(2, 1);
  CHECK(g21.vertices.size() == 15);
  CHECK(g21.edges.size() == 60);
  for (const auto& [u, v] : g21.edges) {
    CHECK(u < v);
    CHECK(anticommutes(g21.vertices[u], g21.vertices[v]));
  }

  CHECK(graph_vertex_count(7, 4) == 15228);
  CHECK(graph_vertices(7, 4).size() == 15228);
  CHECK(graph_vertex_count(2, 1) == 15);
  CHECK_THROWS_AS(build_graph(2, 3), std::out_of_range);
  CHECK_THROWS_AS(build_graph(2, 0), std::out_of_range);
}

TEST_CASE("edge-list export format") {
  std::ostringstream os;
  export_edge_list(1, 1, os);
  const std::string text = os.str();
  CHECK(text.substr(0, text.find('\n')) == "# n=1 delta=1 vertices=3");
  CHECK(text == "# n=1 delta=1 vertices=3\n0 1\n0 2\n1 2\n");
}
