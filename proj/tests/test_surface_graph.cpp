#include <doctest.h>

#include <cmath>

#include "geosp/oracles.hpp"
#include "geosp/surface_graph.hpp"
#include "geosp/synthetic.hpp"
#include "test_support.hpp"

using namespace geosp;
using geosp::testing::close_relative;
using geosp::testing::path_graph;
using geosp::testing::random_mesh;

namespace {

double weight(const SurfaceGraph& g, VertexIndex u, VertexIndex v) {
  for (const auto& nb : g.neighbors(u)) {
    if (nb.vertex == v) return nb.weight;
  }
  return -1.0;
}

void check_graph_invariants(const SurfaceGraph& g) {
  for (VertexIndex u = 0; u < g.vertex_count(); ++u) {
    VertexIndex previous = 0;
    bool first = true;
    for (const auto& nb : g.neighbors(u)) {
      REQUIRE(nb.vertex != u);
      REQUIRE((first || nb.vertex > previous));
      REQUIRE(nb.weight > 0.0);
      REQUIRE(weight(g, nb.vertex, u) == nb.weight);
      const double euclid = distance(g.position(u), g.position(nb.vertex));
      REQUIRE((euclid == 0.0 ? nb.weight == kMinEdgeWeightMm
                             : close_relative(nb.weight, euclid, 1e-9)));
      previous = nb.vertex;
      first = false;
    }
  }
}

}  // namespace

TEST_CASE("build_graph on a unit right triangle") {
  const TriangleMesh mesh{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}};
  const auto g = build_graph(mesh);
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(weight(g, 0, 1) == 1.0);
  CHECK(weight(g, 0, 2) == 1.0);
  CHECK(weight(g, 1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("shared triangle edges are stored once") {
  const TriangleMesh mesh{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}},
                          {{0, 1, 2}, {1, 3, 2}}};
  CHECK(build_graph(mesh).edge_count() == 5);
}

TEST_CASE("grid edges match brute-force triangle edge enumeration") {
  auto mesh = make_grid(10, 10, 1.0);
  perturb_positions(mesh, 5, 0.4);
  const auto g = build_graph(mesh);
  const auto expected = oracle_mesh_edges(mesh);
  REQUIRE(g.edge_count() == expected.size());
  // 9 x 10 horizontal + 10 x 9 vertical + 9 x 9 diagonal
  CHECK(expected.size() == 261);
  for (const auto& e : g.edges()) {
    CHECK(expected.contains({e.u, e.v}));
    CHECK(weight(g, e.u, e.v) ==
          distance(mesh.vertices[e.u], mesh.vertices[e.v]));
  }
  check_graph_invariants(g);
}

TEST_CASE("coincident vertices get the minimum weight") {
  const TriangleMesh mesh{{{0, 0, 0}, {0, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}};
  const auto g = build_graph(mesh);
  CHECK(weight(g, 0, 1) == kMinEdgeWeightMm);
  check_graph_invariants(g);
}

TEST_CASE("from_edges rejects self-loops and merges duplicates") {
  std::vector<Vec3> pos = {{0, 0, 0}, {1, 0, 0}};
  const std::vector<Edge> loop = {{1, 1}};
  CHECK_THROWS_AS(SurfaceGraph::from_edges(pos, loop), std::invalid_argument);
  const std::vector<Edge> dup = {{0, 1}, {1, 0}, {0, 1}};
  CHECK(SurfaceGraph::from_edges(pos, dup).edge_count() == 1);
}

TEST_CASE("graph invariants hold on random meshes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    check_graph_invariants(build_graph(random_mesh(seed, 400)));
  }
}

TEST_CASE("extract_region_subgraph") {
  const auto mesh = make_grid(6, 5, 1.0);
  const auto g = build_graph(mesh);

  SUBCASE("uniform labels give the whole graph") {
    VertexLabels labels{std::vector<Label>(mesh.vertex_count(), 7)};
    const auto sub = extract_region_subgraph(g, labels, 7);
    CHECK(sub.graph.vertex_count() == g.vertex_count());
    CHECK(sub.graph.edge_count() == g.edge_count());
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      CHECK(sub.to_global[v] == v);
    }
  }
  SUBCASE("single-vertex region") {
    VertexLabels labels{std::vector<Label>(mesh.vertex_count(), 0)};
    labels.labels[13] = 4;
    const auto sub = extract_region_subgraph(g, labels, 4);
    CHECK(sub.graph.vertex_count() == 1);
    CHECK(sub.graph.edge_count() == 0);
    CHECK(sub.to_global == std::vector<VertexIndex>{13});
  }
  SUBCASE("checkerboard matches a brute-force edge filter") {
    VertexLabels labels;
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t i = 0; i < 6; ++i) {
        labels.labels.push_back(static_cast<Label>((i + j) % 2));
      }
    }
    for (Label region : {0u, 1u}) {
      const auto sub = extract_region_subgraph(g, labels, region);
      std::set<std::pair<VertexIndex, VertexIndex>> expected;
      for (const auto& e : g.edges()) {
        if (labels[e.u] == region && labels[e.v] == region) {
          expected.insert({e.u, e.v});
        }
      }
      std::set<std::pair<VertexIndex, VertexIndex>> got;
      for (const auto& e : sub.graph.edges()) {
        got.insert({sub.to_global[e.u], sub.to_global[e.v]});
        CHECK(weight(sub.graph, e.u, e.v) ==
              weight(g, sub.to_global[e.u], sub.to_global[e.v]));
      }
      CHECK(got == expected);
      // Only the diagonals connect same-colored cells.
      CHECK(!expected.empty());
    }
  }
  SUBCASE("absent region") {
    VertexLabels labels{std::vector<Label>(mesh.vertex_count(), 0)};
    CHECK_THROWS_AS(extract_region_subgraph(g, labels, 3), std::invalid_argument);
  }
}

TEST_CASE("sssp on a path") {
  const auto g = path_graph(3);
  const auto f = sssp(g, 0);
  CHECK(f.dist == std::vector<double>{0, 1, 2});
  CHECK(f.nearest_source(2) == 0);
  CHECK_THROWS_AS(sssp(g, 3), std::out_of_range);
}

TEST_CASE("sssp marks other components unreachable") {
  std::vector<Vec3> pos = {{0, 0, 0}, {1, 0, 0}, {5, 0, 0}, {6, 0, 0}};
  const std::vector<Edge> edges = {{0, 1}, {2, 3}};
  const auto g = SurfaceGraph::from_edges(pos, edges);
  const auto f = sssp(g, 1);
  CHECK(f.dist[0] == 1.0);
  CHECK(!f.reachable(2));
  CHECK(!f.reachable(3));
  CHECK(f.nearest_slot[3] == kNoSource);
}

TEST_CASE("sssp agrees with Bellman-Ford on random meshes") {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const auto g = build_graph(random_mesh(seed, 100));
    Rng rng(seed);
    const auto source = uniform_index(rng, g.vertex_count());
    const auto fast = sssp(g, source);
    const auto slow = oracle_sssp(g, source);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      REQUIRE(close_relative(fast.dist[v], slow.dist[v], 1e-9));
    }
  }
}

TEST_CASE("multi_source_sssp") {
  SUBCASE("one source equals sssp") {
    const auto g = build_graph(random_mesh(3, 150));
    const VertexIndex sources[] = {5};
    const auto multi = multi_source_sssp(g, sources);
    const auto single = sssp(g, 5);
    CHECK(multi.dist == single.dist);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      if (multi.reachable(v)) CHECK(multi.nearest_source(v) == 5);
    }
  }
  SUBCASE("equidistant vertex goes to the first listed source") {
    const auto g = path_graph(5);
    const VertexIndex sources[] = {0, 4};
    const auto f = multi_source_sssp(g, sources);
    CHECK(f.dist[2] == 2.0);
    CHECK(f.nearest_source(2) == 0);
    CHECK(f.nearest_slot == std::vector<std::size_t>{0, 0, 0, 1, 1});
    const VertexIndex reversed[] = {4, 0};
    CHECK(multi_source_sssp(g, reversed).nearest_source(2) == 4);
  }
  SUBCASE("three sources match per-source runs") {
    for (std::uint64_t seed = 200; seed < 210; ++seed) {
      const auto g = build_graph(random_mesh(seed, 300));
      if (g.vertex_count() < 3) continue;
      Rng rng(seed);
      std::vector<VertexIndex> sources;
      while (sources.size() < 3) {
        const auto s = uniform_index(rng, g.vertex_count());
        if (std::find(sources.begin(), sources.end(), s) == sources.end()) {
          sources.push_back(s);
        }
      }
      const auto multi = multi_source_sssp(g, sources);
      std::vector<DistanceField> each;
      for (auto s : sources) each.push_back(sssp(g, s));
      for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        double best = kUnreachable;
        std::size_t slot = kNoSource;
        for (std::size_t i = 0; i < 3; ++i) {
          if (each[i].dist[v] < best) {
            best = each[i].dist[v];
            slot = i;
          }
        }
        REQUIRE(close_relative(multi.dist[v], best, 1e-9));
        REQUIRE(multi.nearest_slot[v] == slot);
      }
    }
  }
  SUBCASE("invalid source lists") {
    const auto g = path_graph(3);
    CHECK_THROWS_AS(multi_source_sssp(g, std::vector<VertexIndex>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(multi_source_sssp(g, std::vector<VertexIndex>{1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(multi_source_sssp(g, std::vector<VertexIndex>{0, 9}),
                    std::out_of_range);
  }
}

TEST_CASE("apsp") {
  SUBCASE("single vertex") {
    const auto g = SurfaceGraph::from_edges({{1, 2, 3}}, std::vector<Edge>{});
    const auto d = apsp(g);
    CHECK(d.size() == 1);
    CHECK(d.at(0, 0) == 0.0);
  }
  SUBCASE("right triangle") {
    const TriangleMesh mesh{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}};
    const auto d = apsp(build_graph(mesh));
    CHECK(d.at(0, 1) == 1.0);
    CHECK(d.at(0, 2) == 1.0);
    CHECK(d.at(1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(d.at(2, 1) == d.at(1, 2));
  }
  SUBCASE("matches repeated sssp") {
    for (std::uint64_t seed = 300; seed < 306; ++seed) {
      const auto g = build_graph(random_mesh(seed, 80));
      const auto d = apsp(g);
      for (VertexIndex u = 0; u < g.vertex_count(); ++u) {
        const auto f = sssp(g, u);
        REQUIRE(d.at(u, u) == 0.0);
        for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
          REQUIRE(close_relative(d.at(u, v), f.dist[v], 1e-9));
          REQUIRE(d.at(u, v) == d.at(v, u));
        }
      }
    }
  }
  SUBCASE("cap") {
    CHECK_THROWS_AS(apsp(path_graph(10), 9), std::length_error);
    CHECK_NOTHROW(apsp(path_graph(10), 10));
  }
}

TEST_CASE("shortest-path properties on random meshes") {
  for (std::uint64_t seed = 400; seed < 410; ++seed) {
    const auto g = build_graph(random_mesh(seed, 200));
    Rng rng(seed);
    const auto n = g.vertex_count();
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = uniform_index(rng, n);
      const auto b = uniform_index(rng, n);
      const auto fa = sssp(g, a);
      const auto fb = sssp(g, b);
      // symmetry
      REQUIRE(close_relative(fa.dist[b], fb.dist[a], 1e-9));
      // relaxation closure and geodesic >= euclidean
      for (VertexIndex u = 0; u < n; ++u) {
        for (const auto& nb : g.neighbors(u)) {
          REQUIRE(fa.dist[nb.vertex] <= fa.dist[u] + nb.weight);
        }
        if (fa.reachable(u)) {
          REQUIRE(fa.dist[u] >=
                  distance(g.position(a), g.position(u)) * (1 - 1e-12));
        }
      }
    }
  }
}

TEST_CASE("connected_components") {
  std::vector<Vec3> pos(5);
  const std::vector<Edge> edges = {{0, 2}, {3, 4}};
  const auto g = SurfaceGraph::from_edges(pos, edges);
  CHECK(connected_components(g) == std::vector<std::size_t>{0, 1, 0, 3, 3});
}

TEST_CASE("write_distance_field uses 'inf' for unreachable vertices") {
  geosp::testing::TempDir dir;
  std::vector<Vec3> pos = {{0, 0, 0}, {1.5, 0, 0}, {9, 0, 0}};
  const std::vector<Edge> edges = {{0, 1}};
  write_distance_field(dir / "d.txt", sssp(SurfaceGraph::from_edges(pos, edges), 0));
  CHECK(geosp::testing::slurp(dir / "d.txt") ==
        "0.000000000\n1.500000000\ninf\n");
}
