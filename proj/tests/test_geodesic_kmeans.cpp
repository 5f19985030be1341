#include <doctest.h>

#include <numeric>
#include <set>

#include "geosp/geodesic_kmeans.hpp"
#include "geosp/oracles.hpp"
#include "geosp/synthetic.hpp"
#include "test_support.hpp"

using namespace geosp;
using geosp::testing::bridged_triangles;
using geosp::testing::close_relative;
using geosp::testing::path_graph;
using geosp::testing::random_mesh;

namespace {

SurfaceGraph perturbed_grid(std::size_t nx, std::size_t ny, std::uint64_t seed) {
  auto mesh = make_grid(nx, ny, 1.0);
  perturb_positions(mesh, seed, 2.5e-7);
  return build_graph(mesh);
}

// Row sums over the component of `anchor` from one Dijkstra run per member.
VertexIndex repeated_dijkstra_medoid(const SurfaceGraph& graph,
                                     const std::vector<VertexIndex>& members,
                                     VertexIndex anchor) {
  const auto sub = induced_subgraph(graph, members);
  const auto local_anchor = static_cast<std::size_t>(
      std::find(members.begin(), members.end(), anchor) - members.begin());
  const auto reach = sssp(sub, local_anchor);
  std::size_t best = local_anchor;
  double best_sum = kUnreachable;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!reach.reachable(i)) continue;
    const auto f = sssp(sub, i);
    double s = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (reach.reachable(j)) s += f.dist[j];
    }
    if (s < best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return members[best];
}

// Random connected cluster grown breadth-first from a random vertex.
std::vector<VertexIndex> grow_cluster(const SurfaceGraph& g, Rng& rng,
                                      std::size_t size) {
  std::vector<char> in(g.vertex_count(), 0);
  std::vector<VertexIndex> frontier{uniform_index(rng, g.vertex_count())};
  std::vector<VertexIndex> members;
  in[frontier[0]] = 1;
  while (!frontier.empty() && members.size() < size) {
    const auto pick = uniform_index(rng, frontier.size());
    const auto v = frontier[pick];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));
    members.push_back(v);
    for (const auto& nb : g.neighbors(v)) {
      if (!in[nb.vertex]) {
        in[nb.vertex] = 1;
        frontier.push_back(nb.vertex);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

TEST_CASE("KmeansConfig validation") {
  KmeansConfig config;
  CHECK_NOTHROW(validate(config));
  CHECK(config.max_iterations == 20);
  CHECK(config.convergence_tolerance_mm == 2.0);
  config.k = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config = {};
  config.max_iterations = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config = {};
  config.convergence_tolerance_mm = 0.0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
}

TEST_CASE("portable random draws") {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng;
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ull);
  Rng a(11), b(11);
  for (int i = 0; i < 100; ++i) {
    const auto x = uniform_index(a, 7);
    CHECK(x < 7);
    CHECK(x == uniform_index(b, 7));
    const auto u = uniform_unit(a);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == uniform_unit(b));
  }
}

TEST_CASE("kmeanspp_init") {
  const auto g = perturbed_grid(10, 10, 1);

  SUBCASE("k = 1 picks one reproducible vertex") {
    const auto first = kmeanspp_init(g, 1, 42);
    REQUIRE(first.size() == 1);
    CHECK(first == kmeanspp_init(g, 1, 42));
    // Frozen: depends only on the mt19937_64 bit stream.
    CHECK(first[0] == 6);
    std::set<VertexIndex> spread;
    for (std::uint64_t s = 0; s < 200; ++s) spread.insert(kmeanspp_init(g, 1, s)[0]);
    CHECK(spread.size() > 50);
  }
  SUBCASE("k = |V| returns every vertex") {
    const auto small = perturbed_grid(4, 3, 2);
    auto all = kmeanspp_init(small, 12, 9);
    std::sort(all.begin(), all.end());
    std::vector<VertexIndex> expected(12);
    std::iota(expected.begin(), expected.end(), VertexIndex{0});
    CHECK(all == expected);
  }
  SUBCASE("k above the vertex count") {
    CHECK_THROWS_AS(kmeanspp_init(g, 101, 0), std::invalid_argument);
  }
  SUBCASE("centroids are distinct and deterministic") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto c = kmeanspp_init(g, 8, s);
      CHECK(std::set<VertexIndex>(c.begin(), c.end()).size() == 8);
      CHECK(c == kmeanspp_init(g, 8, s));
    }
  }
  SUBCASE("unreachable vertices stay selectable") {
    std::vector<Vec3> pos = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
                             {50, 0, 0}, {51, 0, 0}, {50, 1, 0}};
    const std::vector<Edge> edges = {{0, 1}, {1, 2}, {2, 0},
                                     {3, 4}, {4, 5}, {5, 3}};
    const auto split = SurfaceGraph::from_edges(pos, edges);
    int spanning = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto c = kmeanspp_init(split, 2, s);
      spanning += (c[0] < 3) != (c[1] < 3);
    }
    // Other-component vertices weigh (1 + 1)^2 = 4 against at most 2 for
    // the own component's two remaining vertices: P(span) = 12/14.
    CHECK(spanning > 150);
    CHECK(spanning < 200);
  }
}

TEST_CASE("kmeanspp on a dumbbell separates the blobs") {
  MeshSpec spec;
  spec.kind = MeshKind::dumbbell;
  spec.nx = 6;
  spec.ny = 6;
  spec.gap_mm = 30.0;
  const auto data = make_mesh(spec);
  const auto g = build_graph(data.mesh);
  const auto half = data.mesh.vertex_count() / 2;

  // Exact probability from the D^2 rule with Bellman-Ford distances.
  double exact = 0.0;
  const auto n = g.vertex_count();
  for (VertexIndex first = 0; first < n; ++first) {
    const auto d = oracle_sssp(g, first).dist;
    double total = 0.0, other = 0.0;
    for (VertexIndex v = 0; v < n; ++v) {
      total += d[v] * d[v];
      if ((v < half) != (first < half)) other += d[v] * d[v];
    }
    exact += other / total / static_cast<double>(n);
  }
  CHECK(exact >= 0.95);

  int separated = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    const auto c = kmeanspp_init(g, 2, static_cast<std::uint64_t>(s));
    separated += (c[0] < half) != (c[1] < half);
  }
  const double rate = separated / static_cast<double>(seeds);
  CHECK(rate >= 0.95);
  // Within five binomial standard errors of the exact value.
  CHECK(std::abs(rate - exact) <= 5.0 * std::sqrt(exact * (1 - exact) / seeds) + 1e-3);
}

TEST_CASE("calc_groups") {
  SUBCASE("single centroid") {
    const auto g = perturbed_grid(5, 5, 3);
    const VertexIndex c[] = {7};
    const auto groups = calc_groups(g, c);
    CHECK(std::all_of(groups.cluster.begin(), groups.cluster.end(),
                      [](auto x) { return x == 0; }));
    CHECK(groups.euclidean_fallbacks == 0);
  }
  SUBCASE("path tie goes to the first centroid") {
    const VertexIndex c[] = {0, 4};
    CHECK(calc_groups(path_graph(5), c).cluster ==
          std::vector<std::size_t>{0, 0, 0, 1, 1});
  }
  SUBCASE("matches brute-force argmin over per-centroid fields") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto g = perturbed_grid(20, 10, seed);
      const auto centroids = kmeanspp_init(g, 5, seed);
      const auto groups = calc_groups(g, centroids);
      std::vector<DistanceField> fields;
      for (auto c : centroids) fields.push_back(sssp(g, c));
      for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < centroids.size(); ++c) {
          if (fields[c].dist[v] < fields[best].dist[v]) best = c;
        }
        REQUIRE(groups.cluster[v] == best);
      }
    }
  }
  SUBCASE("unreachable vertices fall back to Euclidean assignment") {
    std::vector<Vec3> pos = {{0, 0, 0}, {1, 0, 0}, {10, 0, 0}, {2, 0, 0}};
    const std::vector<Edge> edges = {{0, 1}};
    const auto g = SurfaceGraph::from_edges(pos, edges);
    const VertexIndex c[] = {0, 1};
    const auto groups = calc_groups(g, c);
    // vertex 2 is isolated and closer to centroid 1 in space;
    // vertex 3 is isolated too.
    CHECK(groups.cluster == std::vector<std::size_t>{0, 1, 1, 1});
    CHECK(groups.euclidean_fallbacks == 2);
  }
}

TEST_CASE("cluster medoids") {
  SUBCASE("symmetric path") {
    const auto g = path_graph(3);
    CHECK(cluster_medoid(g, std::vector<VertexIndex>{0, 1, 2}, 0) == 1);
  }
  SUBCASE("singleton") {
    const auto g = path_graph(4);
    CHECK(cluster_medoid(g, std::vector<VertexIndex>{2}, 2) == 2);
  }
  SUBCASE("even path breaks the tie toward the smaller index") {
    const auto g = path_graph(4);
    CHECK(cluster_medoid(g, std::vector<VertexIndex>{0, 1, 2, 3}, 3) == 1);
  }
  SUBCASE("disconnected cluster uses the previous centroid's component") {
    // cluster {0,1,2} and {4,5}; 3 is not a member
    const auto g = path_graph(6);
    const std::vector<VertexIndex> members = {0, 1, 2, 4, 5};
    CHECK(cluster_medoid(g, members, 0) == 1);
    CHECK(cluster_medoid(g, members, 5) == 4);
    CHECK(cluster_medoid(g, members, 5, 0) == 4);
    CHECK_THROWS_AS(cluster_medoid(g, members, 3), std::invalid_argument);
  }
  SUBCASE("random 60-vertex clusters match repeated Dijkstra") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto g = build_graph(random_mesh(seed, 400));
      Rng rng(seed);
      const auto members = grow_cluster(g, rng, 60);
      const auto anchor = members[uniform_index(rng, members.size())];
      const auto expected = repeated_dijkstra_medoid(g, members, anchor);
      CHECK(cluster_medoid(g, members, anchor) == expected);
      // Dijkstra-sum route for large clusters.
      CHECK(cluster_medoid(g, members, anchor, 10) == expected);
    }
  }
}

TEST_CASE("comp_centroids") {
  const auto g = perturbed_grid(12, 12, 4);
  const auto centroids = kmeanspp_init(g, 6, 4);
  const auto groups = calc_groups(g, centroids);
  const auto serial = comp_centroids(g, groups.cluster, centroids, 1);
  CHECK(serial == comp_centroids(g, groups.cluster, centroids, 4));
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    std::vector<VertexIndex> members;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      if (groups.cluster[v] == c) members.push_back(v);
    }
    CHECK(serial[c] == oracle_medoid(g, members, centroids[c]));
  }
  std::vector<std::size_t> bad(g.vertex_count(), 0);
  CHECK_THROWS_AS(comp_centroids(g, bad, centroids), std::invalid_argument);
}

TEST_CASE("stop_criterion") {
  const auto g = path_graph(10);
  KmeansConfig config;
  const std::vector<VertexIndex> a = {0, 9};
  CHECK(stop_criterion(a, a, g, 1, config));
  const std::vector<VertexIndex> moved = {5, 9};
  CHECK_FALSE(stop_criterion(a, moved, g, 3, config));
  const std::vector<VertexIndex> nudged = {1, 9};
  CHECK(stop_criterion(a, nudged, g, 3, config));
  const std::vector<VertexIndex> two = {2, 9};
  CHECK_FALSE(stop_criterion(a, two, g, 3, config));  // 2 mm is not < 2 mm
  CHECK(stop_criterion(a, moved, g, 20, config));
  CHECK(max_centroid_displacement(g, a, moved) == 5.0);
}

TEST_CASE("repair_empty_clusters reseeds at the farthest vertex") {
  const auto g = path_graph(6);
  std::vector<VertexIndex> centroids = {0, 1};
  GroupAssignment groups = calc_groups(g, centroids);
  // Force cluster 1 empty.
  std::fill(groups.cluster.begin(), groups.cluster.end(), 0);
  const auto repairs = repair_empty_clusters(g, centroids, groups);
  CHECK(repairs == 1);
  CHECK(centroids == std::vector<VertexIndex>{0, 5});
  CHECK(groups.cluster == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});

  auto untouched = calc_groups(g, centroids);
  CHECK(repair_empty_clusters(g, centroids, untouched) == 0);
}

TEST_CASE("parallel_kmeans with k = 1 returns every vertex") {
  const auto g = perturbed_grid(7, 4, 0);
  KmeansConfig config;
  const auto result = parallel_kmeans(g, config);
  REQUIRE(result.groups.size() == 1);
  CHECK(result.groups[0].size() == g.vertex_count());
  CHECK(result.iterations == 0);
  config.k = 29;
  CHECK_THROWS_AS(parallel_kmeans(g, config), std::invalid_argument);
}

TEST_CASE("two triangles joined by a long bridge split into the triangles") {
  const auto g = bridged_triangles();
  const std::vector<VertexIndex> left = {0, 1, 2};
  const std::vector<VertexIndex> right = {3, 4, 5};
  KmeansConfig config;
  config.k = 2;
  auto is_split = [&](const KmeansResult& r) {
    return (r.groups[0] == left && r.groups[1] == right) ||
           (r.groups[0] == right && r.groups[1] == left);
  };
  // Every ordered starting pair converges to the same partition.
  for (VertexIndex a = 0; a < 6; ++a) {
    for (VertexIndex b = 0; b < 6; ++b) {
      if (a == b) continue;
      CHECK(is_split(kmeans_from_centroids(g, {a, b}, config)));
    }
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    config.rng_seed = seed;
    CHECK(is_split(parallel_kmeans(g, config)));
  }
}

TEST_CASE("parallel_kmeans contract on synthetic meshes") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto g = perturbed_grid(25, 20, seed);
    KmeansConfig config;
    config.k = 5;
    config.rng_seed = seed;
    const auto result = parallel_kmeans(g, config);

    // partition
    std::vector<int> seen(g.vertex_count(), 0);
    for (std::size_t c = 0; c < result.groups.size(); ++c) {
      CHECK(!result.groups[c].empty());
      for (auto v : result.groups[c]) {
        ++seen[v];
        CHECK(result.assignment[v] == c);
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));

    // termination
    CHECK(result.iterations >= 1);
    CHECK(result.iterations <= config.max_iterations);
    if (result.converged) CHECK(result.final_displacement_mm < 2.0);
    CHECK(result.cost_history.size() == result.iterations);

    // assignment optimality against per-centroid fields
    std::vector<DistanceField> fields;
    for (auto c : result.centroids) fields.push_back(oracle_sssp(g, c));
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      const double own = fields[result.assignment[v]].dist[v];
      for (const auto& f : fields) REQUIRE(own <= f.dist[v] * (1 + 1e-12));
    }

    // each centroid lies in its group; groups are connected
    for (std::size_t c = 0; c < result.groups.size(); ++c) {
      CHECK(std::binary_search(result.groups[c].begin(), result.groups[c].end(),
                               result.centroids[c]));
      const auto sub = induced_subgraph(g, result.groups[c]);
      const auto comp = connected_components(sub);
      CHECK(std::all_of(comp.begin(), comp.end(),
                        [](std::size_t x) { return x == 0; }));
    }

    // determinism across runs and worker counts
    auto parallel = config;
    parallel.workers = 4;
    const auto again = parallel_kmeans(g, parallel);
    CHECK(again.groups == result.groups);
    CHECK(again.centroids == result.centroids);
    CHECK(again.iterations == result.iterations);
  }
}

TEST_CASE("medoid step is optimal within each cluster") {
  const auto g = perturbed_grid(16, 16, 9);
  const auto centroids = kmeanspp_init(g, 4, 9);
  const auto groups = calc_groups(g, centroids);
  const auto next = comp_centroids(g, groups.cluster, centroids);
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    std::vector<VertexIndex> members;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      if (groups.cluster[v] == c) members.push_back(v);
    }
    const auto sub = induced_subgraph(g, members);
    const auto d = apsp(sub);
    auto sum = [&](std::size_t i) {
      double s = 0.0;
      for (std::size_t j = 0; j < members.size(); ++j) s += d.at(i, j);
      return s;
    };
    const auto chosen = static_cast<std::size_t>(
        std::lower_bound(members.begin(), members.end(), next[c]) -
        members.begin());
    for (std::size_t i = 0; i < members.size(); ++i) {
      REQUIRE(sum(chosen) <= sum(i) * (1 + kMedoidTieTolerance));
    }
  }
}

TEST_CASE("k = 5 on a 500-vertex mesh is bitwise reproducible") {
  MeshSpec spec;
  spec.kind = MeshKind::wave_sheet;
  spec.nx = 25;
  spec.ny = 20;
  spec.spacing_mm = 0.8;
  spec.amplitude_mm = 2.0;
  const auto g = build_graph(make_mesh(spec).mesh);
  REQUIRE(g.vertex_count() == 500);
  KmeansConfig config;
  config.k = 5;
  config.rng_seed = 1234;
  const auto a = parallel_kmeans(g, config);
  const auto b = parallel_kmeans(g, config);
  CHECK(a.groups == b.groups);
  CHECK(a.cost_history == b.cost_history);
}
