#include "geosp/oracles.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "geosp/geodesic_kmeans.hpp"

namespace geosp {

namespace {

struct WeightedEdge {
  std::size_t u;
  std::size_t v;
  double w;
};

// Distances from `source` over an undirected edge list on n vertices.
std::vector<double> bellman_ford(std::size_t n,
                                 const std::vector<WeightedEdge>& edges,
                                 std::size_t source) {
  std::vector<double> dist(n, kUnreachable);
  dist[source] = 0.0;
  for (std::size_t pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      if (dist[e.u] + e.w < dist[e.v]) {
        dist[e.v] = dist[e.u] + e.w;
        changed = true;
      }
      if (dist[e.v] + e.w < dist[e.u]) {
        dist[e.u] = dist[e.v] + e.w;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

}  // namespace

DistanceField oracle_sssp(const SurfaceGraph& graph, VertexIndex source) {
  const auto n = graph.vertex_count();
  if (source >= n) throw std::out_of_range("oracle_sssp: source out of range");
  std::vector<WeightedEdge> edges;
  for (VertexIndex u = 0; u < n; ++u) {
    for (const auto& nb : graph.neighbors(u)) {
      if (u < nb.vertex) edges.push_back({u, nb.vertex, nb.weight});
    }
  }
  DistanceField field;
  field.sources = {source};
  field.dist = bellman_ford(n, edges, source);
  field.nearest_slot.assign(n, kNoSource);
  for (VertexIndex v = 0; v < n; ++v) {
    if (field.dist[v] != kUnreachable) field.nearest_slot[v] = 0;
  }
  return field;
}

VertexIndex oracle_medoid(const SurfaceGraph& graph,
                          std::span<const VertexIndex> cluster,
                          VertexIndex previous_centroid) {
  if (cluster.empty()) throw std::invalid_argument("oracle_medoid: empty cluster");
  std::vector<VertexIndex> members(cluster.begin(), cluster.end());
  std::sort(members.begin(), members.end());
  const auto m = members.size();
  auto local_of = [&](VertexIndex v) -> std::size_t {
    const auto it = std::lower_bound(members.begin(), members.end(), v);
    return it != members.end() && *it == v ? static_cast<std::size_t>(
                                                 it - members.begin())
                                           : m;
  };
  const auto anchor = local_of(previous_centroid);
  if (anchor == m) {
    throw std::invalid_argument("oracle_medoid: previous centroid not in cluster");
  }

  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& nb : graph.neighbors(members[i])) {
      const auto j = local_of(nb.vertex);
      if (j != m && i < j) edges.push_back({i, j, nb.weight});
    }
  }

  const auto from_anchor = bellman_ford(m, edges, anchor);
  std::vector<std::size_t> component;
  for (std::size_t i = 0; i < m; ++i) {
    if (from_anchor[i] != kUnreachable) component.push_back(i);
  }
  std::size_t best = component.front();
  double best_sum = std::numeric_limits<double>::infinity();
  for (auto i : component) {
    const auto dist = bellman_ford(m, edges, i);
    double sum = 0.0;
    for (auto j : component) sum += dist[j];
    if (best_sum == std::numeric_limits<double>::infinity() ||
        sum < best_sum - kMedoidTieTolerance * best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return members[best];
}

VertexIndex oracle_nearest_vertex(const Vec3& point, const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) {
    throw std::invalid_argument("oracle_nearest_vertex: empty mesh");
  }
  VertexIndex best = 0;
  double best_sq = squared_distance(point, mesh.vertices[0]);
  for (VertexIndex v = 1; v < mesh.vertices.size(); ++v) {
    const double d = squared_distance(point, mesh.vertices[v]);
    if (d < best_sq) {
      best_sq = d;
      best = v;
    }
  }
  return best;
}

std::set<std::pair<VertexIndex, VertexIndex>> oracle_mesh_edges(
    const TriangleMesh& mesh) {
  std::set<std::pair<VertexIndex, VertexIndex>> edges;
  for (const auto& t : mesh.triangles) {
    for (int c = 0; c < 3; ++c) {
      const auto a = t[c];
      const auto b = t[(c + 1) % 3];
      edges.insert(std::minmax(a, b));
    }
  }
  return edges;
}

}  // namespace geosp
