#include "geosp/surface_graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

#include "text_util.hpp"

namespace geosp {

SurfaceGraph SurfaceGraph::from_edges(std::vector<Vec3> positions,
                                      std::span<const Edge> edges) {
  const auto n = positions.size();
  std::vector<Edge> unique;
  unique.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw std::invalid_argument(fmt::format(
          "edge ({}, {}) outside a graph of {} vertices", e.u, e.v, n));
    }
    if (e.u == e.v) {
      throw std::invalid_argument(fmt::format("self-loop at vertex {}", e.u));
    }
    unique.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  auto key = [](const Edge& e) { return std::pair(e.u, e.v); };
  std::sort(unique.begin(), unique.end(),
            [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  unique.erase(std::unique(unique.begin(), unique.end(),
                           [&](const Edge& a, const Edge& b) {
                             return key(a) == key(b);
                           }),
               unique.end());

  SurfaceGraph graph;
  graph.offsets_.assign(n + 1, 0);
  for (const auto& e : unique) {
    ++graph.offsets_[e.u + 1];
    ++graph.offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < n; ++v) {
    graph.offsets_[v + 1] += graph.offsets_[v];
  }
  graph.neighbors_.resize(graph.offsets_[n]);
  std::vector<std::size_t> fill(graph.offsets_.begin(),
                                graph.offsets_.end() - 1);
  for (const auto& e : unique) {
    const double w =
        std::max(distance(positions[e.u], positions[e.v]), kMinEdgeWeightMm);
    graph.neighbors_[fill[e.u]++] = {e.v, w};
    graph.neighbors_[fill[e.v]++] = {e.u, w};
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(graph.neighbors_.begin() + graph.offsets_[v],
              graph.neighbors_.begin() + graph.offsets_[v + 1],
              [](const Neighbor& a, const Neighbor& b) {
                return a.vertex < b.vertex;
              });
  }
  graph.positions_ = std::move(positions);
  return graph;
}

std::vector<Edge> SurfaceGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (VertexIndex u = 0; u < vertex_count(); ++u) {
    for (const auto& nb : neighbors(u)) {
      if (u < nb.vertex) out.push_back({u, nb.vertex});
    }
  }
  return out;
}

SurfaceGraph build_graph(const TriangleMesh& mesh) {
  validate(mesh);
  std::vector<Edge> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    edges.push_back({t[0], t[1]});
    edges.push_back({t[1], t[2]});
    edges.push_back({t[2], t[0]});
  }
  return SurfaceGraph::from_edges(mesh.vertices, edges);
}

SurfaceGraph induced_subgraph(const SurfaceGraph& graph,
                              std::span<const VertexIndex> vertices) {
  constexpr auto absent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> to_local(graph.vertex_count(), absent);
  std::vector<Vec3> positions;
  positions.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] >= graph.vertex_count() ||
        (i > 0 && vertices[i] <= vertices[i - 1])) {
      throw std::invalid_argument(
          "induced_subgraph requires strictly increasing in-range vertices");
    }
    to_local[vertices[i]] = i;
    positions.push_back(graph.position(vertices[i]));
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (const auto& nb : graph.neighbors(vertices[i])) {
      const auto j = to_local[nb.vertex];
      if (j != absent && i < j) edges.push_back({i, j});
    }
  }
  return SurfaceGraph::from_edges(std::move(positions), edges);
}

RegionSubgraph extract_region_subgraph(const SurfaceGraph& graph,
                                       const VertexLabels& labels,
                                       Label region) {
  if (labels.size() != graph.vertex_count()) {
    throw std::invalid_argument(
        fmt::format("{} labels for a graph of {} vertices", labels.size(),
                    graph.vertex_count()));
  }
  RegionSubgraph result;
  for (VertexIndex v = 0; v < labels.size(); ++v) {
    if (labels[v] == region) result.to_global.push_back(v);
  }
  if (result.to_global.empty()) {
    throw std::invalid_argument(
        fmt::format("region {} does not occur in the labels", region));
  }
  result.graph = induced_subgraph(graph, result.to_global);
  return result;
}

DistanceField multi_source_sssp(const SurfaceGraph& graph,
                                std::span<const VertexIndex> sources) {
  const auto n = graph.vertex_count();
  if (sources.empty()) {
    throw std::invalid_argument("multi_source_sssp needs at least one source");
  }
  DistanceField field;
  field.sources.assign(sources.begin(), sources.end());
  field.dist.assign(n, kUnreachable);
  field.nearest_slot.assign(n, kNoSource);

  using Entry = std::pair<double, VertexIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t slot = 0; slot < sources.size(); ++slot) {
    const auto s = sources[slot];
    if (s >= n) {
      throw std::out_of_range(
          fmt::format("source {} outside a graph of {} vertices", s, n));
    }
    if (field.nearest_slot[s] != kNoSource) {
      throw std::invalid_argument(fmt::format("duplicate source {}", s));
    }
    field.dist[s] = 0.0;
    field.nearest_slot[s] = slot;
    heap.push({0.0, s});
  }

  std::vector<char> settled(n, 0);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    const auto slot = field.nearest_slot[u];
    for (const auto& nb : graph.neighbors(u)) {
      const auto v = nb.vertex;
      if (settled[v]) continue;
      const double candidate = d + nb.weight;
      if (candidate < field.dist[v] ||
          (candidate == field.dist[v] && slot < field.nearest_slot[v])) {
        field.dist[v] = candidate;
        field.nearest_slot[v] = slot;
        heap.push({candidate, v});
      }
    }
  }
  return field;
}

DistanceField sssp(const SurfaceGraph& graph, VertexIndex source) {
  const VertexIndex sources[] = {source};
  return multi_source_sssp(graph, sources);
}

DistanceMatrix apsp(const SurfaceGraph& graph, std::size_t vertex_cap) {
  const auto n = graph.vertex_count();
  if (n > vertex_cap) {
    throw std::length_error(fmt::format(
        "apsp on {} vertices exceeds the cap of {}", n, vertex_cap));
  }
  DistanceMatrix d(n);
  for (VertexIndex u = 0; u < n; ++u) {
    d.at(u, u) = 0.0;
    for (const auto& nb : graph.neighbors(u)) {
      d.at(u, nb.vertex) = std::min(d.at(u, nb.vertex), nb.weight);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double* row_k = &d.at(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d.at(i, k);
      if (dik == kUnreachable) continue;
      double* row_i = &d.at(i, 0);
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + row_k[j];
        row_i[j] = via < row_i[j] ? via : row_i[j];
      }
    }
  }
  return d;
}

void write_distance_field(const std::filesystem::path& path,
                          const DistanceField& field) {
  std::string out;
  for (auto d : field.dist) {
    out += d == kUnreachable ? std::string("inf") : fmt::format("{:.9f}", d);
    out += '\n';
  }
  detail::write_file(path, out);
}

std::vector<std::size_t> connected_components(const SurfaceGraph& graph) {
  const auto n = graph.vertex_count();
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> component(n, unset);
  std::vector<VertexIndex> stack;
  for (VertexIndex root = 0; root < n; ++root) {
    if (component[root] != unset) continue;
    component[root] = root;
    stack.push_back(root);
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& nb : graph.neighbors(u)) {
        if (component[nb.vertex] == unset) {
          component[nb.vertex] = root;
          stack.push_back(nb.vertex);
        }
      }
    }
  }
  return component;
}

}  // namespace geosp
