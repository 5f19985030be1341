#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "geosp/mesh.hpp"

namespace geosp {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Coincident endpoints get this weight instead of zero.
inline constexpr double kMinEdgeWeightMm = 1e-9;

struct Edge {
  VertexIndex u = 0;
  VertexIndex v = 0;
};

struct Neighbor {
  VertexIndex vertex = 0;
  double weight = 0.0;
};

// Undirected graph over mesh vertices, stored as compressed adjacency rows
// sorted by neighbor index. Weights are Euclidean edge lengths in mm.
// Immutable once built.
class SurfaceGraph {
 public:
  SurfaceGraph() = default;

  // Builds from explicit edges. Duplicates (in either orientation) are merged
  // and self-loops rejected.
  static SurfaceGraph from_edges(std::vector<Vec3> positions,
                                 std::span<const Edge> edges);

  std::size_t vertex_count() const { return positions_.size(); }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const Neighbor> neighbors(VertexIndex v) const {
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  const Vec3& position(VertexIndex v) const { return positions_[v]; }
  std::span<const Vec3> positions() const { return positions_; }

  // Each undirected edge once, with u < v, ordered by (u, v).
  std::vector<Edge> edges() const;

 private:
  std::vector<Vec3> positions_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> neighbors_;
};

SurfaceGraph build_graph(const TriangleMesh& mesh);

// Subgraph induced by `vertices`, which must be strictly increasing.
// Local vertex i corresponds to global vertex `vertices[i]`.
SurfaceGraph induced_subgraph(const SurfaceGraph& graph,
                              std::span<const VertexIndex> vertices);

struct RegionSubgraph {
  SurfaceGraph graph;
  std::vector<VertexIndex> to_global;  // local -> global, ascending
};

// Throws std::invalid_argument when `region` does not occur in `labels`.
RegionSubgraph extract_region_subgraph(const SurfaceGraph& graph,
                                       const VertexLabels& labels, Label region);

inline constexpr std::size_t kNoSource = std::numeric_limits<std::size_t>::max();

struct DistanceField {
  std::vector<VertexIndex> sources;
  std::vector<double> dist;  // kUnreachable where no source reaches
  // Position in `sources` of the closest source, kNoSource if unreachable.
  std::vector<std::size_t> nearest_slot;

  bool reachable(VertexIndex v) const { return dist[v] != kUnreachable; }
  VertexIndex nearest_source(VertexIndex v) const {
    return sources[nearest_slot[v]];
  }
};

DistanceField sssp(const SurfaceGraph& graph, VertexIndex source);

// Distances to the closest of several sources. Equidistant vertices go to
// the source listed first.
DistanceField multi_source_sssp(const SurfaceGraph& graph,
                                std::span<const VertexIndex> sources);

inline constexpr std::size_t kDefaultApspVertexCap = 20000;

// Dense row-major |V| x |V| distance matrix.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = kUnreachable)
      : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Floyd-Warshall. Throws std::length_error above `vertex_cap` vertices.
DistanceMatrix apsp(const SurfaceGraph& graph,
                    std::size_t vertex_cap = kDefaultApspVertexCap);

// One distance per line, "inf" for unreachable vertices.
void write_distance_field(const std::filesystem::path& path,
                          const DistanceField& field);

// Connected component id per vertex, numbered by smallest member.
std::vector<std::size_t> connected_components(const SurfaceGraph& graph);

}  // namespace geosp
