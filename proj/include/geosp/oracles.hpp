#pragma once

// Brute-force reference implementations used to cross-check the fast paths.
// None of these call into the shortest-path code of surface_graph.

#include <cstddef>
#include <set>
#include <span>
#include <utility>

#include "geosp/mesh.hpp"
#include "geosp/surface_graph.hpp"

namespace geosp {

// Bellman-Ford: relax every edge until nothing changes.
DistanceField oracle_sssp(const SurfaceGraph& graph, VertexIndex source);

// Argmin of within-cluster distance sums from repeated Bellman-Ford on the
// cluster-induced edges. Same tie and disconnection rules as cluster_medoid.
VertexIndex oracle_medoid(const SurfaceGraph& graph,
                          std::span<const VertexIndex> cluster,
                          VertexIndex previous_centroid);

// Linear scan; ties to the smallest index.
VertexIndex oracle_nearest_vertex(const Vec3& point, const TriangleMesh& mesh);

// Unique undirected triangle edges as (min, max) pairs.
std::set<std::pair<VertexIndex, VertexIndex>> oracle_mesh_edges(
    const TriangleMesh& mesh);

}  // namespace geosp
