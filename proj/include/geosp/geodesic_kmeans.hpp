#pragma once

// K-means over graph-geodesic distances, with medoids as cluster centers.
//
// One run: K-means++ seeding, then alternate
//   1. assign every vertex to its geodesically nearest centroid,
//   2. move each centroid to the medoid of its cluster,
// until no centroid moves (Euclidean, in mm) by the tolerance or more, or the
// iteration cap is reached.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geosp/surface_graph.hpp"

namespace geosp {

struct KmeansConfig {
  std::size_t k = 1;
  std::size_t max_iterations = 20;
  double convergence_tolerance_mm = 2.0;
  std::uint64_t rng_seed = 0;
  // Threads used for the per-cluster medoid step.
  std::size_t workers = 1;
  // Medoids of clusters up to this size use Floyd-Warshall on the cluster
  // subgraph; larger clusters accumulate distance sums from one Dijkstra run
  // per member instead of materializing the |C| x |C| matrix.
  std::size_t floyd_warshall_max_vertices = 512;
};

// Throws std::invalid_argument on k == 0, max_iterations == 0, or a
// non-positive tolerance.
void validate(const KmeansConfig& config);

// First centroid uniform, each further one drawn with probability
// proportional to the squared geodesic distance to the nearest chosen
// centroid. Vertices no chosen centroid reaches count as (max finite
// distance + 1 mm).
std::vector<VertexIndex> kmeanspp_init(const SurfaceGraph& graph, std::size_t k,
                                       std::uint64_t rng_seed);

struct GroupAssignment {
  std::vector<std::size_t> cluster;  // per vertex, position in the centroid list
  DistanceField field;
  // Vertices no centroid reaches; these are assigned to the Euclidean-nearest
  // centroid.
  std::size_t euclidean_fallbacks = 0;
};

GroupAssignment calc_groups(const SurfaceGraph& graph,
                            std::span<const VertexIndex> centroids);

// Sums within this relative margin count as ties, so that routes that add
// distances in different orders agree on the medoid.
inline constexpr double kMedoidTieTolerance = 1e-12;

// Medoid of one cluster. `members` are strictly increasing vertex indices
// of `graph` and must contain `previous_centroid`. Only the component of the
// cluster subgraph that holds `previous_centroid` is considered; ties go to
// the smallest vertex index.
VertexIndex cluster_medoid(const SurfaceGraph& graph,
                           std::span<const VertexIndex> members,
                           VertexIndex previous_centroid,
                           std::size_t floyd_warshall_max_vertices = 512);

// New centroid per cluster, computed concurrently on `workers` threads.
std::vector<VertexIndex> comp_centroids(
    const SurfaceGraph& graph, std::span<const std::size_t> assignment,
    std::span<const VertexIndex> previous_centroids, std::size_t workers = 1,
    std::size_t floyd_warshall_max_vertices = 512);

// Largest Euclidean distance between corresponding centroids.
double max_centroid_displacement(const SurfaceGraph& graph,
                                 std::span<const VertexIndex> old_centroids,
                                 std::span<const VertexIndex> new_centroids);

bool stop_criterion(std::span<const VertexIndex> old_centroids,
                    std::span<const VertexIndex> new_centroids,
                    const SurfaceGraph& graph, std::size_t iteration,
                    const KmeansConfig& config);

// Reseeds the centroid of each empty cluster at the vertex farthest from the
// centroid it is assigned to, then reassigns. Returns the number of reseeds.
std::size_t repair_empty_clusters(const SurfaceGraph& graph,
                                  std::vector<VertexIndex>& centroids,
                                  GroupAssignment& groups);

struct KmeansResult {
  std::vector<std::vector<VertexIndex>> groups;  // ascending vertex indices
  std::vector<std::size_t> assignment;
  // Centroids that produced `groups`; empty when k == 1.
  std::vector<VertexIndex> centroids;
  std::size_t iterations = 0;
  bool converged = false;  // stopped because displacement < tolerance
  double final_displacement_mm = 0.0;
  std::size_t euclidean_fallbacks = 0;
  std::size_t empty_cluster_repairs = 0;
  // Sum of geodesic distances to the assigned centroid, per iteration.
  std::vector<double> cost_history;
};

KmeansResult parallel_kmeans(const SurfaceGraph& graph,
                             const KmeansConfig& config);

// The iteration loop from explicit starting centroids (config.k and the
// seed are ignored).
KmeansResult kmeans_from_centroids(const SurfaceGraph& graph,
                                   std::vector<VertexIndex> centroids,
                                   const KmeansConfig& config);

}  // namespace geosp
