#include "geosp/geodesic_kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "geosp/parallel.hpp"
#include "geosp/random.hpp"

namespace geosp {

void validate(const KmeansConfig& config) {
  if (config.k < 1) throw std::invalid_argument("k must be at least 1");
  if (config.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  if (!(config.convergence_tolerance_mm > 0.0) ||
      !std::isfinite(config.convergence_tolerance_mm)) {
    throw std::invalid_argument("convergence tolerance must be positive");
  }
}

namespace {

void check_cluster_count(const SurfaceGraph& graph, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k > graph.vertex_count()) {
    throw std::invalid_argument(fmt::format(
        "k = {} exceeds the vertex count {}", k, graph.vertex_count()));
  }
}

}  // namespace

std::vector<VertexIndex> kmeanspp_init(const SurfaceGraph& graph, std::size_t k,
                                       std::uint64_t rng_seed) {
  check_cluster_count(graph, k);
  const auto n = graph.vertex_count();
  Rng rng(rng_seed);

  std::vector<VertexIndex> centroids;
  centroids.reserve(k);
  std::vector<char> chosen(n, 0);
  std::vector<double> nearest(n, kUnreachable);
  std::vector<double> weight(n, 0.0);

  auto add = [&](VertexIndex c) {
    centroids.push_back(c);
    chosen[c] = 1;
    const auto field = sssp(graph, c);
    for (VertexIndex v = 0; v < n; ++v) {
      nearest[v] = std::min(nearest[v], field.dist[v]);
    }
  };

  add(static_cast<VertexIndex>(uniform_index(rng, n)));
  while (centroids.size() < k) {
    double max_finite = 0.0;
    for (auto d : nearest) {
      if (d != kUnreachable) max_finite = std::max(max_finite, d);
    }
    const double unreachable_distance = max_finite + 1.0;
    double total = 0.0;
    for (VertexIndex v = 0; v < n; ++v) {
      if (chosen[v]) {
        weight[v] = 0.0;
        continue;
      }
      const double d = nearest[v] == kUnreachable ? unreachable_distance
                                                  : nearest[v];
      weight[v] = d * d;
      total += weight[v];
    }

    VertexIndex pick = n;
    if (total > 0.0) {
      const double target = uniform_unit(rng) * total;
      double cumulative = 0.0;
      VertexIndex last_positive = n;
      for (VertexIndex v = 0; v < n; ++v) {
        if (weight[v] <= 0.0) continue;
        last_positive = v;
        cumulative += weight[v];
        if (cumulative > target) {
          pick = v;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // Only reachable through underflow; fall back to a uniform pick.
      std::vector<VertexIndex> open;
      for (VertexIndex v = 0; v < n; ++v) {
        if (!chosen[v]) open.push_back(v);
      }
      pick = open[uniform_index(rng, open.size())];
    }
    add(pick);
  }
  return centroids;
}

GroupAssignment calc_groups(const SurfaceGraph& graph,
                            std::span<const VertexIndex> centroids) {
  GroupAssignment result;
  result.field = multi_source_sssp(graph, centroids);
  const auto n = graph.vertex_count();
  result.cluster.resize(n);
  for (VertexIndex v = 0; v < n; ++v) {
    auto slot = result.field.nearest_slot[v];
    if (slot == kNoSource) {
      double best = kUnreachable;
      for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(graph.position(v),
                                          graph.position(centroids[c]));
        if (d < best) {
          best = d;
          slot = c;
        }
      }
      ++result.euclidean_fallbacks;
    }
    result.cluster[v] = slot;
  }
  return result;
}

namespace {

// Index into `sums` of the smallest entry, earlier entries winning near-ties.
std::size_t argmin_with_ties(std::span<const double> sums) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sums.size(); ++i) {
    if (sums[i] < sums[best] - kMedoidTieTolerance * sums[best]) best = i;
  }
  return best;
}

}  // namespace

VertexIndex cluster_medoid(const SurfaceGraph& graph,
                           std::span<const VertexIndex> members,
                           VertexIndex previous_centroid,
                           std::size_t floyd_warshall_max_vertices) {
  const auto it =
      std::lower_bound(members.begin(), members.end(), previous_centroid);
  if (it == members.end() || *it != previous_centroid) {
    throw std::invalid_argument(fmt::format(
        "previous centroid {} is not a member of its cluster",
        previous_centroid));
  }
  if (members.size() == 1) return members.front();
  const auto anchor = static_cast<std::size_t>(it - members.begin());
  const auto sub = induced_subgraph(graph, members);
  const auto m = members.size();

  std::vector<std::size_t> component;
  std::vector<double> sums;
  if (m <= floyd_warshall_max_vertices) {
    const auto d = apsp(sub, m);
    for (std::size_t i = 0; i < m; ++i) {
      if (d.at(anchor, i) != kUnreachable) component.push_back(i);
    }
    sums.reserve(component.size());
    for (auto i : component) {
      const auto row = d.row(i);
      double s = 0.0;
      for (auto j : component) s += row[j];
      sums.push_back(s);
    }
  } else {
    const auto from_anchor = sssp(sub, anchor);
    for (std::size_t i = 0; i < m; ++i) {
      if (from_anchor.reachable(i)) component.push_back(i);
    }
    sums.reserve(component.size());
    for (auto i : component) {
      const auto field = sssp(sub, i);
      double s = 0.0;
      for (auto j : component) s += field.dist[j];
      sums.push_back(s);
    }
  }
  return members[component[argmin_with_ties(sums)]];
}

std::vector<VertexIndex> comp_centroids(
    const SurfaceGraph& graph, std::span<const std::size_t> assignment,
    std::span<const VertexIndex> previous_centroids, std::size_t workers,
    std::size_t floyd_warshall_max_vertices) {
  const auto k = previous_centroids.size();
  if (assignment.size() != graph.vertex_count()) {
    throw std::invalid_argument("assignment length differs from vertex count");
  }
  std::vector<std::vector<VertexIndex>> members(k);
  for (VertexIndex v = 0; v < assignment.size(); ++v) {
    if (assignment[v] >= k) {
      throw std::invalid_argument(
          fmt::format("vertex {} assigned to cluster {} of {}", v,
                      assignment[v], k));
    }
    members[assignment[v]].push_back(v);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].empty()) {
      throw std::invalid_argument(fmt::format("cluster {} is empty", c));
    }
  }
  std::vector<VertexIndex> next(k);
  parallel_for(k, workers, [&](std::size_t c) {
    next[c] = cluster_medoid(graph, members[c], previous_centroids[c],
                             floyd_warshall_max_vertices);
  });
  return next;
}

double max_centroid_displacement(const SurfaceGraph& graph,
                                 std::span<const VertexIndex> old_centroids,
                                 std::span<const VertexIndex> new_centroids) {
  if (old_centroids.size() != new_centroids.size()) {
    throw std::invalid_argument("centroid lists differ in length");
  }
  double worst = 0.0;
  for (std::size_t c = 0; c < old_centroids.size(); ++c) {
    worst = std::max(worst, distance(graph.position(old_centroids[c]),
                                     graph.position(new_centroids[c])));
  }
  return worst;
}

bool stop_criterion(std::span<const VertexIndex> old_centroids,
                    std::span<const VertexIndex> new_centroids,
                    const SurfaceGraph& graph, std::size_t iteration,
                    const KmeansConfig& config) {
  if (iteration >= config.max_iterations) return true;
  return max_centroid_displacement(graph, old_centroids, new_centroids) <
         config.convergence_tolerance_mm;
}

std::size_t repair_empty_clusters(const SurfaceGraph& graph,
                                  std::vector<VertexIndex>& centroids,
                                  GroupAssignment& groups) {
  const auto k = centroids.size();
  std::size_t repairs = 0;
  // Each round fills at least one empty cluster, so k rounds suffice.
  for (std::size_t round = 0; round <= k; ++round) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto c : groups.cluster) ++sizes[c];
    const auto empty = std::find(sizes.begin(), sizes.end(), 0);
    if (empty == sizes.end()) return repairs;

    std::vector<char> is_centroid(graph.vertex_count(), 0);
    for (auto c : centroids) is_centroid[c] = 1;
    VertexIndex farthest = graph.vertex_count();
    double best = -1.0;
    for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
      if (is_centroid[v]) continue;
      if (groups.field.dist[v] > best) {
        best = groups.field.dist[v];
        farthest = v;
      }
    }
    if (farthest == graph.vertex_count()) {
      throw std::logic_error("no vertex available to reseed an empty cluster");
    }
    centroids[static_cast<std::size_t>(empty - sizes.begin())] = farthest;
    groups = calc_groups(graph, centroids);
    ++repairs;
  }
  throw std::logic_error("empty-cluster repair did not terminate");
}

namespace {

std::vector<std::vector<VertexIndex>> collect_groups(
    std::span<const std::size_t> assignment, std::size_t k) {
  std::vector<std::vector<VertexIndex>> groups(k);
  for (VertexIndex v = 0; v < assignment.size(); ++v) {
    groups[assignment[v]].push_back(v);
  }
  return groups;
}

}  // namespace

KmeansResult kmeans_from_centroids(const SurfaceGraph& graph,
                                   std::vector<VertexIndex> centroids,
                                   const KmeansConfig& config) {
  validate(config);
  check_cluster_count(graph, centroids.size());
  KmeansResult result;
  const auto k = centroids.size();
  for (std::size_t iteration = 1;; ++iteration) {
    auto groups = calc_groups(graph, centroids);
    result.empty_cluster_repairs +=
        repair_empty_clusters(graph, centroids, groups);

    double cost = 0.0;
    for (auto d : groups.field.dist) {
      if (d != kUnreachable) cost += d;
    }
    result.cost_history.push_back(cost);

    auto next = comp_centroids(graph, groups.cluster, centroids, config.workers,
                               config.floyd_warshall_max_vertices);
    result.iterations = iteration;
    result.final_displacement_mm =
        max_centroid_displacement(graph, centroids, next);
    result.converged =
        result.final_displacement_mm < config.convergence_tolerance_mm;
    const bool stop =
        stop_criterion(centroids, next, graph, iteration, config);

    if (stop) {
      result.euclidean_fallbacks = groups.euclidean_fallbacks;
      result.groups = collect_groups(groups.cluster, k);
      result.assignment = std::move(groups.cluster);
      result.centroids = std::move(centroids);
      return result;
    }
    centroids = std::move(next);
  }
}

KmeansResult parallel_kmeans(const SurfaceGraph& graph,
                             const KmeansConfig& config) {
  validate(config);
  if (graph.vertex_count() == 0) {
    throw std::invalid_argument("cannot cluster an empty graph");
  }
  check_cluster_count(graph, config.k);
  if (config.k == 1) {
    KmeansResult result;
    result.assignment.assign(graph.vertex_count(), 0);
    result.groups.emplace_back(graph.vertex_count());
    std::iota(result.groups[0].begin(), result.groups[0].end(), VertexIndex{0});
    result.converged = true;
    return result;
  }
  return kmeans_from_centroids(
      graph, kmeanspp_init(graph, config.k, config.rng_seed), config);
}

}  // namespace geosp
