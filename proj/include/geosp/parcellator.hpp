#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "geosp/geodesic_kmeans.hpp"
#include "geosp/mesh.hpp"
#include "geosp/parcellation.hpp"

namespace geosp {

// Number of sub-parcels requested for each region id.
struct AtlasPlan {
  std::map<Label, std::size_t> k_by_region;

  static AtlasPlan uniform(const VertexLabels& labels, std::size_t k);
};

// Text plan file: one "region_id k" pair per line.
AtlasPlan load_plan(const std::filesystem::path& path);

// Per-task diagnostics for the run summary.
struct RegionRun {
  Label region = 0;
  std::size_t k = 0;
  std::size_t vertex_count = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_displacement_mm = 0.0;
  std::size_t euclidean_fallbacks = 0;
  std::size_t empty_cluster_repairs = 0;
  double seconds = 0.0;
};

struct ParcellationRun {
  Parcellation parcellation;
  std::vector<RegionRun> regions;  // ascending region id
};

// Splits every labeled region into plan[region] sub-parcels. `config.k` is
// ignored; each region runs with seed region_seed(config.rng_seed, region)
// and regions are processed concurrently on config.workers threads.
ParcellationRun parcellate_atlas_mode(const TriangleMesh& mesh,
                                      const VertexLabels& labels,
                                      const AtlasPlan& plan,
                                      const KmeansConfig& config);

// Splits each hemisphere (one or two distinct labels) into config.k
// sub-parcels, ignoring any anatomical labels.
ParcellationRun parcellate_whole_mode(const TriangleMesh& mesh,
                                      const VertexLabels& hemisphere_labels,
                                      const KmeansConfig& config);

// Single-hemisphere convenience overload.
ParcellationRun parcellate_whole_mode(const TriangleMesh& mesh,
                                      const KmeansConfig& config);

// Concatenates meshes, labeling the vertices of meshes[i] with i.
struct CombinedMesh {
  TriangleMesh mesh;
  VertexLabels labels;
};
CombinedMesh combine_meshes(const std::vector<TriangleMesh>& meshes);

// JSON summary. Timings are emitted under "seconds" keys only when
// `include_timings` is set.
std::string summarize(const ParcellationRun& run, bool include_timings);

}  // namespace geosp
