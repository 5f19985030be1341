#include "geosp/parcellator.hpp"

#include <chrono>
#include <stdexcept>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "geosp/parallel.hpp"
#include "geosp/random.hpp"
#include "geosp/surface_graph.hpp"
#include "text_util.hpp"

namespace geosp {

AtlasPlan AtlasPlan::uniform(const VertexLabels& labels, std::size_t k) {
  AtlasPlan plan;
  for (auto region : distinct_labels(labels)) plan.k_by_region[region] = k;
  return plan;
}

AtlasPlan load_plan(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  AtlasPlan plan;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tokens = detail::tokenize(lines[i]);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    std::optional<Label> region;
    std::optional<std::size_t> k;
    if (tokens.size() == 2) {
      region = detail::parse_number<Label>(tokens[0]);
      k = detail::parse_number<std::size_t>(tokens[1]);
    }
    if (!region || !k) {
      throw ParseError(path, i + 1, "expected 'region_id k'");
    }
    if (*k == 0) throw ParseError(path, i + 1, "k must be at least 1");
    if (!plan.k_by_region.emplace(*region, *k).second) {
      throw ParseError(path, i + 1,
                       fmt::format("region {} listed twice", *region));
    }
  }
  return plan;
}

namespace {

ParcellationRun run_regions(const TriangleMesh& mesh, const VertexLabels& labels,
                            const AtlasPlan& plan, const KmeansConfig& config,
                            ParcellationMode mode) {
  validate(mesh);
  validate(config);
  if (labels.size() != mesh.vertex_count()) {
    throw std::invalid_argument(
        fmt::format("{} labels for a mesh of {} vertices", labels.size(),
                    mesh.vertex_count()));
  }
  const char* unit = mode == ParcellationMode::atlas ? "region" : "hemisphere";
  const auto regions = distinct_labels(labels);
  std::map<Label, std::size_t> sizes;
  for (auto l : labels.labels) ++sizes[l];
  for (auto region : regions) {
    const auto it = plan.k_by_region.find(region);
    if (it == plan.k_by_region.end()) {
      throw std::invalid_argument(
          fmt::format("plan has no k for {} {}", unit, region));
    }
    if (it->second < 1) {
      throw std::invalid_argument(
          fmt::format("k for {} {} must be at least 1", unit, region));
    }
    if (it->second > sizes[region]) {
      throw std::invalid_argument(fmt::format(
          "{} {} has {} vertices, fewer than its k = {}", unit, region,
          sizes[region], it->second));
    }
  }
  for (const auto& [region, k] : plan.k_by_region) {
    if (!sizes.contains(region)) {
      throw std::invalid_argument(
          fmt::format("plan names {} {} which has no vertices", unit, region));
    }
  }

  const auto graph = build_graph(mesh);
  const auto split = split_workers(config.workers, regions.size());

  struct Outcome {
    std::vector<VertexIndex> to_global;
    KmeansResult result;
    double seconds = 0.0;
  };
  std::vector<Outcome> outcomes(regions.size());
  parallel_for(regions.size(), split.outer, [&](std::size_t r) {
    const auto start = std::chrono::steady_clock::now();
    auto sub = extract_region_subgraph(graph, labels, regions[r]);
    KmeansConfig local = config;
    local.k = plan.k_by_region.at(regions[r]);
    local.rng_seed = region_seed(config.rng_seed, regions[r]);
    local.workers = split.inner;
    outcomes[r].result = parallel_kmeans(sub.graph, local);
    outcomes[r].to_global = std::move(sub.to_global);
    outcomes[r].seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  });

  ParcellationRun run;
  run.parcellation.mode = mode;
  run.parcellation.sub_parcel.assign(mesh.vertex_count(), 0);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& outcome = outcomes[r];
    for (std::size_t c = 0; c < outcome.result.groups.size(); ++c) {
      const auto global_id = run.parcellation.origin.size();
      run.parcellation.origin.push_back({regions[r], c});
      for (auto local : outcome.result.groups[c]) {
        run.parcellation.sub_parcel[outcome.to_global[local]] = global_id;
      }
    }
    run.regions.push_back({regions[r], outcome.result.groups.size(),
                           outcome.to_global.size(), outcome.result.iterations,
                           outcome.result.converged,
                           outcome.result.final_displacement_mm,
                           outcome.result.euclidean_fallbacks,
                           outcome.result.empty_cluster_repairs,
                           outcome.seconds});
  }
  return run;
}

}  // namespace

ParcellationRun parcellate_atlas_mode(const TriangleMesh& mesh,
                                      const VertexLabels& labels,
                                      const AtlasPlan& plan,
                                      const KmeansConfig& config) {
  return run_regions(mesh, labels, plan, config, ParcellationMode::atlas);
}

ParcellationRun parcellate_whole_mode(const TriangleMesh& mesh,
                                      const VertexLabels& hemisphere_labels,
                                      const KmeansConfig& config) {
  const auto hemispheres = distinct_labels(hemisphere_labels);
  if (hemispheres.size() > 2) {
    throw std::invalid_argument(fmt::format(
        "whole mode takes one or two hemisphere labels, found {}",
        hemispheres.size()));
  }
  return run_regions(mesh, hemisphere_labels,
                     AtlasPlan::uniform(hemisphere_labels, config.k), config,
                     ParcellationMode::whole);
}

ParcellationRun parcellate_whole_mode(const TriangleMesh& mesh,
                                      const KmeansConfig& config) {
  VertexLabels single{std::vector<Label>(mesh.vertex_count(), 0)};
  return parcellate_whole_mode(mesh, single, config);
}

CombinedMesh combine_meshes(const std::vector<TriangleMesh>& meshes) {
  CombinedMesh combined;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const auto offset = combined.mesh.vertices.size();
    combined.mesh.vertices.insert(combined.mesh.vertices.end(),
                                  meshes[i].vertices.begin(),
                                  meshes[i].vertices.end());
    for (const auto& t : meshes[i].triangles) {
      combined.mesh.triangles.push_back(
          {t[0] + offset, t[1] + offset, t[2] + offset});
    }
    combined.labels.labels.insert(combined.labels.labels.end(),
                                  meshes[i].vertex_count(),
                                  static_cast<Label>(i));
  }
  return combined;
}

std::string summarize(const ParcellationRun& run, bool include_timings) {
  using nlohmann::ordered_json;
  ordered_json summary;
  summary["mode"] =
      run.parcellation.mode == ParcellationMode::atlas ? "atlas" : "whole";
  summary["vertex_count"] = run.parcellation.vertex_count();
  summary["sub_parcel_count"] = run.parcellation.parcel_count();
  summary["parcel_sizes"] = parcel_sizes(run.parcellation);
  ordered_json regions = ordered_json::array();
  double total_seconds = 0.0;
  for (const auto& r : run.regions) {
    ordered_json entry;
    entry[run.parcellation.mode == ParcellationMode::atlas ? "region"
                                                           : "hemisphere"] =
        r.region;
    entry["k"] = r.k;
    entry["vertices"] = r.vertex_count;
    entry["iterations"] = r.iterations;
    entry["converged"] = r.converged;
    entry["final_displacement_mm"] = r.final_displacement_mm;
    entry["euclidean_fallbacks"] = r.euclidean_fallbacks;
    entry["empty_cluster_repairs"] = r.empty_cluster_repairs;
    if (include_timings) entry["seconds"] = r.seconds;
    total_seconds += r.seconds;
    regions.push_back(std::move(entry));
  }
  summary["regions"] = std::move(regions);
  if (include_timings) summary["seconds"] = total_seconds;
  return summary.dump(2) + "\n";
}

}  // namespace geosp
