#include "geosp/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

#include "geosp/parcellation.hpp"

namespace geosp {

void validate(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) {
    throw std::invalid_argument("mesh has no vertices");
  }
  const auto n = mesh.vertices.size();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (auto v : tri) {
      if (v >= n) {
        throw std::invalid_argument(fmt::format(
            "triangle {} references vertex {} but the mesh has {} vertices", t,
            v, n));
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw std::invalid_argument(
          fmt::format("triangle {} repeats a vertex index", t));
    }
  }
}

std::vector<Label> distinct_labels(const VertexLabels& labels) {
  std::vector<Label> out(labels.labels.begin(), labels.labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> parcel_sizes(const Parcellation& parcellation) {
  std::vector<std::size_t> sizes(parcellation.parcel_count(), 0);
  for (auto id : parcellation.sub_parcel) {
    if (id < sizes.size()) ++sizes[id];
  }
  return sizes;
}

void validate(const Parcellation& parcellation) {
  const auto count = parcellation.parcel_count();
  for (std::size_t v = 0; v < parcellation.sub_parcel.size(); ++v) {
    if (parcellation.sub_parcel[v] >= count) {
      throw std::invalid_argument(
          fmt::format("vertex {} has sub-parcel id {} outside [0, {})", v,
                      parcellation.sub_parcel[v], count));
    }
  }
  const auto sizes = parcel_sizes(parcellation);
  for (std::size_t id = 0; id < count; ++id) {
    if (sizes[id] == 0) {
      throw std::invalid_argument(fmt::format("sub-parcel {} is empty", id));
    }
  }
  auto origins = parcellation.origin;
  std::sort(origins.begin(), origins.end(), [](const auto& a, const auto& b) {
    return std::pair(a.region, a.local_cluster) <
           std::pair(b.region, b.local_cluster);
  });
  if (std::adjacent_find(origins.begin(), origins.end()) != origins.end()) {
    throw std::invalid_argument("two sub-parcels share the same origin");
  }
}

}  // namespace geosp
