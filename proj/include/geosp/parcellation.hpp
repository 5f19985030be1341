#pragma once

#include <cstddef>
#include <vector>

#include "geosp/mesh.hpp"

namespace geosp {

enum class ParcellationMode { atlas, whole };

// Where a global sub-parcel came from. In whole mode `region` holds the
// hemisphere label (0 when the mesh is a single hemisphere).
struct ParcelOrigin {
  Label region = 0;
  std::size_t local_cluster = 0;

  friend bool operator==(const ParcelOrigin&, const ParcelOrigin&) = default;
};

struct Parcellation {
  ParcellationMode mode = ParcellationMode::atlas;
  std::vector<std::size_t> sub_parcel;  // global id per vertex
  std::vector<ParcelOrigin> origin;     // indexed by global id

  std::size_t vertex_count() const { return sub_parcel.size(); }
  std::size_t parcel_count() const { return origin.size(); }

  friend bool operator==(const Parcellation&, const Parcellation&) = default;
};

// Vertex count per global id.
std::vector<std::size_t> parcel_sizes(const Parcellation& parcellation);

// Checks id contiguity, non-emptiness, and that origin entries are unique.
// Throws std::invalid_argument on violation.
void validate(const Parcellation& parcellation);

}  // namespace geosp
