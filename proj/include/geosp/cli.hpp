#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "geosp/mesh.hpp"
#include "geosp/parcellation.hpp"

namespace geosp {

// Entry point of the `geosp` tool. `args` excludes the program name.
// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// Parcellation from a per-vertex id file. Distinct ids are renumbered in
// ascending order to 0..P-1, so atlas label files are accepted as well.
Parcellation parcellation_from_ids(const VertexLabels& ids);

}  // namespace geosp
