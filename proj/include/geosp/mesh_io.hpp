#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "geosp/mesh.hpp"
#include "geosp/parcellation.hpp"

namespace geosp {

enum class MeshFormat { off, ply };

// Reported for malformed input files. `line()` is 1-based; 0 means the error
// is not tied to a particular line (e.g. a count mismatch at end of file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, std::size_t line,
             const std::string& what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Picks the format from the file extension (.off / .ply, case-insensitive).
MeshFormat format_from_extension(const std::filesystem::path& path);

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
                MeshFormat format);

// When `expected_count` is set the label count must match it.
VertexLabels load_labels(const std::filesystem::path& path,
                         std::optional<std::size_t> expected_count = {});

void write_labels(const std::filesystem::path& path, const VertexLabels& labels);

using Rgb = std::array<std::uint8_t, 3>;

// Hash-based palette. Injective over all ids below 2^24.
Rgb parcel_color(std::size_t sub_parcel_id);

// Writes `<directory>/parcellation.txt` (one id per line) and
// `<directory>/parcellation.ply` (mesh with per-vertex colors).
void write_parcellation(const std::filesystem::path& directory,
                        const Parcellation& parcellation,
                        const TriangleMesh& mesh);

}  // namespace geosp
