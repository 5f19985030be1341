#pragma once

// Deterministic synthetic meshes, atlases and fiber sets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "geosp/connectivity.hpp"
#include "geosp/mesh.hpp"

namespace geosp {

enum class MeshKind { grid, icosphere, wave_sheet, dumbbell, two_hemispheres, atlas };

std::optional<MeshKind> parse_mesh_kind(std::string_view name);

struct MeshSpec {
  MeshKind kind = MeshKind::grid;
  // grid, wave_sheet, dumbbell patches, atlas hemispheres (vertex counts)
  std::size_t nx = 10;
  std::size_t ny = 10;
  double spacing_mm = 1.0;
  // icosphere, two_hemispheres
  std::size_t subdivision = 2;
  double radius_mm = 10.0;
  // wave_sheet: z = amplitude * sin(2 pi x / wavelength)
  double amplitude_mm = 5.0;
  double wavelength_mm = 10.0;
  // dumbbell: gap between the two patches; two_hemispheres / atlas: gap
  // between the two hemispheres
  double gap_mm = 20.0;
  // atlas: rectangular regions per hemisphere along x and y
  std::size_t regions_x = 5;
  std::size_t regions_y = 7;
  // Each coordinate is shifted by a uniform draw from [0, jitter_mm).
  double jitter_mm = 0.0;
  std::uint64_t rng_seed = 0;
};

struct SyntheticMesh {
  TriangleMesh mesh;
  std::optional<VertexLabels> regions;      // atlas
  std::optional<VertexLabels> hemispheres;  // two_hemispheres, atlas
};

// Throws std::invalid_argument on non-positive dimensions or sizes.
SyntheticMesh make_mesh(const MeshSpec& spec);

// nx x ny vertex lattice in the z = 0 plane, each cell split along the
// (i, j) -> (i + 1, j + 1) diagonal. Vertex (i, j) has index j * nx + i.
TriangleMesh make_grid(std::size_t nx, std::size_t ny, double spacing_mm);

// Subdivided icosahedron projected onto a sphere.
TriangleMesh make_icosphere(std::size_t level, double radius_mm,
                            const Vec3& center = {});

// Shifts every coordinate by a uniform draw from [0, max_mm).
void perturb_positions(TriangleMesh& mesh, std::uint64_t seed, double max_mm);

// Random fibers. With `as_points`, endpoints are vertex positions displaced by
// up to `point_noise_mm` per coordinate; otherwise they are vertex indices.
std::vector<Fiber> random_fibers(const TriangleMesh& mesh, std::size_t count,
                                 std::uint64_t seed, bool as_points = false,
                                 double point_noise_mm = 0.1);

}  // namespace geosp
