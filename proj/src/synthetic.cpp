#include "geosp/synthetic.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "geosp/random.hpp"

namespace geosp {

std::optional<MeshKind> parse_mesh_kind(std::string_view name) {
  if (name == "grid") return MeshKind::grid;
  if (name == "icosphere") return MeshKind::icosphere;
  if (name == "wave_sheet") return MeshKind::wave_sheet;
  if (name == "dumbbell") return MeshKind::dumbbell;
  if (name == "two_hemispheres") return MeshKind::two_hemispheres;
  if (name == "atlas") return MeshKind::atlas;
  return std::nullopt;
}

TriangleMesh make_grid(std::size_t nx, std::size_t ny, double spacing_mm) {
  if (nx < 2 || ny < 2 || !(spacing_mm > 0.0)) {
    throw std::invalid_argument(
        "grid needs at least 2x2 vertices and positive spacing");
  }
  TriangleMesh mesh;
  mesh.vertices.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) * spacing_mm,
                               static_cast<double>(j) * spacing_mm, 0.0});
    }
  }
  mesh.triangles.reserve(2 * (nx - 1) * (ny - 1));
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const auto v00 = j * nx + i;
      const auto v10 = v00 + 1;
      const auto v01 = v00 + nx;
      const auto v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

TriangleMesh make_icosphere(std::size_t level, double radius_mm,
                            const Vec3& center) {
  if (!(radius_mm > 0.0)) {
    throw std::invalid_argument("icosphere radius must be positive");
  }
  const double t = std::numbers::phi;
  std::vector<Vec3> unit = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                            {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                            {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Triangle> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  auto normalize = [](Vec3 p) {
    const double len = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    return Vec3{p.x / len, p.y / len, p.z / len};
  };
  for (auto& p : unit) p = normalize(p);

  for (std::size_t l = 0; l < level; ++l) {
    std::map<std::pair<VertexIndex, VertexIndex>, VertexIndex> midpoints;
    auto midpoint = [&](VertexIndex a, VertexIndex b) {
      const auto key = std::minmax(a, b);
      const auto [it, inserted] = midpoints.try_emplace(key, unit.size());
      if (inserted) {
        const auto& pa = unit[a];
        const auto& pb = unit[b];
        unit.push_back(normalize(
            {(pa.x + pb.x) / 2, (pa.y + pb.y) / 2, (pa.z + pb.z) / 2}));
      }
      return it->second;
    };
    std::vector<Triangle> refined;
    refined.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const auto ab = midpoint(f[0], f[1]);
      const auto bc = midpoint(f[1], f[2]);
      const auto ca = midpoint(f[2], f[0]);
      refined.push_back({f[0], ab, ca});
      refined.push_back({f[1], bc, ab});
      refined.push_back({f[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    faces = std::move(refined);
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(unit.size());
  for (const auto& p : unit) {
    mesh.vertices.push_back({center.x + radius_mm * p.x,
                             center.y + radius_mm * p.y,
                             center.z + radius_mm * p.z});
  }
  mesh.triangles = std::move(faces);
  return mesh;
}

void perturb_positions(TriangleMesh& mesh, std::uint64_t seed, double max_mm) {
  if (!(max_mm > 0.0)) return;
  Rng rng(seed);
  for (auto& p : mesh.vertices) {
    p.x += uniform_unit(rng) * max_mm;
    p.y += uniform_unit(rng) * max_mm;
    p.z += uniform_unit(rng) * max_mm;
  }
}

namespace {

void append(TriangleMesh& into, const TriangleMesh& part, const Vec3& offset) {
  const auto base = into.vertices.size();
  for (const auto& p : part.vertices) {
    into.vertices.push_back({p.x + offset.x, p.y + offset.y, p.z + offset.z});
  }
  for (const auto& t : part.triangles) {
    into.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
}

}  // namespace

SyntheticMesh make_mesh(const MeshSpec& spec) {
  if (!(spec.spacing_mm > 0.0) || !(spec.radius_mm > 0.0) ||
      !(spec.wavelength_mm > 0.0) || spec.amplitude_mm < 0.0 ||
      spec.gap_mm < 0.0 || spec.jitter_mm < 0.0) {
    throw std::invalid_argument("mesh spec has a non-positive parameter");
  }
  SyntheticMesh out;
  switch (spec.kind) {
    case MeshKind::grid:
      out.mesh = make_grid(spec.nx, spec.ny, spec.spacing_mm);
      break;
    case MeshKind::icosphere:
      out.mesh = make_icosphere(spec.subdivision, spec.radius_mm);
      break;
    case MeshKind::wave_sheet: {
      out.mesh = make_grid(spec.nx, spec.ny, spec.spacing_mm);
      for (auto& p : out.mesh.vertices) {
        p.z = spec.amplitude_mm *
              std::sin(2.0 * std::numbers::pi * p.x / spec.wavelength_mm);
      }
      break;
    }
    case MeshKind::dumbbell: {
      // Two grid patches side by side along x, joined by one sliver triangle
      // from the middle of A's right column to B's left column.
      if (spec.ny < 2) throw std::invalid_argument("dumbbell needs ny >= 2");
      const auto patch = make_grid(spec.nx, spec.ny, spec.spacing_mm);
      const double width = static_cast<double>(spec.nx - 1) * spec.spacing_mm;
      append(out.mesh, patch, {});
      append(out.mesh, patch, {width + spec.gap_mm, 0.0, 0.0});
      const auto row = (spec.ny - 1) / 2;
      const auto a = row * spec.nx + (spec.nx - 1);
      const auto b = spec.nx * spec.ny + row * spec.nx;
      out.mesh.triangles.push_back({a, b + spec.nx, b});
      break;
    }
    case MeshKind::two_hemispheres: {
      const auto sphere = make_icosphere(spec.subdivision, spec.radius_mm);
      const double shift = spec.radius_mm + spec.gap_mm / 2.0;
      append(out.mesh, sphere, {-shift, 0.0, 0.0});
      append(out.mesh, sphere, {shift, 0.0, 0.0});
      VertexLabels hemis;
      hemis.labels.assign(sphere.vertex_count(), 0);
      hemis.labels.resize(2 * sphere.vertex_count(), 1);
      out.hemispheres = std::move(hemis);
      break;
    }
    case MeshKind::atlas: {
      if (spec.regions_x < 1 || spec.regions_y < 1 ||
          spec.regions_x > spec.nx || spec.regions_y > spec.ny) {
        throw std::invalid_argument("atlas regions must fit inside the grid");
      }
      const auto hemisphere = make_grid(spec.nx, spec.ny, spec.spacing_mm);
      const double width = static_cast<double>(spec.nx - 1) * spec.spacing_mm;
      const auto per_hemisphere = spec.regions_x * spec.regions_y;
      VertexLabels regions, hemis;
      for (std::size_t h = 0; h < 2; ++h) {
        append(out.mesh, hemisphere,
               {static_cast<double>(h) * (width + spec.gap_mm), 0.0, 0.0});
        for (std::size_t j = 0; j < spec.ny; ++j) {
          for (std::size_t i = 0; i < spec.nx; ++i) {
            const auto rx = i * spec.regions_x / spec.nx;
            const auto ry = j * spec.regions_y / spec.ny;
            regions.labels.push_back(static_cast<Label>(
                h * per_hemisphere + ry * spec.regions_x + rx));
            hemis.labels.push_back(static_cast<Label>(h));
          }
        }
      }
      out.regions = std::move(regions);
      out.hemispheres = std::move(hemis);
      break;
    }
  }
  perturb_positions(out.mesh, spec.rng_seed, spec.jitter_mm);
  return out;
}

std::vector<Fiber> random_fibers(const TriangleMesh& mesh, std::size_t count,
                                 std::uint64_t seed, bool as_points,
                                 double point_noise_mm) {
  if (mesh.vertices.empty()) {
    throw std::invalid_argument("cannot place fibers on an empty mesh");
  }
  Rng rng(seed);
  auto endpoint = [&]() -> Endpoint {
    const auto v = static_cast<VertexIndex>(
        uniform_index(rng, mesh.vertices.size()));
    if (!as_points) return v;
    auto noise = [&] { return (2.0 * uniform_unit(rng) - 1.0) * point_noise_mm; };
    const auto& p = mesh.vertices[v];
    const double dx = noise(), dy = noise(), dz = noise();
    return Vec3{p.x + dx, p.y + dy, p.z + dz};
  };
  std::vector<Fiber> fibers;
  fibers.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto a = endpoint();
    auto b = endpoint();
    fibers.push_back({a, b});
  }
  return fibers;
}

}  // namespace geosp
