#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace geosp {

using VertexIndex = std::size_t;
using Label = std::uint32_t;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt(squared_distance(a, b));
}

using Triangle = std::array<VertexIndex, 3>;

// Vertex positions are in millimeters.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  std::size_t vertex_count() const { return vertices.size(); }
};

// Throws std::invalid_argument describing the first violated invariant.
void validate(const TriangleMesh& mesh);

// One region identifier per vertex.
struct VertexLabels {
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  Label operator[](std::size_t i) const { return labels[i]; }
};

// Distinct labels in ascending order.
std::vector<Label> distinct_labels(const VertexLabels& labels);

}  // namespace geosp
