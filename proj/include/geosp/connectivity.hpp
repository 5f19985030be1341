#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "geosp/mesh.hpp"
#include "geosp/parcellation.hpp"

namespace geosp {

// A fiber endpoint is either a mesh vertex or a point in mesh space (mm).
using Endpoint = std::variant<VertexIndex, Vec3>;

struct Fiber {
  Endpoint a;
  Endpoint b;
};

// One fiber per line: "v:i v:j" or "p:x,y,z p:x,y,z" (forms may be mixed).
std::vector<Fiber> load_fibers(const std::filesystem::path& path);
void write_fibers(const std::filesystem::path& path,
                  std::span<const Fiber> fibers);

// Exact nearest-vertex queries over a uniform grid of buckets. Ties go to
// the smallest vertex index.
class VertexLocator {
 public:
  explicit VertexLocator(const TriangleMesh& mesh);

  VertexIndex nearest(const Vec3& point) const;

 private:
  std::size_t bucket_of(long ix, long iy, long iz) const;

  std::vector<Vec3> positions_;
  Vec3 origin_;
  double cell_ = 1.0;
  long nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<std::size_t> bucket_start_;
  std::vector<VertexIndex> bucket_vertices_;
};

VertexIndex map_endpoint_to_vertex(const Vec3& point, const TriangleMesh& mesh);

// Square matrix of counts in row-major order. Symmetric by construction
// when built from fibers.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, T{}) {}

  std::size_t size() const { return n_; }
  T& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using ConnectivityMatrix = SquareMatrix<std::uint64_t>;
using BinaryConnectivity = SquareMatrix<std::uint8_t>;

ConnectivityMatrix build_connectivity_matrix(std::span<const Fiber> fibers,
                                             const Parcellation& parcellation,
                                             const TriangleMesh& mesh);

BinaryConnectivity binarize(const ConnectivityMatrix& counts);

// Upper-triangle edge sets; Dice of two empty sets is 1.
double dice_coefficient(const BinaryConnectivity& a, const BinaryConnectivity& b,
                        bool include_diagonal = true);

struct DicePair {
  std::size_t first = 0;
  std::size_t second = 0;
  double dice = 0.0;
};

struct DiceSummary {
  std::vector<DicePair> pairs;  // (0,1), (0,2), ..., (n-2,n-1)
  double mean = 0.0;
  double median = 0.0;
};

DiceSummary pairwise_dice(std::span<const BinaryConnectivity> matrices,
                          bool include_diagonal = true, std::size_t workers = 1);

// Text report: one "i j dice" line per pair, then mean and median, all to
// four decimal places.
std::string format_dice_report(const DiceSummary& summary);

// Matrix text format: a line with P, then P rows of space-separated values.
void write_matrix(const std::filesystem::path& path,
                  const ConnectivityMatrix& matrix);
void write_matrix(const std::filesystem::path& path,
                  const BinaryConnectivity& matrix);
ConnectivityMatrix load_matrix(const std::filesystem::path& path);

}  // namespace geosp
