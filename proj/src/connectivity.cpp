#include "geosp/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/core.h>

#include "geosp/mesh_io.hpp"
#include "geosp/parallel.hpp"
#include "text_util.hpp"

namespace geosp {

namespace {

std::optional<Endpoint> parse_endpoint(std::string_view token) {
  if (token.size() < 3 || token[1] != ':') return std::nullopt;
  const auto body = token.substr(2);
  if (token[0] == 'v') {
    auto v = detail::parse_number<VertexIndex>(body);
    if (!v) return std::nullopt;
    return Endpoint{*v};
  }
  if (token[0] == 'p') {
    double xyz[3];
    std::size_t start = 0;
    for (int c = 0; c < 3; ++c) {
      const auto comma = body.find(',', start);
      const bool last = c == 2;
      if (last != (comma == std::string_view::npos)) return std::nullopt;
      const auto piece = body.substr(
          start, last ? std::string_view::npos : comma - start);
      auto value = detail::parse_number<double>(piece);
      if (!value) return std::nullopt;
      xyz[c] = *value;
      start = comma + 1;
    }
    return Endpoint{Vec3{xyz[0], xyz[1], xyz[2]}};
  }
  return std::nullopt;
}

std::string format_endpoint(const Endpoint& e) {
  if (const auto* v = std::get_if<VertexIndex>(&e)) return fmt::format("v:{}", *v);
  const auto& p = std::get<Vec3>(e);
  return fmt::format("p:{:.6f},{:.6f},{:.6f}", p.x, p.y, p.z);
}

}  // namespace

std::vector<Fiber> load_fibers(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  std::vector<Fiber> fibers;
  fibers.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tokens = detail::tokenize(lines[i]);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    std::optional<Endpoint> a, b;
    if (tokens.size() == 2) {
      a = parse_endpoint(tokens[0]);
      b = parse_endpoint(tokens[1]);
    }
    if (!a || !b) {
      throw ParseError(path, i + 1,
                       "expected two endpoints of the form v:i or p:x,y,z");
    }
    fibers.push_back({*a, *b});
  }
  return fibers;
}

void write_fibers(const std::filesystem::path& path,
                  std::span<const Fiber> fibers) {
  std::string out;
  for (const auto& f : fibers) {
    out += format_endpoint(f.a);
    out += ' ';
    out += format_endpoint(f.b);
    out += '\n';
  }
  detail::write_file(path, out);
}

VertexLocator::VertexLocator(const TriangleMesh& mesh)
    : positions_(mesh.vertices) {
  if (positions_.empty()) {
    throw std::invalid_argument("cannot locate vertices of an empty mesh");
  }
  Vec3 lo = positions_.front();
  Vec3 hi = lo;
  for (const auto& p : positions_) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  origin_ = lo;
  const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  const auto n = positions_.size();
  auto cells_along = [](double span, double cell) {
    return std::max<long>(1, static_cast<long>(std::ceil(span / cell)));
  };
  // Shrink cells until there are about two vertices per occupied cell.
  cell_ = extent > 0.0 ? extent : 1.0;
  for (int step = 0; step < 200; ++step) {
    const double next = cell_ / 1.25;
    const auto count = static_cast<double>(cells_along(hi.x - lo.x, next)) *
                       static_cast<double>(cells_along(hi.y - lo.y, next)) *
                       static_cast<double>(cells_along(hi.z - lo.z, next));
    if (count > static_cast<double>(n) / 2.0 || extent == 0.0) break;
    cell_ = next;
  }
  nx_ = cells_along(hi.x - lo.x, cell_);
  ny_ = cells_along(hi.y - lo.y, cell_);
  nz_ = cells_along(hi.z - lo.z, cell_);

  auto cell_index = [&](double value, double base, long count) {
    const auto i = static_cast<long>(std::floor((value - base) / cell_));
    return std::clamp<long>(i, 0, count - 1);
  };
  std::vector<std::size_t> bucket(n);
  bucket_start_.assign(static_cast<std::size_t>(nx_ * ny_ * nz_) + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& p = positions_[v];
    bucket[v] = bucket_of(cell_index(p.x, lo.x, nx_), cell_index(p.y, lo.y, ny_),
                          cell_index(p.z, lo.z, nz_));
    ++bucket_start_[bucket[v] + 1];
  }
  for (std::size_t b = 1; b < bucket_start_.size(); ++b) {
    bucket_start_[b] += bucket_start_[b - 1];
  }
  bucket_vertices_.resize(n);
  std::vector<std::size_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
  for (std::size_t v = 0; v < n; ++v) bucket_vertices_[fill[bucket[v]]++] = v;
}

std::size_t VertexLocator::bucket_of(long ix, long iy, long iz) const {
  return static_cast<std::size_t>((iz * ny_ + iy) * nx_ + ix);
}

VertexIndex VertexLocator::nearest(const Vec3& point) const {
  auto cell_index = [&](double value, double base, long count) {
    const double scaled = std::floor((value - base) / cell_);
    if (!(scaled > 0.0)) return 0L;
    if (scaled >= static_cast<double>(count - 1)) return count - 1;
    return static_cast<long>(scaled);
  };
  const long cx = cell_index(point.x, origin_.x, nx_);
  const long cy = cell_index(point.y, origin_.y, ny_);
  const long cz = cell_index(point.z, origin_.z, nz_);

  VertexIndex best = positions_.size();
  double best_sq = std::numeric_limits<double>::infinity();
  const long max_ring = std::max({nx_, ny_, nz_});
  for (long r = 0; r <= max_ring; ++r) {
    for (long z = cz - r; z <= cz + r; ++z) {
      if (z < 0 || z >= nz_) continue;
      for (long y = cy - r; y <= cy + r; ++y) {
        if (y < 0 || y >= ny_) continue;
        for (long x = cx - r; x <= cx + r; ++x) {
          if (x < 0 || x >= nx_) continue;
          if (std::max({std::labs(x - cx), std::labs(y - cy), std::labs(z - cz)}) != r) {
            continue;
          }
          const auto b = bucket_of(x, y, z);
          for (auto i = bucket_start_[b]; i < bucket_start_[b + 1]; ++i) {
            const auto v = bucket_vertices_[i];
            const double d = squared_distance(point, positions_[v]);
            if (d < best_sq || (d == best_sq && v < best)) {
              best_sq = d;
              best = v;
            }
          }
        }
      }
    }
    // Every vertex outside rings 0..r lies at least r cells away; half a
    // cell of slack covers rounding in the bucket assignment.
    const double bound = (static_cast<double>(r) - 0.5) * cell_;
    if (best != positions_.size() && bound > 0.0 && bound * bound > best_sq) {
      break;
    }
  }
  return best;
}

VertexIndex map_endpoint_to_vertex(const Vec3& point, const TriangleMesh& mesh) {
  return VertexLocator(mesh).nearest(point);
}

ConnectivityMatrix build_connectivity_matrix(std::span<const Fiber> fibers,
                                             const Parcellation& parcellation,
                                             const TriangleMesh& mesh) {
  if (parcellation.vertex_count() != mesh.vertex_count()) {
    throw std::invalid_argument(fmt::format(
        "parcellation covers {} vertices but the mesh has {}",
        parcellation.vertex_count(), mesh.vertex_count()));
  }
  const auto p = parcellation.parcel_count();
  ConnectivityMatrix counts(p);
  std::optional<VertexLocator> locator;
  auto parcel_of = [&](const Endpoint& e) {
    VertexIndex v;
    if (const auto* index = std::get_if<VertexIndex>(&e)) {
      v = *index;
      if (v >= mesh.vertex_count()) {
        throw std::out_of_range(fmt::format(
            "fiber endpoint v:{} outside a mesh of {} vertices", v,
            mesh.vertex_count()));
      }
    } else {
      if (!locator) locator.emplace(mesh);
      v = locator->nearest(std::get<Vec3>(e));
    }
    return parcellation.sub_parcel[v];
  };
  for (const auto& fiber : fibers) {
    const auto a = parcel_of(fiber.a);
    const auto b = parcel_of(fiber.b);
    ++counts.at(a, b);
    if (a != b) ++counts.at(b, a);
  }
  return counts;
}

BinaryConnectivity binarize(const ConnectivityMatrix& counts) {
  BinaryConnectivity binary(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      binary.at(i, j) = counts.at(i, j) > 0 ? 1 : 0;
    }
  }
  return binary;
}

double dice_coefficient(const BinaryConnectivity& a, const BinaryConnectivity& b,
                        bool include_diagonal) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(fmt::format(
        "cannot compare a {0}x{0} matrix with a {1}x{1} matrix", a.size(),
        b.size()));
  }
  std::size_t size_a = 0, size_b = 0, shared = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = include_diagonal ? i : i + 1; j < a.size(); ++j) {
      const bool in_a = a.at(i, j) != 0;
      const bool in_b = b.at(i, j) != 0;
      size_a += in_a;
      size_b += in_b;
      shared += in_a && in_b;
    }
  }
  if (size_a + size_b == 0) return 1.0;
  return 2.0 * static_cast<double>(shared) /
         static_cast<double>(size_a + size_b);
}

DiceSummary pairwise_dice(std::span<const BinaryConnectivity> matrices,
                          bool include_diagonal, std::size_t workers) {
  if (matrices.size() < 2) {
    throw std::invalid_argument("pairwise Dice needs at least two matrices");
  }
  for (const auto& m : matrices) {
    if (m.size() != matrices.front().size()) {
      throw std::invalid_argument("matrices differ in dimension");
    }
  }
  DiceSummary summary;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    for (std::size_t j = i + 1; j < matrices.size(); ++j) {
      summary.pairs.push_back({i, j, 0.0});
    }
  }
  parallel_for(summary.pairs.size(), workers, [&](std::size_t p) {
    auto& pair = summary.pairs[p];
    pair.dice = dice_coefficient(matrices[pair.first], matrices[pair.second],
                                 include_diagonal);
  });

  std::vector<double> values;
  values.reserve(summary.pairs.size());
  for (const auto& pair : summary.pairs) values.push_back(pair.dice);
  double total = 0.0;
  for (auto v : values) total += v;
  summary.mean = total / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  summary.median = values.size() % 2 == 1
                       ? values[mid]
                       : 0.5 * (values[mid - 1] + values[mid]);
  return summary;
}

std::string format_dice_report(const DiceSummary& summary) {
  std::string out = "# subject_a subject_b dice\n";
  for (const auto& pair : summary.pairs) {
    out += fmt::format("{} {} {:.4f}\n", pair.first, pair.second, pair.dice);
  }
  out += fmt::format("mean {:.4f}\nmedian {:.4f}\n", summary.mean,
                     summary.median);
  return out;
}

namespace {

template <typename T>
void write_square(const std::filesystem::path& path,
                  const SquareMatrix<T>& matrix) {
  std::string out = fmt::format("{}\n", matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (j > 0) out += ' ';
      out += std::to_string(static_cast<std::uint64_t>(matrix.at(i, j)));
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

}  // namespace

void write_matrix(const std::filesystem::path& path,
                  const ConnectivityMatrix& matrix) {
  write_square(path, matrix);
}

void write_matrix(const std::filesystem::path& path,
                  const BinaryConnectivity& matrix) {
  write_square(path, matrix);
}

ConnectivityMatrix load_matrix(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(path, 0, "empty matrix file");
  const auto header = detail::tokenize(lines[0]);
  std::optional<std::size_t> p;
  if (header.size() == 1) p = detail::parse_number<std::size_t>(header[0]);
  if (!p) throw ParseError(path, 1, "expected the matrix dimension P");
  if (lines.size() < *p + 1) {
    throw ParseError(path, lines.size(),
                     fmt::format("expected {} matrix rows", *p));
  }
  ConnectivityMatrix matrix(*p);
  for (std::size_t i = 0; i < *p; ++i) {
    const auto tokens = detail::tokenize(lines[i + 1]);
    if (tokens.size() != *p) {
      throw ParseError(path, i + 2,
                       fmt::format("expected {} values, found {}", *p,
                                   tokens.size()));
    }
    for (std::size_t j = 0; j < *p; ++j) {
      auto value = detail::parse_number<std::uint64_t>(tokens[j]);
      if (!value) {
        throw ParseError(path, i + 2,
                         fmt::format("invalid count '{}'", tokens[j]));
      }
      matrix.at(i, j) = *value;
    }
  }
  for (std::size_t i = *p + 1; i < lines.size(); ++i) {
    if (!detail::is_blank(lines[i])) {
      throw ParseError(path, i + 1, "unexpected content after matrix rows");
    }
  }
  return matrix;
}

}  // namespace geosp
