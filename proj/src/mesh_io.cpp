#include "geosp/mesh_io.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/core.h>

#include "text_util.hpp"

namespace geosp {

using detail::is_blank;
using detail::parse_number;
using detail::tokenize;

ParseError::ParseError(const std::filesystem::path& path, std::size_t line,
                       const std::string& what)
    : std::runtime_error(
          line == 0 ? fmt::format("{}: {}", path.string(), what)
                    : fmt::format("{}:{}: {}", path.string(), line, what)),
      line_(line) {}

MeshFormat format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return MeshFormat::off;
  if (ext == ".ply") return MeshFormat::ply;
  throw std::invalid_argument("cannot infer mesh format from extension of '" +
                              path.string() + "' (expected .off or .ply)");
}

namespace {

// Cursor over the significant lines of a text file.
class LineReader {
 public:
  LineReader(const std::filesystem::path& path, std::string_view text,
             bool skip_hash_comments)
      : path_(path), lines_(detail::split_lines(text)),
        skip_comments_(skip_hash_comments) {}

  // Next non-blank line, or nullopt at end of file.
  std::optional<std::string_view> next() {
    while (index_ < lines_.size()) {
      auto line = lines_[index_++];
      if (is_blank(line)) continue;
      if (skip_comments_) {
        auto first = line.find_first_not_of(" \t");
        if (line[first] == '#') continue;
      }
      return line;
    }
    return std::nullopt;
  }

  std::string_view require(const std::string& what) {
    auto line = next();
    if (!line) fail_at_eof("unexpected end of file, expected " + what);
    return *line;
  }

  std::size_t line_number() const { return index_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_, index_, what);
  }
  [[noreturn]] void fail_at_eof(const std::string& what) const {
    throw ParseError(path_, lines_.size(), what);
  }

 private:
  const std::filesystem::path& path_;
  std::vector<std::string_view> lines_;
  bool skip_comments_;
  std::size_t index_ = 0;
};

Vec3 parse_position(LineReader& reader,
                    const std::vector<std::string_view>& tokens,
                    std::size_t offset_x, std::size_t offset_y,
                    std::size_t offset_z) {
  auto coordinate = [&](std::size_t at) {
    auto value = parse_number<double>(tokens[at]);
    if (!value) {
      reader.fail(fmt::format("invalid coordinate '{}'", tokens[at]));
    }
    return *value;
  };
  return {coordinate(offset_x), coordinate(offset_y), coordinate(offset_z)};
}

void check_triangle(LineReader& reader, const Triangle& tri,
                    std::size_t vertex_count) {
  for (auto v : tri) {
    if (v >= vertex_count) {
      reader.fail(fmt::format(
          "face index {} out of range for a mesh with {} vertices", v,
          vertex_count));
    }
  }
  if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
    reader.fail("face repeats a vertex index");
  }
}

Triangle parse_triangle(LineReader& reader,
                        const std::vector<std::string_view>& tokens,
                        std::size_t first) {
  Triangle tri{};
  for (std::size_t c = 0; c < 3; ++c) {
    auto value = parse_number<std::size_t>(tokens[first + c]);
    if (!value) {
      reader.fail(fmt::format("invalid face index '{}'", tokens[first + c]));
    }
    tri[c] = *value;
  }
  return tri;
}

TriangleMesh load_off(const std::filesystem::path& path, std::string_view text) {
  LineReader reader(path, text, true);
  auto header_tokens = tokenize(reader.require("OFF header"));
  if (header_tokens.empty() || header_tokens[0] != "OFF") {
    reader.fail("missing 'OFF' header");
  }
  // Some writers put the counts on the header line.
  std::vector<std::string_view> count_tokens(header_tokens.begin() + 1,
                                             header_tokens.end());
  if (count_tokens.empty()) count_tokens = tokenize(reader.require("counts"));
  if (count_tokens.size() < 2) reader.fail("malformed counts line");
  auto nv = parse_number<std::size_t>(count_tokens[0]);
  auto nf = parse_number<std::size_t>(count_tokens[1]);
  if (!nv || !nf) reader.fail("malformed counts line");
  if (*nv == 0) reader.fail("mesh has no vertices");

  TriangleMesh mesh;
  mesh.vertices.reserve(*nv);
  for (std::size_t i = 0; i < *nv; ++i) {
    auto tokens = tokenize(reader.require("vertex line"));
    if (tokens.size() < 3) reader.fail("vertex line needs three coordinates");
    mesh.vertices.push_back(parse_position(reader, tokens, 0, 1, 2));
  }
  mesh.triangles.reserve(*nf);
  for (std::size_t i = 0; i < *nf; ++i) {
    auto tokens = tokenize(reader.require("face line"));
    auto arity = parse_number<std::size_t>(tokens[0]);
    if (!arity) reader.fail("invalid face vertex count");
    if (*arity != 3) {
      reader.fail(fmt::format("face has {} vertices; only triangles are "
                              "supported",
                              *arity));
    }
    if (tokens.size() < 4) reader.fail("face line needs three indices");
    auto tri = parse_triangle(reader, tokens, 1);
    check_triangle(reader, tri, mesh.vertices.size());
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

bool is_ply_scalar_type(std::string_view type) {
  static constexpr std::string_view types[] = {
      "char",  "uchar", "short",  "ushort",  "int",     "uint",
      "float", "double", "int8",  "uint8",   "int16",   "uint16",
      "int32", "uint32", "float32", "float64"};
  return std::find(std::begin(types), std::end(types), type) !=
         std::end(types);
}

TriangleMesh load_ply(const std::filesystem::path& path, std::string_view text) {
  LineReader reader(path, text, false);
  auto magic = tokenize(reader.require("PLY header"));
  if (magic.size() != 1 || magic[0] != "ply") reader.fail("missing 'ply' magic");

  std::vector<PlyElement> elements;
  bool saw_format = false;
  for (;;) {
    auto tokens = tokenize(reader.require("end_header"));
    if (tokens[0] == "end_header") break;
    if (tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() != 3) reader.fail("malformed format line");
      if (tokens[1] != "ascii") {
        reader.fail(fmt::format("unsupported PLY format '{}'; only ascii is "
                                "accepted",
                                tokens[1]));
      }
      saw_format = true;
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) reader.fail("malformed element line");
      auto count = parse_number<std::size_t>(tokens[2]);
      if (!count) reader.fail("invalid element count");
      elements.push_back({std::string(tokens[1]), *count, {}});
    } else if (tokens[0] == "property") {
      if (elements.empty()) reader.fail("property before any element");
      if (tokens.size() == 3 && is_ply_scalar_type(tokens[1])) {
        elements.back().properties.push_back({std::string(tokens[2]), false});
      } else if (tokens.size() == 5 && tokens[1] == "list" &&
                 is_ply_scalar_type(tokens[2]) &&
                 is_ply_scalar_type(tokens[3])) {
        elements.back().properties.push_back({std::string(tokens[4]), true});
      } else {
        reader.fail("malformed property line");
      }
    } else {
      reader.fail(fmt::format("unknown header keyword '{}'", tokens[0]));
    }
  }
  if (!saw_format) reader.fail("missing format line");

  TriangleMesh mesh;
  bool saw_vertices = false;
  for (const auto& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    std::optional<std::size_t> px, py, pz, pindices;
    for (std::size_t p = 0; p < element.properties.size(); ++p) {
      const auto& prop = element.properties[p];
      if (is_vertex && !prop.is_list) {
        if (prop.name == "x") px = p;
        if (prop.name == "y") py = p;
        if (prop.name == "z") pz = p;
      }
      if (is_face && prop.is_list &&
          (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
        pindices = p;
      }
    }
    if (is_vertex) {
      if (!px || !py || !pz) {
        reader.fail("vertex element lacks x, y, z properties");
      }
      if (element.count == 0) reader.fail("mesh has no vertices");
      saw_vertices = true;
    }
    if (is_face && !pindices) {
      reader.fail("face element lacks a vertex_indices list");
    }

    for (std::size_t i = 0; i < element.count; ++i) {
      auto tokens = tokenize(reader.require(element.name + " line"));
      // Token offset where each property starts.
      std::vector<std::size_t> offsets;
      std::size_t cursor = 0;
      for (const auto& prop : element.properties) {
        if (cursor >= tokens.size()) reader.fail("too few values on line");
        offsets.push_back(cursor);
        if (prop.is_list) {
          auto n = parse_number<std::size_t>(tokens[cursor]);
          if (!n) reader.fail("invalid list length");
          cursor += 1 + *n;
        } else {
          cursor += 1;
        }
      }
      if (cursor != tokens.size()) {
        reader.fail(fmt::format("expected {} values, found {}", cursor,
                                tokens.size()));
      }
      if (is_vertex) {
        mesh.vertices.push_back(
            parse_position(reader, tokens, offsets[*px], offsets[*py],
                           offsets[*pz]));
      } else if (is_face) {
        auto at = offsets[*pindices];
        auto arity = *parse_number<std::size_t>(tokens[at]);
        if (arity != 3) {
          reader.fail(fmt::format("face has {} vertices; only triangles are "
                                  "supported",
                                  arity));
        }
        if (!saw_vertices) reader.fail("face element precedes vertex element");
        auto tri = parse_triangle(reader, tokens, at + 1);
        check_triangle(reader, tri, mesh.vertices.size());
        mesh.triangles.push_back(tri);
      }
    }
  }
  if (!saw_vertices) reader.fail_at_eof("missing vertex element");
  return mesh;
}

std::string format_position(const Vec3& p) {
  return fmt::format("{:.6f} {:.6f} {:.6f}", p.x, p.y, p.z);
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const auto text = detail::read_file(path);
  return format == MeshFormat::off ? load_off(path, text)
                                   : load_ply(path, text);
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  return load_mesh(path, format_from_extension(path));
}

void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
                MeshFormat format) {
  std::string out;
  if (format == MeshFormat::off) {
    out += fmt::format("OFF\n{} {} 0\n", mesh.vertices.size(),
                       mesh.triangles.size());
  } else {
    out += fmt::format(
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\n"
        "property double y\nproperty double z\nelement face {}\n"
        "property list uchar int vertex_indices\nend_header\n",
        mesh.vertices.size(), mesh.triangles.size());
  }
  for (const auto& p : mesh.vertices) {
    out += format_position(p);
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += fmt::format("3 {} {} {}\n", t[0], t[1], t[2]);
  }
  detail::write_file(path, out);
}

VertexLabels load_labels(const std::filesystem::path& path,
                         std::optional<std::size_t> expected_count) {
  const auto text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  VertexLabels result;
  result.labels.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tokens = tokenize(lines[i]);
    std::optional<Label> value;
    if (tokens.size() == 1) value = parse_number<Label>(tokens[0]);
    if (!value) {
      throw ParseError(path, i + 1,
                       fmt::format("expected a non-negative integer label, "
                                   "found '{}'",
                                   lines[i]));
    }
    result.labels.push_back(*value);
  }
  if (expected_count && result.labels.size() != *expected_count) {
    throw ParseError(path, 0,
                     fmt::format("label count {} does not match vertex count "
                                 "{}",
                                 result.labels.size(), *expected_count));
  }
  return result;
}

void write_labels(const std::filesystem::path& path,
                  const VertexLabels& labels) {
  std::string out;
  out.reserve(labels.size() * 4);
  for (auto l : labels.labels) {
    out += std::to_string(l);
    out += '\n';
  }
  detail::write_file(path, out);
}

Rgb parcel_color(std::size_t sub_parcel_id) {
  // Every step is a bijection on 24-bit integers.
  constexpr std::uint32_t mask = 0xFFFFFF;
  std::uint32_t h = static_cast<std::uint32_t>(sub_parcel_id) & mask;
  h = (h * 0x9E3779u + 0x3C6EF3u) & mask;
  h ^= h >> 11;
  h = (h * 0x5BD1E9u) & mask;
  h ^= h >> 13;
  return {static_cast<std::uint8_t>(h >> 16),
          static_cast<std::uint8_t>((h >> 8) & 0xFF),
          static_cast<std::uint8_t>(h & 0xFF)};
}

void write_parcellation(const std::filesystem::path& directory,
                        const Parcellation& parcellation,
                        const TriangleMesh& mesh) {
  if (parcellation.vertex_count() != mesh.vertex_count()) {
    throw std::invalid_argument(fmt::format(
        "parcellation covers {} vertices but the mesh has {}",
        parcellation.vertex_count(), mesh.vertex_count()));
  }
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw IoError("cannot create directory '" + directory.string() +
                  "': " + ec.message());
  }

  std::string labels;
  for (auto id : parcellation.sub_parcel) {
    labels += std::to_string(id);
    labels += '\n';
  }
  detail::write_file(directory / "parcellation.txt", labels);

  std::string ply = fmt::format(
      "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\n"
      "property double y\nproperty double z\nproperty uchar red\n"
      "property uchar green\nproperty uchar blue\nelement face {}\n"
      "property list uchar int vertex_indices\nend_header\n",
      mesh.vertices.size(), mesh.triangles.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const auto color = parcel_color(parcellation.sub_parcel[v]);
    ply += fmt::format("{} {} {} {}\n", format_position(mesh.vertices[v]),
                       color[0], color[1], color[2]);
  }
  for (const auto& t : mesh.triangles) {
    ply += fmt::format("3 {} {} {}\n", t[0], t[1], t[2]);
  }
  detail::write_file(directory / "parcellation.ply", ply);
}

}  // namespace geosp
