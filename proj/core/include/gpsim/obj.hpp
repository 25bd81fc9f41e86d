#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpsim/mesh.hpp"

namespace gpsim {

// One polygon corner of an OBJ `f` record, with 0-based absolute indices.
struct ObjCorner {
  std::uint32_t position = 0;
  std::uint32_t uv = 0;
  std::optional<std::uint32_t> normal;

  friend bool operator==(const ObjCorner&, const ObjCorner&) = default;
};

// Mesh exactly as stored in an OBJ file: positions and texture coordinates
// live in separate pools and faces index them per corner.
struct RawMesh {
  std::vector<Vec3> positions;
  std::vector<Vec2> uv_pool;
  std::size_t normal_count = 0;
  std::vector<std::vector<ObjCorner>> faces;
};

// Parses the `v`/`vt`/`vn`/`f` subset of Wavefront OBJ. Every face corner must
// carry a texture coordinate. Throws ParseError with the offending line.
RawMesh parse_obj(std::string_view text);

// Splits every distinct (position, uv) corner pairing into its own vertex and
// fan-triangulates polygons from their first corner. Positions that no face
// references are kept (appended, with uv (0,0)) so that cleaning can report them.
Mesh wedge_split(const RawMesh& raw);

// Canonical OBJ text: one `v` and one `vt` per vertex, faces as `f a/a b/b c/c`.
// Numbers use the shortest representation that round-trips exactly.
std::string serialize_obj(const Mesh& mesh);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// read + parse_obj + wedge_split.
Mesh load_mesh(const std::filesystem::path& path);

}  // namespace gpsim
