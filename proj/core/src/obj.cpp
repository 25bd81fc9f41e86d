#include "gpsim/obj.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "gpsim/error.hpp"

namespace gpsim {
namespace {

constexpr std::string_view kWhitespace = " \t\r\f\v";

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (true) {
    pos = line.find_first_not_of(kWhitespace, pos);
    if (pos == std::string_view::npos) break;
    std::size_t end = line.find_first_of(kWhitespace, pos);
    if (end == std::string_view::npos) end = line.size();
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

double parse_real(std::string_view token, std::size_t line) {
  // from_chars rejects a leading '+', which some exporters emit.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size()) {
    throw ParseError(ErrorKind::Parse, line, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

// Resolves a 1-based (or negative, relative) OBJ index against `count` entries.
std::uint32_t resolve_index(std::string_view token, std::size_t count, std::size_t line,
                            std::string_view what) {
  long long raw = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), raw);
  if (ec != std::errc() || end != token.data() + token.size()) {
    throw ParseError(ErrorKind::Parse, line,
                     "malformed " + std::string(what) + " index '" + std::string(token) + "'");
  }
  long long resolved = raw > 0 ? raw - 1 : static_cast<long long>(count) + raw;
  if (raw == 0 || resolved < 0 || resolved >= static_cast<long long>(count)) {
    throw ParseError(ErrorKind::Parse, line,
                     std::string(what) + " index " + std::string(token) + " out of range (" +
                         std::to_string(count) + " defined)");
  }
  return static_cast<std::uint32_t>(resolved);
}

ObjCorner parse_corner(std::string_view token, const RawMesh& mesh, std::size_t line) {
  std::string_view parts[3];
  int n = 0;
  std::size_t start = 0;
  while (true) {
    if (n == 3) {
      throw ParseError(ErrorKind::Parse, line, "malformed face corner '" + std::string(token) + "'");
    }
    std::size_t slash = token.find('/', start);
    parts[n++] = token.substr(start, slash == std::string_view::npos ? slash : slash - start);
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (n < 2 || parts[1].empty()) {
    throw ParseError(ErrorKind::Parse, line,
                     "face corner '" + std::string(token) + "' has no texture coordinate");
  }
  ObjCorner corner;
  corner.position = resolve_index(parts[0], mesh.positions.size(), line, "vertex");
  corner.uv = resolve_index(parts[1], mesh.uv_pool.size(), line, "texture");
  if (n == 3 && !parts[2].empty()) {
    corner.normal = resolve_index(parts[2], mesh.normal_count, line, "normal");
  }
  return corner;
}

void require_fields(const std::vector<std::string_view>& tokens, std::size_t n,
                    std::size_t line) {
  if (tokens.size() < n + 1) {
    throw ParseError(ErrorKind::Parse, line,
                     "'" + std::string(tokens[0]) + "' record needs " + std::to_string(n) +
                         " values");
  }
}

void append_number(std::string& out, double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, end);
}

}  // namespace

RawMesh parse_obj(std::string_view text) {
  RawMesh mesh;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tokens = split_tokens(line);
    if (tokens.empty()) continue;

    std::string_view key = tokens[0];
    if (key == "v") {
      require_fields(tokens, 3, line_no);
      mesh.positions.emplace_back(parse_real(tokens[1], line_no), parse_real(tokens[2], line_no),
                                  parse_real(tokens[3], line_no));
    } else if (key == "vt") {
      require_fields(tokens, 2, line_no);
      mesh.uv_pool.emplace_back(parse_real(tokens[1], line_no), parse_real(tokens[2], line_no));
    } else if (key == "vn") {
      require_fields(tokens, 3, line_no);
      for (int i = 1; i <= 3; ++i) parse_real(tokens[i], line_no);
      ++mesh.normal_count;
    } else if (key == "f") {
      if (tokens.size() < 4) {
        throw ParseError(ErrorKind::Parse, line_no, "face needs at least 3 corners");
      }
      std::vector<ObjCorner> corners;
      corners.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        corners.push_back(parse_corner(tokens[i], mesh, line_no));
      }
      mesh.faces.push_back(std::move(corners));
    }
    // Other records (o, g, s, mtllib, usemtl, l, ...) carry nothing the metric uses.
  }
  return mesh;
}

Mesh wedge_split(const RawMesh& raw) {
  Mesh mesh;
  std::unordered_map<std::uint64_t, VertexId> wedges;
  std::vector<bool> referenced(raw.positions.size(), false);

  auto vertex_for = [&](const ObjCorner& c) {
    std::uint64_t key = (std::uint64_t{c.position} << 32) | c.uv;
    auto [it, inserted] = wedges.try_emplace(key, static_cast<VertexId>(mesh.vertices.size()));
    if (inserted) {
      mesh.vertices.push_back(raw.positions[c.position]);
      mesh.uv.push_back(raw.uv_pool[c.uv]);
      referenced[c.position] = true;
    }
    return it->second;
  };

  std::vector<VertexId> ids;
  for (const auto& polygon : raw.faces) {
    ids.clear();
    for (const ObjCorner& c : polygon) ids.push_back(vertex_for(c));
    for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
      mesh.faces.push_back({ids[0], ids[k], ids[k + 1]});
    }
  }
  for (std::size_t p = 0; p < raw.positions.size(); ++p) {
    if (!referenced[p]) {
      mesh.vertices.push_back(raw.positions[p]);
      mesh.uv.emplace_back(0.0, 0.0);
    }
  }
  return mesh;
}

std::string serialize_obj(const Mesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 32);
  for (const Vec3& p : mesh.vertices) {
    out += "v ";
    append_number(out, p.x());
    out += ' ';
    append_number(out, p.y());
    out += ' ';
    append_number(out, p.z());
    out += '\n';
  }
  for (const Vec2& t : mesh.uv) {
    out += "vt ";
    append_number(out, t.x());
    out += ' ';
    append_number(out, t.y());
    out += '\n';
  }
  for (const Face& f : mesh.faces) {
    out += 'f';
    for (VertexId v : f) {
      std::string idx = std::to_string(v + 1);
      out += ' ';
      out += idx;
      out += '/';
      out += idx;
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failed for '" + path.string() + "'");
  return std::move(ss).str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  return {text.begin(), text.end()};
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return wedge_split(parse_obj(text));
  } catch (const ParseError& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace gpsim
