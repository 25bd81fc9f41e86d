#include "gpsim/tools/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "gpsim/error.hpp"
#include "gpsim/obj.hpp"

namespace gpsim::fixtures {
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Box-Muller on raw 64-bit draws, so the bytes do not depend on the standard
// library's distribution implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Vec3 face_normal(const Vec3& a, const Vec3& b, const Vec3& c) { return (b - a).cross(c - a); }

std::string noise_name(int level) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "textures/noise_%02d.png", level);
  return buf;
}

std::string decimated_name(int percent) {
  return "meshes/ico" + std::to_string(kLadderSubdivisions) + "_dec" + std::to_string(percent) +
         ".obj";
}

std::string ladder_reference() { return "meshes/ico" + std::to_string(kLadderSubdivisions) + ".obj"; }

}  // namespace

Mesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pos = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : pos) p.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<VertexId, VertexId>, VertexId> midpoint;
    auto mid = [&](VertexId a, VertexId b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = midpoint.try_emplace({key.first, key.second}, 0);
      if (inserted) {
        it->second = static_cast<VertexId>(pos.size());
        pos.push_back((pos[a] + pos[b]).normalized());
      }
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const VertexId ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  Mesh mesh;
  mesh.faces = std::move(faces);
  for (const Vec3& p : pos) {
    mesh.vertices.push_back(p * radius);
    mesh.uv.emplace_back((p.x() + 1.0) / 2.0, (p.y() + 1.0) / 2.0);
  }
  return mesh;
}

Mesh planar_grid(int cells, double size) {
  Mesh mesh;
  const int n = cells + 1;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / cells, v = static_cast<double>(j) / cells;
      mesh.vertices.emplace_back(u * size, v * size, 0.0);
      mesh.uv.emplace_back(u, v);
    }
  }
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const auto a = static_cast<VertexId>(j * n + i);
      const VertexId b = a + 1, c = a + 1 + n, d = a + n;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }
  return mesh;
}

std::string seamed_cube_obj() {
  // Four side faces in a horizontal strip, top and bottom attached to the
  // front one. The strip's two ends form the seam.
  std::string obj = "# unit cube, cross unwrap\n";
  const char* positions[] = {"-0.5 -0.5 0.5",  "0.5 -0.5 0.5",  "0.5 0.5 0.5",  "-0.5 0.5 0.5",
                             "-0.5 -0.5 -0.5", "0.5 -0.5 -0.5", "0.5 0.5 -0.5", "-0.5 0.5 -0.5"};
  for (const char* p : positions) obj += std::string("v ") + p + '\n';
  auto vt = [&](int x, int y) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "vt %.17g %.17g\n", x / 4.0, y / 3.0);
    obj += buf;
  };
  for (int y : {1, 2}) {
    for (int x = 0; x <= 4; ++x) vt(x, y);
  }
  vt(0, 3);
  vt(1, 3);
  vt(0, 0);
  vt(1, 0);
  obj +=
      "f 1/1 2/2 3/7 4/6\n"      // front
      "f 2/2 6/3 7/8 3/7\n"      // right
      "f 6/3 5/4 8/9 7/8\n"      // back
      "f 5/4 1/5 4/10 8/9\n"     // left
      "f 4/6 3/7 7/12 8/11\n"    // top
      "f 5/13 6/14 2/2 1/1\n";   // bottom
  return obj;
}

std::string dirty_grid_obj() {
  const Mesh grid = planar_grid(4);
  std::string obj = "# 4x4 grid with injected defects\n";
  char buf[96];
  for (const Vec3& p : grid.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    obj += buf;
  }
  // Copies of interior vertices 7, 13 and 19 (1-based), then two strays.
  for (int v : {7, 13, 19}) {
    const Vec3& p = grid.vertices[static_cast<std::size_t>(v - 1)];
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    obj += buf;
  }
  obj += "v 9 9 9\nv -9 -9 9\n";
  for (const Vec2& t : grid.uv) {
    std::snprintf(buf, sizeof(buf), "vt %.17g %.17g\n", t.x(), t.y());
    obj += buf;
  }

  auto corner = [](VertexId pos, VertexId uv) {
    return std::to_string(pos) + '/' + std::to_string(uv);
  };
  const std::map<VertexId, VertexId> redirect = {{7, 26}, {13, 27}, {19, 28}};
  std::set<std::size_t> redirected_faces = {2 * (1 * 4 + 1), 2 * (2 * 4 + 2), 2 * (3 * 4 + 3)};
  for (std::size_t fi = 0; fi < grid.faces.size(); ++fi) {
    obj += 'f';
    for (VertexId v0 : grid.faces[fi]) {
      const VertexId v = v0 + 1;
      auto it = redirect.find(v);
      const bool swap = redirected_faces.count(fi) && it != redirect.end();
      obj += ' ' + corner(swap ? it->second : v, v);
    }
    obj += '\n';
  }
  obj += "f 1/1 2/2 7/7\n";     // repeat of the first face
  obj += "f 10/10 9/9 4/4\n";   // repeat of face 8, rotated
  obj += "f 1/1 1/1 2/2\n";     // null face
  return obj;
}

Mesh decimate(const Mesh& input, std::size_t target_faces) {
  Mesh mesh = input;
  const std::size_t nv = mesh.vertices.size();
  std::vector<char> alive(mesh.faces.size(), 1);
  std::size_t alive_count = mesh.faces.size();
  std::vector<std::vector<std::uint32_t>> vertex_faces(nv);
  for (std::uint32_t fi = 0; fi < mesh.faces.size(); ++fi) {
    for (VertexId v : mesh.faces[fi]) vertex_faces[v].push_back(fi);
  }
  auto ring = [&](VertexId v) {
    std::set<VertexId> out;
    for (std::uint32_t fi : vertex_faces[v]) {
      if (!alive[fi]) continue;
      for (VertexId w : mesh.faces[fi]) {
        if (w != v) out.insert(w);
      }
    }
    return out;
  };
  auto contains = [](const Face& f, VertexId v) { return f[0] == v || f[1] == v || f[2] == v; };

  auto try_collapse = [&](VertexId u, VertexId v) {
    const auto ru = ring(u), rv = ring(v);
    std::vector<VertexId> common;
    std::set_intersection(ru.begin(), ru.end(), rv.begin(), rv.end(), std::back_inserter(common));
    if (common.size() != 2) return false;
    const Vec3 p = 0.5 * (mesh.vertices[u] + mesh.vertices[v]);
    for (VertexId w : {u, v}) {
      for (std::uint32_t fi : vertex_faces[w]) {
        const Face& f = mesh.faces[fi];
        if (!alive[fi] || (contains(f, u) && contains(f, v))) continue;
        std::array<Vec3, 3> moved;
        for (int k = 0; k < 3; ++k) moved[k] = f[k] == w ? p : mesh.vertices[f[k]];
        const Vec3 before =
            face_normal(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
        const Vec3 after = face_normal(moved[0], moved[1], moved[2]);
        if (!(after.dot(before) > 0.0)) return false;
      }
    }
    mesh.vertices[u] = p;
    mesh.uv[u] = 0.5 * (mesh.uv[u] + mesh.uv[v]);
    for (std::uint32_t fi : vertex_faces[v]) {
      if (!alive[fi]) continue;
      Face& f = mesh.faces[fi];
      if (contains(f, u)) {
        alive[fi] = 0;
        --alive_count;
      } else {
        for (VertexId& w : f) {
          if (w == v) w = u;
        }
        vertex_faces[u].push_back(fi);
      }
    }
    vertex_faces[v].clear();
    return true;
  };

  // Rounds of independent collapses: an edge is taken only if no vertex in
  // either one-ring changed earlier in the round, so its length is current.
  while (alive_count > target_faces) {
    std::vector<std::tuple<double, VertexId, VertexId>> edges;
    for (std::uint32_t fi = 0; fi < mesh.faces.size(); ++fi) {
      if (!alive[fi]) continue;
      const Face& f = mesh.faces[fi];
      for (int k = 0; k < 3; ++k) {
        const VertexId a = f[k], b = f[(k + 1) % 3];
        if (a < b) edges.emplace_back((mesh.vertices[a] - mesh.vertices[b]).squaredNorm(), a, b);
      }
    }
    std::sort(edges.begin(), edges.end());
    std::vector<char> touched(nv, 0);
    bool progressed = false;
    for (const auto& [len, a, b] : edges) {
      if (alive_count <= target_faces) break;
      if (touched[a] || touched[b]) continue;
      const auto ra = ring(a), rb = ring(b);
      if (!try_collapse(a, b)) continue;
      progressed = true;
      touched[a] = touched[b] = 1;
      for (VertexId w : ra) touched[w] = 1;
      for (VertexId w : rb) touched[w] = 1;
    }
    if (!progressed) break;
  }

  Mesh out;
  std::vector<VertexId> remap(nv, 0);
  std::vector<char> used(nv, 0);
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    if (!alive[fi]) continue;
    for (VertexId v : mesh.faces[fi]) used[v] = 1;
  }
  for (VertexId v = 0; v < nv; ++v) {
    if (!used[v]) continue;
    remap[v] = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[v]);
    out.uv.push_back(mesh.uv[v]);
  }
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    if (!alive[fi]) continue;
    const Face& f = mesh.faces[fi];
    out.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  return out;
}

TextureImage checker_texture(int size, int cell) {
  TextureImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool odd = ((x / cell) + (y / cell)) % 2 != 0;
      img.set(x, y, odd ? Rgb{220, 40, 40} : Rgb{30, 60, 200});
    }
  }
  return img;
}

TextureImage uniform_texture(int width, int height, Rgb color) {
  TextureImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) img.set(x, y, color);
  }
  return img;
}

TextureImage smooth_texture(int size) {
  TextureImage img(size, size);
  const double span = size - 1;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double s = std::sin(2.0 * std::numbers::pi * 3.0 * (x + y) / (2.0 * span));
      img.set(x, y, {to_byte(40.0 + 175.0 * x / span), to_byte(40.0 + 175.0 * y / span),
                     to_byte(128.0 + 80.0 * s)});
    }
  }
  return img;
}

TextureImage add_gaussian_noise(const TextureImage& image, double sigma, std::uint64_t seed) {
  TextureImage out = image;
  if (sigma == 0.0) return out;
  GaussianSource noise(seed);
  for (std::uint8_t& c : out.pixels) c = to_byte(c + sigma * noise.next());
  return out;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<CorpusFile> write_corpus(const std::filesystem::path& dir, std::uint64_t seed) {
  try {
    std::filesystem::create_directories(dir / "meshes");
    std::filesystem::create_directories(dir / "textures");
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorKind::Io, "cannot create fixture directory: " + std::string(e.what()));
  }

  std::vector<CorpusFile> files;
  auto emit = [&](const std::string& rel, std::span<const std::uint8_t> bytes) {
    write_file(dir / rel, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    files.push_back({rel, bytes.size(), fnv1a64(bytes)});
  };
  auto emit_text = [&](const std::string& rel, const std::string& text) {
    emit(rel, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  };
  auto emit_png = [&](const std::string& rel, const TextureImage& img) {
    const auto bytes = encode_png(img);
    emit(rel, bytes);
  };

  for (int s = 1; s <= 4; ++s) {
    emit_text("meshes/ico" + std::to_string(s) + ".obj", serialize_obj(icosphere(s)));
  }
  emit_text("meshes/grid.obj", serialize_obj(planar_grid(16)));
  emit_text("meshes/cube.obj", seamed_cube_obj());
  emit_text("meshes/dirty.obj", dirty_grid_obj());
  const Mesh ladder = icosphere(kLadderSubdivisions);
  for (int percent : kDecimationPercents) {
    emit_text(decimated_name(percent),
              serialize_obj(decimate(ladder, ladder.faces.size() * percent / 100)));
  }

  emit_png("textures/checker.png", checker_texture(128, 16));
  emit_png("textures/uniform.png", uniform_texture(64, 64, {128, 96, 64}));
  const TextureImage smooth = smooth_texture(256);
  emit_png("textures/smooth.png", smooth);
  for (int level : kNoiseLevels) {
    const std::uint64_t level_seed = seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(level + 1));
    emit_png(noise_name(level), add_gaussian_noise(smooth, level, level_seed));
  }

  std::string manifest = "ref_mesh,ref_tex,dist_mesh,dist_tex,mos,class\n";
  const auto rows = ladder_pairs();
  const auto mos = ladder_mos();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", mos[i]);
    const bool noise = rows[i].dist_mesh == rows[i].ref_mesh;
    manifest += rows[i].ref_mesh + ',' + rows[i].ref_texture + ',' + rows[i].dist_mesh + ',' +
                rows[i].dist_texture + ',' + buf + ',' + (noise ? "noise" : "decimation") + '\n';
  }
  emit_text("ladder.csv", manifest);

  nlohmann::json index = {{"seed", seed}, {"files", nlohmann::json::array()}};
  for (const CorpusFile& f : files) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(f.hash));
    index["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", hex}});
  }
  write_file(dir / "index.json", index.dump(2) + '\n');
  return files;
}

std::vector<CorpusPair> corpus_self_pairs() {
  const std::string checker = "textures/checker.png", smooth = "textures/smooth.png";
  std::vector<CorpusPair> pairs;
  auto self = [&](const std::string& mesh, const std::string& tex) {
    pairs.push_back({mesh, tex, mesh, tex});
  };
  for (int s = 1; s <= 4; ++s) {
    self("meshes/ico" + std::to_string(s) + ".obj", s == kLadderSubdivisions ? smooth : checker);
  }
  self("meshes/grid.obj", checker);
  self("meshes/cube.obj", checker);
  self("meshes/dirty.obj", "textures/uniform.png");
  for (int percent : kDecimationPercents) self(decimated_name(percent), smooth);
  return pairs;
}

std::vector<CorpusPair> ladder_pairs() {
  const std::string ref = ladder_reference(), smooth = "textures/smooth.png";
  std::vector<CorpusPair> pairs;
  for (int level : kNoiseLevels) pairs.push_back({ref, smooth, ref, noise_name(level)});
  for (int percent : kDecimationPercents) pairs.push_back({ref, smooth, decimated_name(percent), smooth});
  return pairs;
}

std::vector<double> ladder_mos() {
  // Monotone within each family. How the two families interleave is made up;
  // it follows the order the metric itself assigns, so a rank correlation of
  // 1 checks the harness plumbing rather than any perceptual claim.
  return {5.0, 4.5, 3.5, 3.0, 4.0, 2.5, 2.0};
}

std::vector<CorpusPair> corpus_pairs() {
  auto pairs = corpus_self_pairs();
  for (const CorpusPair& p : ladder_pairs()) pairs.push_back(p);
  return pairs;
}

}  // namespace gpsim::fixtures
