#include "gpsim/clean.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "gpsim/error.hpp"

namespace gpsim {
namespace {

struct VertexKey {
  std::array<std::uint64_t, 5> bits;
  friend bool operator==(const VertexKey&, const VertexKey&) = default;
};

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t b : k.bits) {
      h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

VertexKey key_of(const Vec3& p, const Vec2& t) {
  return {{std::bit_cast<std::uint64_t>(p.x()), std::bit_cast<std::uint64_t>(p.y()),
           std::bit_cast<std::uint64_t>(p.z()), std::bit_cast<std::uint64_t>(t.x()),
           std::bit_cast<std::uint64_t>(t.y())}};
}

struct FaceKeyHash {
  std::size_t operator()(const Face& f) const noexcept {
    return (std::size_t{f[0]} * 73856093u) ^ (std::size_t{f[1]} * 19349663u) ^
           (std::size_t{f[2]} * 83492791u);
  }
};

bool is_null(const Face& f) { return f[0] == f[1] || f[1] == f[2] || f[0] == f[2]; }

Face sorted(Face f) {
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

std::pair<Mesh, CleanReport> clean(const Mesh& input) {
  input.validate();
  Mesh mesh = input;
  CleanReport report;

  while (true) {
    ++report.iterations;
    const std::size_t n = mesh.vertices.size();

    // Duplicated vertices map onto the first identical one.
    std::vector<VertexId> canonical(n);
    std::unordered_map<VertexKey, VertexId, VertexKeyHash> first_seen;
    first_seen.reserve(n);
    std::size_t duplicated = 0;
    for (VertexId v = 0; v < n; ++v) {
      auto [it, inserted] = first_seen.try_emplace(key_of(mesh.vertices[v], mesh.uv[v]), v);
      canonical[v] = it->second;
      if (!inserted) ++duplicated;
    }

    // Unreferenced: canonical vertices that no current face touches.
    std::vector<bool> referenced(n, false);
    for (const Face& f : mesh.faces) {
      for (VertexId v : f) referenced[canonical[v]] = true;
    }
    std::size_t unreferenced = 0;
    for (VertexId v = 0; v < n; ++v) {
      if (canonical[v] == v && !referenced[v]) ++unreferenced;
    }

    // Faces after re-indexing onto canonical vertices.
    std::size_t null_faces = 0;
    std::size_t duplicated_faces = 0;
    std::vector<Face> kept;
    kept.reserve(mesh.faces.size());
    std::unordered_map<Face, std::size_t, FaceKeyHash> seen_faces;
    seen_faces.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces) {
      Face g{canonical[f[0]], canonical[f[1]], canonical[f[2]]};
      if (is_null(g)) {
        ++null_faces;
      } else if (!seen_faces.try_emplace(sorted(g), kept.size()).second) {
        ++duplicated_faces;
      } else {
        kept.push_back(g);
      }
    }

    if (duplicated + unreferenced + null_faces + duplicated_faces == 0) break;

    report.duplicated_vertices_removed += duplicated;
    report.unreferenced_vertices_removed += unreferenced;
    report.null_faces_removed += null_faces;
    report.duplicated_faces_removed += duplicated_faces;

    // Compact the surviving vertices, preserving their relative order.
    std::vector<VertexId> new_index(n, 0);
    Mesh next;
    for (VertexId v = 0; v < n; ++v) {
      if (canonical[v] == v && referenced[v]) {
        new_index[v] = static_cast<VertexId>(next.vertices.size());
        next.vertices.push_back(mesh.vertices[v]);
        next.uv.push_back(mesh.uv[v]);
      }
    }
    next.faces.reserve(kept.size());
    for (const Face& g : kept) {
      next.faces.push_back({new_index[g[0]], new_index[g[1]], new_index[g[2]]});
    }
    mesh = std::move(next);
  }

  if (mesh.faces.empty()) {
    throw Error(ErrorKind::EmptyMesh, "mesh is empty after cleaning");
  }
  return {std::move(mesh), report};
}

nlohmann::json to_json(const CleanReport& r) {
  return {{"duplicated_vertices_removed", r.duplicated_vertices_removed},
          {"unreferenced_vertices_removed", r.unreferenced_vertices_removed},
          {"duplicated_faces_removed", r.duplicated_faces_removed},
          {"null_faces_removed", r.null_faces_removed},
          {"iterations", r.iterations}};
}

}  // namespace gpsim
