#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gpsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VertexId = std::uint32_t;
using Face = std::array<VertexId, 3>;

// Triangle mesh with exactly one texture coordinate per vertex.
//
// Meshes produced by wedge_split may still contain repeated indices inside a
// face (null faces) or redundant vertices; clean() establishes the stronger
// invariants the metric relies on.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec2> uv;
  std::vector<Face> faces;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  std::size_t face_count() const noexcept { return faces.size(); }

  // Throws Error(Parameter) if |uv| != |vertices| or a face index is out of range.
  void validate() const;
};

// Largest axis extent of the vertex bounding box; 0 for an empty mesh.
double bounding_box_scale(const Mesh& mesh);

}  // namespace gpsim
