#pragma once

#include <cstddef>
#include <utility>

#include <nlohmann/json.hpp>

#include "gpsim/mesh.hpp"

namespace gpsim {

struct CleanReport {
  std::size_t duplicated_vertices_removed = 0;
  std::size_t unreferenced_vertices_removed = 0;
  std::size_t duplicated_faces_removed = 0;
  std::size_t null_faces_removed = 0;
  std::size_t iterations = 0;  // detection passes, including the final empty one

  friend bool operator==(const CleanReport&, const CleanReport&) = default;
};

// Iterative mesh cleaning. Each pass detects
//   - duplicated vertices: bit-identical position and uv (lowest index kept),
//   - unreferenced vertices: not used by any face,
//   - null faces: a vertex index repeated within the face,
//   - duplicated faces: same unordered index set as an earlier face,
// removes them, and repeats until a pass finds nothing. Vertices orphaned by
// face removal are picked up on the following pass.
//
// Throws Error(EmptyMesh) if no face survives.
std::pair<Mesh, CleanReport> clean(const Mesh& mesh);

nlohmann::json to_json(const CleanReport& report);

}  // namespace gpsim
