#include "gpsim/mesh.hpp"

#include <algorithm>
#include <string>

#include "gpsim/error.hpp"

namespace gpsim {

void Mesh::validate() const {
  if (uv.size() != vertices.size()) {
    throw Error(ErrorKind::Parameter,
                "mesh has " + std::to_string(vertices.size()) + " vertices but " +
                    std::to_string(uv.size()) + " texture coordinates");
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (VertexId v : faces[f]) {
      if (v >= vertices.size()) {
        throw Error(ErrorKind::Parameter, "face " + std::to_string(f) +
                                              " references vertex " + std::to_string(v) +
                                              " out of range");
      }
    }
  }
}

double bounding_box_scale(const Mesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const Vec3& p : mesh.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).maxCoeff();
}

}  // namespace gpsim
