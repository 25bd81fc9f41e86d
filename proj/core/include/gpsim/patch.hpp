#pragma once

#include <array>
#include <span>
#include <vector>

#include "gpsim/mesh.hpp"

namespace gpsim {

struct PatchVertex {
  Vec3 position;
  Vec2 uv;
};

struct CropDiagnostics {
  double ref_mean_distance = 0.0;   // D_r before cropping
  double dist_mean_distance = 0.0;  // D_d before cropping
  double ratio = 1.0;               // t = D_d / D_r
  double size_ratio = 1.0;          // l = D / tau for this patch, D after step 1
  bool step1_applied = false;
  bool step2_applied = false;
};

// 1-hop fan around a vertex. Local vertex 0 is the center and neighbor j is
// local vertex j + 1; every face contains local vertex 0.
struct GeodesicPatch {
  PatchVertex center;
  std::vector<PatchVertex> neighbors;
  std::vector<std::array<int, 3>> faces;
  CropDiagnostics crop;

  std::size_t vertex_count() const noexcept { return neighbors.size() + 1; }
  const PatchVertex& vertex(int local) const {
    return local == 0 ? center : neighbors[static_cast<std::size_t>(local - 1)];
  }
};

// CSR map from vertex to incident faces.
class VertexFaceIndex {
 public:
  explicit VertexFaceIndex(const Mesh& mesh);

  std::span<const std::uint32_t> faces_of(VertexId v) const {
    return {faces_.data() + offsets_[v], faces_.data() + offsets_[v + 1]};
  }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> faces_;
};

// Fan of all faces incident to `center`. Neighbors appear in order of first
// occurrence across those faces (ascending face index, corner order) and faces
// keep their winding. Throws Error(Patch) if the vertex has no incident face.
GeodesicPatch build_patch(const Mesh& mesh, const VertexFaceIndex& index, VertexId center);
GeodesicPatch build_patch(const Mesh& mesh, VertexId center);

// Mean neighbor-to-center distance.
double mean_neighbor_distance(const GeodesicPatch& patch);

enum class CropFormula {
  Shrink,   // neighbors move to center + (v - center) / ratio
  Printed,  // neighbors move to v + (v - center) / ratio, as typeset
};

// Two-step cropping. Step 1 shrinks the distorted patch to the reference
// patch's mean neighbor distance when it is larger; step 2 shrinks each
// patch whose mean distance exceeds tau down to tau. Texture coordinates
// follow the same map. Both patches receive the diagnostics.
// Throws Error(Patch) for tau <= 0 or a patch with zero mean distance.
void crop_pair(GeodesicPatch& ref, GeodesicPatch& dist, double tau,
               CropFormula formula = CropFormula::Shrink);

}  // namespace gpsim
