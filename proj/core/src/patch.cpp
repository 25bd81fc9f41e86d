#include "gpsim/patch.hpp"

#include <algorithm>
#include <string>

#include "gpsim/error.hpp"

namespace gpsim {

VertexFaceIndex::VertexFaceIndex(const Mesh& mesh) : offsets_(mesh.vertices.size() + 1, 0) {
  for (const Face& f : mesh.faces) {
    for (VertexId v : f) ++offsets_[v + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  faces_.resize(offsets_.back());
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    for (int c = 0; c < 3; ++c) {
      // A null face lists its vertex twice; record it once.
      bool repeated = false;
      for (int p = 0; p < c; ++p) repeated |= f[p] == f[c];
      if (!repeated) faces_[cursor[f[c]]++] = fi;
    }
  }
  // Trim slots left unused by null faces.
  std::vector<std::uint32_t> compact;
  compact.reserve(faces_.size());
  std::vector<std::uint32_t> offsets(offsets_.size(), 0);
  for (std::size_t v = 0; v + 1 < offsets_.size(); ++v) {
    offsets[v] = static_cast<std::uint32_t>(compact.size());
    compact.insert(compact.end(), faces_.begin() + offsets_[v], faces_.begin() + cursor[v]);
  }
  offsets.back() = static_cast<std::uint32_t>(compact.size());
  faces_ = std::move(compact);
  offsets_ = std::move(offsets);
}

GeodesicPatch build_patch(const Mesh& mesh, const VertexFaceIndex& index, VertexId center) {
  auto incident = index.faces_of(center);
  if (incident.empty()) {
    throw Error(ErrorKind::Patch, "vertex " + std::to_string(center) + " has no incident face");
  }
  GeodesicPatch patch;
  patch.center = {mesh.vertices[center], mesh.uv[center]};

  std::vector<VertexId> local_to_mesh{center};
  auto local_of = [&](VertexId v) {
    auto it = std::find(local_to_mesh.begin(), local_to_mesh.end(), v);
    if (it != local_to_mesh.end()) return static_cast<int>(it - local_to_mesh.begin());
    local_to_mesh.push_back(v);
    patch.neighbors.push_back({mesh.vertices[v], mesh.uv[v]});
    return static_cast<int>(local_to_mesh.size() - 1);
  };
  for (std::uint32_t fi : incident) {
    const Face& f = mesh.faces[fi];
    // Null faces (repeated vertex) carry no area and no edge.
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    std::array<int, 3> local{};
    for (int c = 0; c < 3; ++c) local[c] = local_of(f[c]);
    patch.faces.push_back(local);
  }
  if (patch.faces.empty()) {
    throw Error(ErrorKind::Patch, "vertex " + std::to_string(center) + " has only null faces");
  }
  return patch;
}

GeodesicPatch build_patch(const Mesh& mesh, VertexId center) {
  return build_patch(mesh, VertexFaceIndex(mesh), center);
}

double mean_neighbor_distance(const GeodesicPatch& patch) {
  if (patch.neighbors.empty()) return 0.0;
  double sum = 0.0;
  for (const PatchVertex& n : patch.neighbors) sum += (n.position - patch.center.position).norm();
  return sum / static_cast<double>(patch.neighbors.size());
}

namespace {

void rescale(GeodesicPatch& patch, double ratio, CropFormula formula) {
  const Vec3& c = patch.center.position;
  const Vec2& cuv = patch.center.uv;
  for (PatchVertex& n : patch.neighbors) {
    const Vec3 offset = n.position - c;
    if (offset.squaredNorm() == 0.0) continue;
    const Vec2 uv_offset = n.uv - cuv;
    if (formula == CropFormula::Shrink) {
      n.position = c + offset / ratio;
      n.uv = cuv + uv_offset / ratio;
    } else {
      n.position = n.position + offset / ratio;
      n.uv = n.uv + uv_offset / ratio;
    }
  }
}

}  // namespace

void crop_pair(GeodesicPatch& ref, GeodesicPatch& dist, double tau, CropFormula formula) {
  if (!(tau > 0.0)) throw Error(ErrorKind::Patch, "crop threshold must be positive");
  CropDiagnostics diag;
  diag.ref_mean_distance = mean_neighbor_distance(ref);
  diag.dist_mean_distance = mean_neighbor_distance(dist);
  if (!(diag.ref_mean_distance > 0.0) || !(diag.dist_mean_distance > 0.0)) {
    throw Error(ErrorKind::Patch, "patch neighbors coincide with the center");
  }

  diag.ratio = diag.dist_mean_distance / diag.ref_mean_distance;
  if (diag.ratio > 1.0) {
    rescale(dist, diag.ratio, formula);
    diag.step1_applied = true;
  }

  CropDiagnostics ref_diag = diag;
  CropDiagnostics dist_diag = diag;
  if (formula == CropFormula::Shrink) {
    ref_diag.size_ratio = mean_neighbor_distance(ref) / tau;
    dist_diag.size_ratio = mean_neighbor_distance(dist) / tau;
    if (ref_diag.size_ratio > 1.0) {
      rescale(ref, ref_diag.size_ratio, formula);
      ref_diag.step2_applied = true;
    }
    if (dist_diag.size_ratio > 1.0) {
      rescale(dist, dist_diag.size_ratio, formula);
      dist_diag.step2_applied = true;
    }
  } else {
    // As typeset: one test on D_r / tau, then both patches offset by 1/tau.
    const double l = diag.ref_mean_distance / tau;
    ref_diag.size_ratio = dist_diag.size_ratio = l;
    if (l > 1.0) {
      rescale(ref, tau, formula);
      rescale(dist, tau, formula);
      ref_diag.step2_applied = dist_diag.step2_applied = true;
    }
  }
  ref.crop = ref_diag;
  dist.crop = dist_diag;
}

}  // namespace gpsim
