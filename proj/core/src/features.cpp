#include "gpsim/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gpsim/error.hpp"

namespace gpsim {
namespace {

double clamped_cot(const Vec3& a, const Vec3& b) {
  const double cross = a.cross(b).norm();
  const double dot = a.dot(b);
  if (cross == 0.0) {
    if (dot == 0.0) return 0.0;
    return dot > 0.0 ? kCotangentClamp : -kCotangentClamp;
  }
  return std::clamp(dot / cross, -kCotangentClamp, kCotangentClamp);
}

}  // namespace

std::array<double, 10> PatchFeatures::flat() const {
  return {pcs[0], pcs[1], pcs[2], dmc, pca[0], pca[1], pca[2], pcv[0], pcv[1], pcv[2]};
}

PatchGraph build_patch_graph(const GeodesicPatch& patch, const GraphOptions& options) {
  const int n = static_cast<int>(patch.vertex_count());
  std::set<std::pair<int, int>> unique_edges;
  for (const auto& f : patch.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a == b) continue;
      unique_edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  if (unique_edges.empty()) throw Error(ErrorKind::Feature, "patch has no edges");

  PatchGraph g;
  std::vector<double> lengths;
  lengths.reserve(unique_edges.size());
  double total = 0.0;
  for (const auto& [i, j] : unique_edges) {
    const double len = (patch.vertex(i).position - patch.vertex(j).position).norm();
    lengths.push_back(len);
    total += len;
  }
  g.sigma = total / static_cast<double>(lengths.size());
  if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) {
    throw Error(ErrorKind::Feature, "patch edges have zero mean length");
  }

  const double denom =
      options.kernel == KernelVariant::Gaussian ? 2.0 * g.sigma * g.sigma : 2.0 * g.sigma;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  std::size_t e = 0;
  for (const auto& [i, j] : unique_edges) {
    const double w = std::exp(-(lengths[e] * lengths[e]) / denom);
    g.edges.push_back({i, j, w});
    g.adjacency(i, j) = w;
    g.adjacency(j, i) = w;
    ++e;
  }
  g.degrees = g.adjacency.rowwise().sum();
  for (int i = 0; i < n; ++i) {
    if (!(g.degrees[i] > 0.0)) {
      throw Error(ErrorKind::Feature, "patch graph has an isolated vertex");
    }
  }
  g.laplacian = -g.adjacency;
  g.laplacian.diagonal() += g.degrees;

  const Eigen::VectorXd inv_sqrt = g.degrees.array().rsqrt();
  const Eigen::VectorXd right = options.laplacian == LaplacianVariant::Symmetric
                                    ? inv_sqrt
                                    : Eigen::VectorXd(g.degrees.array().sqrt());
  g.normalized = inv_sqrt.asDiagonal() * g.laplacian * right.asDiagonal();
  return g;
}

std::array<double, 3> patch_color_smoothness(const PatchGraph& graph,
                                             const TexturedGeodesicPatch& tp) {
  const auto n = static_cast<Eigen::Index>(tp.vertex_colors.size());
  if (n != graph.normalized.rows()) {
    throw Error(ErrorKind::Feature, "vertex color count does not match the patch graph");
  }
  if (tp.total_pixels == 0) throw Error(ErrorKind::Feature, "patch covers no pixels");
  std::array<double, 3> out{};
  Eigen::VectorXd f(n);
  for (int c = 0; c < 3; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) f[i] = tp.vertex_colors[static_cast<std::size_t>(i)][c];
    out[c] = f.dot(graph.normalized * f) / static_cast<double>(tp.total_pixels);
  }
  return out;
}

double patch_mean_curvature(const GeodesicPatch& patch) {
  const Vec3& c = patch.center.position;
  std::vector<double> weight(patch.vertex_count(), 0.0);
  double area = 0.0;
  Vec3 normal_sum = Vec3::Zero();
  double angle_sum = 0.0;

  for (const auto& face : patch.faces) {
    // Rotate so the center comes first, keeping the winding.
    int at = 0;
    while (at < 3 && face[at] != 0) ++at;
    if (at == 3) continue;
    const int p = face[(at + 1) % 3];
    const int q = face[(at + 2) % 3];
    const Vec3& P = patch.vertex(p).position;
    const Vec3& Q = patch.vertex(q).position;

    const Vec3 cp = P - c, cq = Q - c;
    const Vec3 pc = c - P, pq = Q - P;
    const Vec3 qc = c - Q, qp = P - Q;
    const double cot_p = clamped_cot(pc, pq);
    const double cot_q = clamped_cot(qc, qp);
    weight[static_cast<std::size_t>(p)] += cot_q;  // edge c-p is opposite q
    weight[static_cast<std::size_t>(q)] += cot_p;

    const Vec3 n = cp.cross(cq);
    const double tri_area = 0.5 * n.norm();
    if (cp.dot(cq) < 0.0) {
      area += 0.5 * tri_area;
    } else if (pc.dot(pq) < 0.0 || qc.dot(qp) < 0.0) {
      area += 0.25 * tri_area;
    } else {
      area += (cp.squaredNorm() * cot_q + cq.squaredNorm() * cot_p) / 8.0;
    }
    if (tri_area > 0.0) {
      const double angle = std::atan2(n.norm(), cp.dot(cq));
      normal_sum += angle * n.normalized();
      angle_sum += angle;
    }
  }

  if (!(area > kMinVoronoiArea)) {
    throw Error(ErrorKind::Feature, "center has a degenerate Voronoi area");
  }
  const double normal_len = normal_sum.norm();
  // Relative, so the verdict is unchanged by a similarity transform.
  if (!(normal_len > kNormalCancellation * angle_sum) || !std::isfinite(normal_len)) {
    throw Error(ErrorKind::Feature, "center normal is undefined");
  }
  Vec3 lap = Vec3::Zero();
  for (std::size_t j = 1; j < weight.size(); ++j) {
    lap += weight[j] * (c - patch.neighbors[j - 1].position);
  }
  lap /= 2.0 * area;
  const double value = std::abs(lap.dot(normal_sum / normal_len)) / 2.0;
  if (!std::isfinite(value)) throw Error(ErrorKind::Feature, "curvature is not finite");
  return value;
}

ColorStats patch_color_stats(const TexturedGeodesicPatch& tp) {
  ColorStats stats;
  double weight_sum = 0.0;
  std::vector<Yuv> colors;
  for (const auto& cluster : tp.face_pixels) {
    if (cluster.empty()) continue;
    colors.clear();
    for (const TexturedPixel& px : cluster) colors.push_back(rgb_to_yuv(px.rgb, tp.color_space));
    const double m = static_cast<double>(cluster.size());
    for (int ch = 0; ch < 3; ++ch) {
      double mean = 0.0;
      for (const Yuv& y : colors) mean += y[ch];
      mean /= m;
      double var = 0.0;
      for (const Yuv& y : colors) var += (y[ch] - mean) * (y[ch] - mean);
      var /= m;
      stats.average[ch] += m * mean;
      stats.variance[ch] += m * var;
    }
    weight_sum += m;
  }
  if (!(weight_sum > 0.0)) throw Error(ErrorKind::Feature, "patch covers no pixels");
  for (int ch = 0; ch < 3; ++ch) {
    stats.average[ch] /= weight_sum;
    stats.variance[ch] /= weight_sum;
  }
  return stats;
}

PatchFeatures extract_features(const TexturedGeodesicPatch& tp, const GraphOptions& options) {
  PatchFeatures f;
  f.pcs = patch_color_smoothness(build_patch_graph(tp.patch, options), tp);
  f.dmc = patch_mean_curvature(tp.patch);
  const ColorStats stats = patch_color_stats(tp);
  f.pca = stats.average;
  f.pcv = stats.variance;
  return f;
}

}  // namespace gpsim
