#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gpsim/texturing.hpp"

namespace gpsim {

enum class KernelVariant {
  Gaussian,  // exp(-|vi - vj|^2 / (2 sigma^2))
  Printed,   // exp(-|vi - vj|^2 / (2 sigma)), as typeset
};

enum class LaplacianVariant {
  Symmetric,  // D^-1/2 L D^-1/2
  Printed,    // D^-1/2 L D^1/2, as typeset
};

struct GraphOptions {
  KernelVariant kernel = KernelVariant::Gaussian;
  LaplacianVariant laplacian = LaplacianVariant::Symmetric;
};

struct GraphEdge {
  int i = 0;
  int j = 0;  // i < j
  double weight = 0.0;
};

// Weighted graph over the patch vertices (local order), with edges taken from
// the patch faces.
struct PatchGraph {
  std::vector<GraphEdge> edges;
  double sigma = 0.0;               // mean Euclidean edge length
  Eigen::MatrixXd adjacency;        // W
  Eigen::VectorXd degrees;          // d_i = sum_j W_ij
  Eigen::MatrixXd laplacian;        // L = D - W
  Eigen::MatrixXd normalized;       // L'
};

// Throws Error(Feature) for a degenerate graph (zero sigma or an isolated vertex).
PatchGraph build_patch_graph(const GeodesicPatch& patch, const GraphOptions& options = {});

// f_c^T L' f_c / |T| for the Y, U and V vertex signals.
std::array<double, 3> patch_color_smoothness(const PatchGraph& graph,
                                             const TexturedGeodesicPatch& tp);

// Cotangent Laplace-Beltrami of the center position over its mixed Voronoi
// area, projected on the angle-weighted vertex normal:
//   |L_cot . N| / 2
// Cotangents are clamped to +-1e6. Throws Error(Feature) if the area
// degenerates or the normal sum cancels below kNormalCancellation of the
// total center angle, as on a fan folded onto itself.
double patch_mean_curvature(const GeodesicPatch& patch);

struct ColorStats {
  std::array<double, 3> average{};   // pixel-count weighted mean of face means
  std::array<double, 3> variance{};  // pixel-count weighted mean of face variances
};

// Per face: channel mean and population variance of its pixel cluster.
ColorStats patch_color_stats(const TexturedGeodesicPatch& tp);

struct PatchFeatures {
  std::array<double, 3> pcs{};
  double dmc = 0.0;
  std::array<double, 3> pca{};
  std::array<double, 3> pcv{};

  // Flattened as pcs[0..2], dmc, pca[0..2], pcv[0..2].
  std::array<double, 10> flat() const;
};

PatchFeatures extract_features(const TexturedGeodesicPatch& tp, const GraphOptions& options = {});

inline constexpr double kCotangentClamp = 1e6;
inline constexpr double kMinVoronoiArea = 1e-30;
inline constexpr double kNormalCancellation = 1e-9;

}  // namespace gpsim
