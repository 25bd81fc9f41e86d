#pragma once

// Slow, independent reference implementations used to check the library.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "gpsim/features.hpp"
#include "gpsim/mesh.hpp"
#include "gpsim/patch.hpp"
#include "gpsim/texturing.hpp"

namespace gpsim::testing {

// Every pixel of the image whose center lies in the triangle, decided per
// pixel from snapped corners with 128-bit cross products. Boundary points
// belong to the triangle only on a top edge (horizontal, third corner below)
// or a left edge (third corner to the right). Row-major order.
std::vector<PixelIndex> brute_force_raster(const std::array<PixelPoint, 3>& corners, int width,
                                           int height);

// Index of the closest point; ties go to the lower index.
std::size_t brute_force_nearest(std::span<const Vec3> points, const Vec3& q);

// Greedy farthest-point order from index 0, O(n * k).
std::vector<std::size_t> brute_force_fps(std::span<const Vec3> points, std::size_t k);

// sum over edges of W_ij (f_i / sqrt(d_i) - f_j / sqrt(d_j))^2 with degrees
// recomputed from the edge list.
double edge_sum_form(std::span<const GraphEdge> edges, std::size_t vertex_count,
                     std::span<const double> f);

// Textbook single-pass formulas.
double direct_pearson(std::span<const double> x, std::span<const double> y);
double direct_spearman(std::span<const double> x, std::span<const double> y);
double direct_rmse(std::span<const double> x, std::span<const double> y);

// Fan of `count` triangles around a center at the origin. Neighbor radii,
// angular gaps and heights are random; `closed` joins the last neighbor to
// the first.
GeodesicPatch random_fan(std::mt19937_64& rng, int count, bool closed, double height_jitter);

// Uniformly scales every neighbor offset about the center.
GeodesicPatch scaled(const GeodesicPatch& patch, double factor);

// Empty directory under the build tree, private to this process and removed
// at exit.
std::filesystem::path scratch_dir(const std::string& name);

// Fixture corpus generated once per process (default seed).
const std::filesystem::path& corpus_dir();

std::filesystem::path data_path(const std::string& name);

}  // namespace gpsim::testing
