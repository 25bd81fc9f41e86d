#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "gpsim/clean.hpp"
#include "gpsim/error.hpp"
#include "gpsim/features.hpp"
#include "gpsim/patch.hpp"
#include "gpsim/tools/fixtures.hpp"
#include "oracles.hpp"

namespace gpsim {
namespace {

GeodesicPatch regular_fan(int count, double radius = 1.0) {
  GeodesicPatch p;
  p.center = {Vec3::Zero(), Vec2(0.5, 0.5)};
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    p.neighbors.push_back({Vec3(radius * std::cos(a), radius * std::sin(a), 0),
                           Vec2(0.5 + 0.1 * std::cos(a), 0.5 + 0.1 * std::sin(a))});
    p.faces.push_back({0, k + 1, (k + 1) % count + 1});
  }
  return p;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

TEST(PatchGraph, SingleEdgeAtSigma) {
  GeodesicPatch p;
  p.center = {Vec3::Zero(), Vec2::Zero()};
  p.neighbors.push_back({Vec3(0.37, 0, 0), Vec2::Zero()});
  p.faces.push_back({0, 1, 1});
  const PatchGraph g = build_patch_graph(p);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_DOUBLE_EQ(g.sigma, 0.37);
  EXPECT_NEAR(g.edges[0].weight, std::exp(-0.5), 1e-15);
}

TEST(PatchGraph, EquilateralFanDegreesFollowValence) {
  const PatchGraph g = build_patch_graph(regular_fan(6));
  ASSERT_EQ(g.edges.size(), 12u);
  const double w = g.edges[0].weight;
  for (const GraphEdge& e : g.edges) EXPECT_NEAR(e.weight, w, 1e-15);
  EXPECT_NEAR(g.degrees[0], 6 * w, 1e-14);
  for (int i = 1; i <= 6; ++i) EXPECT_NEAR(g.degrees[i], 3 * w, 1e-14);
  EXPECT_NEAR(g.normalized.diagonal().minCoeff(), 1.0, 1e-15);
  EXPECT_NEAR(g.normalized.diagonal().maxCoeff(), 1.0, 1e-15);
}

TEST(PatchGraph, SpectrumLiesInZeroTwo) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const PatchGraph g = build_patch_graph(testing::random_fan(rng, 6, true, 0.4));
    ASSERT_EQ(g.normalized.rows(), 7);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.normalized);
    EXPECT_GE(solver.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LE(solver.eigenvalues().maxCoeff(), 2.0 + 1e-12);
  }
}

TEST(PatchGraph, KernelIsSqrtDegree) {
  std::mt19937_64 rng(18);
  const PatchGraph g = build_patch_graph(testing::random_fan(rng, 5, false, 0.2));
  const Eigen::VectorXd f = g.degrees.array().sqrt();
  EXPECT_NEAR(f.dot(g.normalized * f), 0.0, 1e-12);
}

TEST(PatchGraph, SingleEntrySignalGivesSquare) {
  std::mt19937_64 rng(19);
  const PatchGraph g = build_patch_graph(testing::random_fan(rng, 6, true, 0.3));
  for (int j = 0; j < 7; ++j) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(7);
    f[j] = 3.5;
    EXPECT_NEAR(f.dot(g.normalized * f), 3.5 * 3.5, 1e-12);
  }
}

TEST(PatchGraph, QuadraticFormMatchesEdgeSum) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> value(0.0, 255.0);
  for (int trial = 0; trial < 100; ++trial) {
    const GeodesicPatch p = testing::random_fan(rng, 3 + trial % 8, trial % 3 != 0, 0.5);
    const PatchGraph g = build_patch_graph(p);
    std::vector<double> f(p.vertex_count());
    for (double& x : f) x = value(rng);
    const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    const double form = fv.dot(g.normalized * fv);
    EXPECT_LT(relative_error(form, testing::edge_sum_form(g.edges, f.size(), f)), 1e-9);
  }
}

TEST(PatchGraph, DegenerateGraphIsRejected) {
  GeodesicPatch p = regular_fan(3);
  for (auto& n : p.neighbors) n.position = Vec3::Zero();
  EXPECT_THROW(build_patch_graph(p), Error);
}

TEST(PatchGraph, PrintedVariantsDiffer) {
  std::mt19937_64 rng(21);
  const GeodesicPatch p = testing::scaled(testing::random_fan(rng, 6, true, 0.3), 0.1);
  const PatchGraph a = build_patch_graph(p);
  const PatchGraph b = build_patch_graph(p, {KernelVariant::Printed, LaplacianVariant::Symmetric});
  const PatchGraph c = build_patch_graph(p, {KernelVariant::Gaussian, LaplacianVariant::Printed});
  EXPECT_GT(b.edges[0].weight, a.edges[0].weight);
  EXPECT_FALSE(c.normalized.isApprox(c.normalized.transpose()));
}

TEST(ColorSmoothness, NormalizedByPixelCount) {
  const GeodesicPatch p = regular_fan(6);
  TexturedGeodesicPatch tp;
  tp.patch = p;
  tp.total_pixels = 4;
  for (int i = 0; i < 7; ++i) tp.vertex_colors.push_back({double(i == 2) * 8.0, 0, 0});
  const auto pcs = patch_color_smoothness(build_patch_graph(p), tp);
  EXPECT_NEAR(pcs[0], 64.0 / 4.0, 1e-12);
  EXPECT_EQ(pcs[1], 0.0);
}

TEST(Curvature, PlanarFanIsFlat) {
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_LT(patch_mean_curvature(testing::random_fan(rng, 3 + trial % 7, true, 0.0)), 1e-9);
  }
  const Mesh grid = fixtures::planar_grid(8);
  EXPECT_LT(patch_mean_curvature(build_patch(grid, 40)), 1e-9);
}

TEST(Curvature, SphereMatchesInverseRadius) {
  for (double r : {0.5, 1.0, 2.0}) {
    const Mesh sphere = fixtures::icosphere(3, r);
    double total = 0;
    for (VertexId v = 0; v < sphere.vertices.size(); ++v) {
      const double h = patch_mean_curvature(build_patch(sphere, v));
      EXPECT_NEAR(h, 1.0 / r, 0.15 / r) << "vertex " << v;
      total += h;
    }
    EXPECT_NEAR(total / sphere.vertices.size(), 1.0 / r, 0.05 / r);
  }
}

TEST(Curvature, NeedleStaysFinite) {
  GeodesicPatch p = regular_fan(6);
  // Neighbors 2 and 3 nearly coincide, so the face between them is a needle.
  p.neighbors[1].position = 0.5 * (p.neighbors[0].position + p.neighbors[2].position) +
                            Vec3(0, 0, 0.2);
  p.neighbors[2].position = p.neighbors[1].position + Vec3(1e-12, 0, 0);
  const double h = patch_mean_curvature(p);
  EXPECT_TRUE(std::isfinite(h));
}

TEST(Curvature, ScalesInverselyWithSize) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const GeodesicPatch p = testing::random_fan(rng, 4 + trial % 6, trial % 2 == 0, 0.6);
    const double h = patch_mean_curvature(p);
    for (double s : {0.001, 0.5, 3.0}) {
      EXPECT_LT(relative_error(patch_mean_curvature(testing::scaled(p, s)), h / s), 1e-6);
    }
  }
}

TEST(Curvature, RigidMotionInvariant) {
  std::mt19937_64 rng(32);
  const GeodesicPatch p = testing::random_fan(rng, 6, true, 0.5);
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 shift(4, -2, 9);
  GeodesicPatch moved = p;
  moved.center.position = rot * p.center.position + shift;
  for (std::size_t i = 0; i < p.neighbors.size(); ++i) {
    moved.neighbors[i].position = rot * p.neighbors[i].position + shift;
  }
  EXPECT_LT(relative_error(patch_mean_curvature(moved), patch_mean_curvature(p)), 1e-9);
}

TEST(Curvature, CollapsedFanIsAnError) {
  EXPECT_THROW(patch_mean_curvature(testing::scaled(regular_fan(5), 0.0)), Error);
}

// Spoke 2 is parallel to spoke 1, so faces two and three are one triangle
// seen from both sides and the normals cancel. Scaling leaves rounding
// residue that must not turn into a curvature.
TEST(Curvature, FoldedFanIsAnErrorAtEveryScale) {
  GeodesicPatch p;
  p.center = {Vec3::Zero(), Vec2(0.5, 0.5)};
  const Vec3 spike(-11.1092, 64.0701, -8.58367);
  for (const Vec3& v : {spike, Vec3(spike * 1e-3), Vec3(0.930803, 0.0, -1.31888)}) {
    p.neighbors.push_back({v, Vec2(0.5, 0.5)});
  }
  p.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}};
  for (double s : {1.0, 0.37, 3.1e-4, 1.7e3}) {
    EXPECT_THROW(patch_mean_curvature(testing::scaled(p, s)), Error) << s;
  }
}

TexturedPixel gray(int x, std::uint8_t g) { return {x, 0, Rgb{g, g, g}}; }

TEST(ColorStats, PixelWeightedMean) {
  TexturedGeodesicPatch tp;
  tp.face_pixels = {{gray(0, 10)}, {gray(1, 2), gray(2, 2), gray(3, 2)}};
  tp.total_pixels = 4;
  const ColorStats s = patch_color_stats(tp);
  EXPECT_NEAR(s.average[0], 4.0, 1e-12);
  EXPECT_NEAR(s.variance[0], 0.0, 1e-12);
}

TEST(ColorStats, PopulationVariancePerFace) {
  TexturedGeodesicPatch tp;
  tp.face_pixels = {{gray(0, 0), gray(1, 4)}};
  tp.total_pixels = 2;
  EXPECT_NEAR(patch_color_stats(tp).variance[0], 4.0, 1e-12);
}

TEST(ColorStats, UniformTexture) {
  const TextureImage img = fixtures::uniform_texture(32, 32, {128, 96, 64});
  const TexturedGeodesicPatch tp = texture_patch(regular_fan(6), img);
  const ColorStats s = patch_color_stats(tp);
  const Yuv c = rgb_to_yuv({128, 96, 64});
  for (int ch = 0; ch < 3; ++ch) {
    EXPECT_NEAR(s.average[ch], c[ch], 1e-12);
    EXPECT_NEAR(s.variance[ch], 0.0, 1e-12);
  }
}

TEST(ColorStats, CheckerMatchesFlatReaggregation) {
  const TextureImage img = fixtures::checker_texture(64, 8);
  std::mt19937_64 rng(40);
  const TexturedGeodesicPatch tp = texture_patch(testing::random_fan(rng, 7, true, 0.2), img);
  double sum[3] = {0, 0, 0}, weights = 0;
  double var[3] = {0, 0, 0};
  for (const auto& cluster : tp.face_pixels) {
    for (int ch = 0; ch < 3; ++ch) {
      double s = 0, s2 = 0;
      for (const TexturedPixel& px : cluster) {
        const double y = rgb_to_yuv(px.rgb)[ch];
        s += y;
        s2 += y * y;
      }
      const double m = double(cluster.size());
      sum[ch] += s;
      var[ch] += s2 - s * s / m;
    }
    weights += double(cluster.size());
  }
  const ColorStats stats = patch_color_stats(tp);
  for (int ch = 0; ch < 3; ++ch) {
    EXPECT_NEAR(stats.average[ch], sum[ch] / weights, 1e-9);
    EXPECT_NEAR(stats.variance[ch], var[ch] / weights, 1e-7);
  }
  EXPECT_GT(stats.variance[0], 0.0);
}

TEST(ExtractFeatures, FlatLayout) {
  PatchFeatures f;
  f.pcs = {1, 2, 3};
  f.dmc = 4;
  f.pca = {5, 6, 7};
  f.pcv = {8, 9, 10};
  EXPECT_EQ(f.flat(), (std::array<double, 10>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
}

}  // namespace
}  // namespace gpsim
