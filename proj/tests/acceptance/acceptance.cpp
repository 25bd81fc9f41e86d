// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "gpsim/clean.hpp"
#include "gpsim/error.hpp"
#include "gpsim/eval.hpp"
#include "gpsim/features.hpp"
#include "gpsim/obj.hpp"
#include "gpsim/patch.hpp"
#include "gpsim/scoring.hpp"
#include "gpsim/texturing.hpp"
#include "gpsim/tools/cli.hpp"
#include "gpsim/tools/fixtures.hpp"
#include "oracles.hpp"

namespace gpsim {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

PairPaths corpus_paths(const fixtures::CorpusPair& p) {
  const auto& d = testing::corpus_dir();
  return {d / p.ref_mesh, d / p.ref_texture, d / p.dist_mesh, d / p.dist_texture};
}

Outcome self_identity() {
  Outcome o;
  const auto pairs = fixtures::corpus_self_pairs();
  bool has_ico = false, has_cube = false;
  double slowest = 0;
  for (const auto& p : pairs) {
    has_ico |= p.ref_mesh.find("ico") != std::string::npos;
    has_cube |= p.ref_mesh.find("cube") != std::string::npos;
    const auto start = std::chrono::steady_clock::now();
    const ScoreResult r = evaluate_files(corpus_paths(p), MetricConfig{});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slowest = std::max(slowest, secs);
    o.require(r.score.q == 1.0, p.ref_mesh + " q = " + num(r.score.q));
    o.require(secs < 10.0, p.ref_mesh + " took " + num(secs) + " s");
  }
  o.require(pairs.size() >= 6 && has_ico && has_cube, "corpus lacks required meshes");
  if (o.pass) {
    o.detail = std::to_string(pairs.size()) + " meshes, q = 1 exactly, slowest " + num(slowest) +
               " s at 500 keypoints";
  }
  return o;
}

Outcome cleaning() {
  Outcome o;
  const Mesh dirty = wedge_split(parse_obj(fixtures::dirty_grid_obj()));
  const auto [once, report] = clean(dirty);
  const auto [twice, second] = clean(once);
  o.require(report.duplicated_vertices_removed == 3 && report.duplicated_faces_removed == 2 &&
                report.null_faces_removed == 1 && report.unreferenced_vertices_removed == 2,
            "report " + to_json(report).dump());
  o.require(second == CleanReport{0, 0, 0, 0, 1}, "second pass " + to_json(second).dump());
  o.require(serialize_obj(twice) == serialize_obj(once), "second pass changed the mesh");
  if (o.pass) o.detail = "removed 3 dup vertices, 2 dup faces, 1 null face, 2 orphans; second pass all zero";
  return o;
}

Outcome curvature() {
  Outcome o;
  const Mesh grid = fixtures::planar_grid(16);
  double worst_flat = 0;
  for (int j = 1; j < 16; ++j) {
    for (int i = 1; i < 16; ++i) {
      const auto v = static_cast<VertexId>(j * 17 + i);
      worst_flat = std::max(worst_flat, patch_mean_curvature(build_patch(grid, v)));
    }
  }
  o.require(worst_flat < 1e-9, "planar curvature " + num(worst_flat));
  double worst_rel = 0;
  for (double r : {0.5, 1.0, 2.0}) {
    const Mesh sphere = fixtures::icosphere(3, r);
    double total = 0;
    for (VertexId v = 0; v < sphere.vertices.size(); ++v) {
      total += patch_mean_curvature(build_patch(sphere, v));
    }
    const double mean = total / static_cast<double>(sphere.vertices.size());
    const double rel = std::abs(mean * r - 1.0);
    worst_rel = std::max(worst_rel, rel);
    o.require(rel < 0.05, "radius " + num(r) + " mean curvature " + num(mean));
  }
  if (o.pass) {
    o.detail = "planar max " + num(worst_flat) + ", sphere worst relative error " + num(worst_rel);
  }
  return o;
}

Outcome laplacian() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> value(-255.0, 255.0);
  double worst = 0, lowest = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const GeodesicPatch p = testing::random_fan(rng, 3 + trial % 9, trial % 4 != 0, 0.5);
    const PatchGraph g = build_patch_graph(p);
    const auto n = static_cast<Eigen::Index>(p.vertex_count());
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int s = 0; s < 1000; ++s) {
      for (double& x : f) x = value(rng);
      const Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
      const double form = fv.dot(g.normalized * fv);
      lowest = std::min(lowest, form);
      if (s == 0) {
        const double rel = relative_error(form, testing::edge_sum_form(g.edges, f.size(), f));
        worst = std::max(worst, rel);
      }
    }
  }
  o.require(worst <= 1e-9, "edge-sum relative error " + num(worst));
  o.require(lowest >= 0.0, "negative quadratic form " + num(lowest));
  if (o.pass) {
    o.detail = "100 patches, worst relative error " + num(worst) + ", min form " + num(lowest);
  }
  return o;
}

Outcome rasterizer() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uv(0.0, 1.0), tiny(-0.004, 0.004);
  int fallbacks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::array<PixelPoint, 3> tri;
    const Vec2 anchor(uv(rng), uv(rng));
    for (auto& corner : tri) {
      // Every tenth triangle is smaller than a pixel to reach the fallback.
      const Vec2 t = trial % 10 == 0 ? Vec2(anchor + Vec2(tiny(rng), tiny(rng)))
                                     : Vec2(uv(rng), uv(rng));
      corner = uv_to_pixel(t, 64, 64);
    }
    const auto oracle = testing::brute_force_raster(tri, 64, 64);
    const auto cluster = rasterize_face(tri, 64, 64);
    if (oracle.empty()) {
      ++fallbacks;
      o.require(cluster.size() == 1, "fallback returned " + std::to_string(cluster.size()));
    } else {
      o.require(cluster == oracle, "triangle " + std::to_string(trial) + " differs");
    }
  }
  o.require(fallbacks > 0, "no fallback case exercised");
  if (o.pass) {
    o.detail = "200 triangles exact, " + std::to_string(fallbacks) + " fallbacks of 1 pixel";
  }
  return o;
}

// Fans with large height changes; some get a spike plus a near-collinear spoke.
GeodesicPatch adversarial_fan(std::mt19937_64& rng, int trial) {
  GeodesicPatch p = testing::random_fan(rng, 3 + trial % 10, trial % 3 != 0, 2.0);
  std::uniform_real_distribution<double> spike(5.0, 50.0);
  if (trial % 2 == 0) p.neighbors[0].position *= spike(rng);
  if (trial % 5 == 0) p.neighbors[1].position = p.neighbors[0].position * 1e-3;
  return p;
}

std::optional<double> curvature_if_defined(const GeodesicPatch& p) {
  try {
    return patch_mean_curvature(p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Feature) throw;
    return std::nullopt;
  }
}

Outcome cropping() {
  Outcome o;
  std::mt19937_64 rng(6);
  double worst_t = 0, worst_l = 0, worst_dir = 0, worst_dmc = 0;
  int folded = 0;
  for (double ratio : {0.5, 1.0, 2.0, 10.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const GeodesicPatch base = adversarial_fan(rng, trial);
      const double d_ref = mean_neighbor_distance(base);
      // Some distorted fans differ in shape, not only in size; all are
      // rescaled so that D_d / D_r hits the target ratio.
      GeodesicPatch dist_in = trial % 4 == 1 ? adversarial_fan(rng, trial + 1) : base;
      dist_in = testing::scaled(dist_in, d_ref * ratio / mean_neighbor_distance(dist_in));
      const double tau = d_ref * std::array<double, 5>{0.01, 0.3, 1.0, 3.0, 100.0}[trial % 5];

      GeodesicPatch ref = base, dist = dist_in;
      crop_pair(ref, dist, tau);
      const double dr = mean_neighbor_distance(ref), dd = mean_neighbor_distance(dist);
      worst_t = std::max(worst_t, dd / dr);
      worst_l = std::max({worst_l, dr / tau, dd / tau});
      for (const auto* pair : {&ref, &dist}) {
        const GeodesicPatch& before = pair == &ref ? base : dist_in;
        for (std::size_t i = 0; i < before.neighbors.size(); ++i) {
          const Vec3 a = (before.neighbors[i].position - before.center.position).normalized();
          const Vec3 b = (pair->neighbors[i].position - pair->center.position).normalized();
          worst_dir = std::max(worst_dir, (a - b).norm());
        }
        // A fan folded onto itself has no normal; a similarity transform
        // must keep it that way rather than invent a curvature.
        const double s = mean_neighbor_distance(before) / mean_neighbor_distance(*pair);
        const auto h0 = curvature_if_defined(before);
        const auto h1 = curvature_if_defined(*pair);
        if (h0.has_value() != h1.has_value()) {
          o.require(false, "crop changed whether curvature is defined");
        } else if (h0) {
          worst_dmc = std::max(worst_dmc, relative_error(*h1, *h0 * s));
        } else {
          ++folded;
        }
      }
    }
  }
  o.require(worst_t <= 1 + 1e-9, "post-crop t = " + num(worst_t));
  o.require(worst_l <= 1 + 1e-9, "post-crop D/tau = " + num(worst_l));
  o.require(worst_dir <= 1e-9, "direction drift " + num(worst_dir));
  o.require(worst_dmc <= 1e-6, "curvature scaling error " + num(worst_dmc));
  if (o.pass) {
    o.detail = "max t " + num(worst_t) + ", max D/tau " + num(worst_l) + ", direction drift " +
               num(worst_dir) + ", curvature scaling error " + num(worst_dmc) + " (" +
               std::to_string(folded) + " folded fans kept undefined)";
  }
  return o;
}

Outcome degradation() {
  Outcome o;
  const auto ladder = fixtures::ladder_pairs();
  std::vector<double> q;
  for (const auto& p : ladder) q.push_back(evaluate_files(corpus_paths(p), MetricConfig{}).score.q);
  const std::size_t noise = fixtures::kNoiseLevels.size();
  for (std::size_t i = 1; i < noise; ++i) {
    o.require(q[i] < q[i - 1], "noise level " + std::to_string(i) + " did not lower Q");
  }
  // The decimation family is compared against the undistorted row first.
  o.require(q[noise] < q[0], "90% decimation did not lower Q");
  for (std::size_t i = noise + 1; i < q.size(); ++i) {
    o.require(q[i] < q[i - 1], "decimation step " + std::to_string(i - noise) + " did not lower Q");
  }
  std::string body = "ref_mesh,ref_tex,dist_mesh,dist_tex,mos\n";
  const auto mos = fixtures::ladder_mos();
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    body += ladder[i].ref_mesh + "," + ladder[i].ref_texture + "," + ladder[i].dist_mesh + "," +
            ladder[i].dist_texture + "," + num(mos[i]) + "\n";
  }
  const EvalReport report = run_benchmark(read_manifest(body), testing::corpus_dir(), {});
  o.require(report.srcc == 1.0, "ladder SRCC " + num(report.srcc));
  if (o.pass) {
    std::ostringstream s;
    s << "Q noise";
    for (std::size_t i = 0; i < noise; ++i) s << ' ' << num(q[i]);
    s << "; decimation";
    for (std::size_t i = noise; i < q.size(); ++i) s << ' ' << num(q[i]);
    s << "; SRCC " << num(report.srcc);
    o.detail = s.str();
  }
  return o;
}

Outcome similarity() {
  Outcome o;
  constexpr double t = 2.22e-16, eps = 2.220446049250313e-16;
  o.require(feature_similarity(0.7, 0.7, t) == 1.0, "(0.7, 0.7)");
  o.require(feature_similarity(1, 0, t) == t / (1 + t), "(1, 0)");
  o.require(std::abs(feature_similarity(2, 1, t) - 0.8) <= eps, "(2, 1)");
  o.require(pool_channels({1, 0, 0}, {6, 1, 1}) == 0.75, "channel pooling");
  if (o.pass) o.detail = "unit cases exact, channel pooling 0.75";
  return o;
}

Outcome indicators() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = u(rng);
      y[i] = 1 + 4 * x[i] + u(rng);
    }
    worst = std::max({worst, std::abs(pearson(x, y) - testing::direct_pearson(x, y)),
                      std::abs(spearman(x, y) - testing::direct_spearman(x, y)),
                      std::abs(rmse(x, y) - testing::direct_rmse(x, y))});
    std::vector<double> warped(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) warped[i] = std::exp(3 * x[i]) - x[i] * 0.5;
    o.require(spearman(warped, y) == spearman(x, y), "SRCC changed under a monotone map");
  }
  o.require(worst <= 1e-12, "oracle gap " + num(worst));
  if (o.pass) o.detail = "max oracle gap " + num(worst) + ", SRCC invariant";
  return o;
}

Outcome determinism() {
  Outcome o;
  std::size_t compared = 0;
  for (const auto& p : fixtures::corpus_pairs()) {
    const PairPaths paths = corpus_paths(p);
    auto run = [&](const char* threads) {
      std::ostringstream out, err;
      const int code = cli::run({"score", "--ref", paths.ref_mesh.string(), "--ref-tex",
                                 paths.ref_texture.string(), "--dist", paths.dist_mesh.string(),
                                 "--dist-tex", paths.dist_texture.string(), "--json", "--threads",
                                 threads},
                                out, err);
      return code == cli::kOk ? out.str() : "exit " + std::to_string(code) + ": " + err.str();
    };
    const std::string one = run("1"), eight = run("8");
    o.require(one.rfind("exit ", 0) != 0, p.dist_mesh + " " + one);
    o.require(one == eight, p.dist_mesh + " differs between 1 and 8 threads");
    ++compared;
  }
  if (o.pass) o.detail = std::to_string(compared) + " pairs bit-identical";
  return o;
}

}  // namespace
}  // namespace gpsim

int main() {
  using gpsim::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"self-identity", gpsim::self_identity},
      {"cleaning", gpsim::cleaning},
      {"curvature oracle", gpsim::curvature},
      {"laplacian oracle", gpsim::laplacian},
      {"rasterizer oracle", gpsim::rasterizer},
      {"cropping contract", gpsim::cropping},
      {"monotonic degradation", gpsim::degradation},
      {"similarity formula", gpsim::similarity},
      {"eval indicators", gpsim::indicators},
      {"determinism", gpsim::determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
