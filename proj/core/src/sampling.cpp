#include "gpsim/sampling.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <random>
#include <unordered_set>

#include "gpsim/error.hpp"
#include "gpsim/parallel.hpp"
#include "gpsim/spatial_index.hpp"

namespace gpsim {
namespace {

void check_request(const Mesh& mesh, std::size_t kn) {
  if (kn == 0) throw Error(ErrorKind::Parameter, "number of keypoints must be at least 1");
  if (mesh.vertices.empty()) throw Error(ErrorKind::Parameter, "cannot sample an empty mesh");
}

// Uniform integer in [0, bound) by rejection; std::uniform_int_distribution
// is implementation-defined and would make seeds non-portable.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<Vec3> positions_of(const Mesh& mesh, const std::vector<VertexId>& ids) {
  std::vector<Vec3> out;
  out.reserve(ids.size());
  for (VertexId v : ids) out.push_back(mesh.vertices[v]);
  return out;
}

struct PositionHash {
  std::size_t operator()(const Vec3& p) const noexcept {
    std::uint64_t h = 0;
    for (int i = 0; i < 3; ++i) {
      h = h * 0x100000001b3ull ^ std::bit_cast<std::uint64_t>(p[i]);
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct PositionEqual {
  bool operator()(const Vec3& a, const Vec3& b) const noexcept {
    return std::bit_cast<std::uint64_t>(a.x()) == std::bit_cast<std::uint64_t>(b.x()) &&
           std::bit_cast<std::uint64_t>(a.y()) == std::bit_cast<std::uint64_t>(b.y()) &&
           std::bit_cast<std::uint64_t>(a.z()) == std::bit_cast<std::uint64_t>(b.z());
  }
};

}  // namespace

std::vector<VertexId> distinct_position_vertices(const Mesh& mesh) {
  std::unordered_set<Vec3, PositionHash, PositionEqual> seen;
  seen.reserve(mesh.vertices.size());
  std::vector<VertexId> out;
  for (VertexId v = 0; v < mesh.vertices.size(); ++v) {
    if (seen.insert(mesh.vertices[v]).second) out.push_back(v);
  }
  return out;
}

std::vector<VertexId> sample_random_indices(const Mesh& mesh, std::size_t kn, std::uint64_t seed) {
  check_request(mesh, kn);
  std::vector<VertexId> candidates = distinct_position_vertices(mesh);
  if (kn >= candidates.size()) return candidates;

  // Partial Fisher-Yates: the first kn slots end up a uniform sample.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < kn; ++i) {
    const std::size_t j = i + uniform_below(rng, candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(kn);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

std::vector<Vec3> sample_random(const Mesh& mesh, std::size_t kn, std::uint64_t seed) {
  return positions_of(mesh, sample_random_indices(mesh, kn, seed));
}

std::vector<VertexId> sample_fps_indices(const Mesh& mesh, std::size_t kn) {
  check_request(mesh, kn);
  const std::vector<VertexId> candidates = distinct_position_vertices(mesh);
  const std::size_t n = candidates.size();
  kn = std::min(kn, n);

  std::vector<VertexId> chosen;
  chosen.reserve(kn);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::size_t current = 0;  // candidates[0] is vertex 0
  while (true) {
    chosen.push_back(candidates[current]);
    min_d2[current] = -1.0;
    if (chosen.size() == kn) break;
    const Vec3& c = mesh.vertices[candidates[current]];
    std::size_t best = n;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_d2[i] < 0) continue;
      const double d2 = squared_distance(mesh.vertices[candidates[i]], c);
      if (d2 < min_d2[i]) min_d2[i] = d2;
      // Candidates are in ascending vertex order, so strict > keeps the
      // smallest index among ties.
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    current = best;
  }
  return chosen;
}

std::vector<Vec3> sample_fps(const Mesh& mesh, std::size_t kn) {
  return positions_of(mesh, sample_fps_indices(mesh, kn));
}

KeypointSet pair_keypoints(const std::vector<Vec3>& keypoints, const Mesh& ref, const Mesh& dist,
                           unsigned threads) {
  if (ref.vertices.empty() || dist.vertices.empty()) {
    throw Error(ErrorKind::Parameter, "cannot pair keypoints against an empty mesh");
  }
  const KdTree ref_tree(ref.vertices);
  const KdTree dist_tree(dist.vertices);
  KeypointSet set;
  set.keypoints = keypoints;
  set.pairs.resize(keypoints.size());
  parallel_for(keypoints.size(), threads, [&](std::size_t i) {
    set.pairs[i] = {ref_tree.nearest(keypoints[i]), dist_tree.nearest(keypoints[i])};
  });
  return set;
}

}  // namespace gpsim
