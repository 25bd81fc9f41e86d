#pragma once

#include <cstdint>
#include <vector>

#include "gpsim/mesh.hpp"

namespace gpsim {

enum class Sampler { Random, FarthestPoint };

// Keypoints and their nearest vertices in the reference and distorted meshes.
struct KeypointSet {
  struct Pair {
    VertexId ref;
    VertexId dist;
    friend bool operator==(const Pair&, const Pair&) = default;
  };
  std::vector<Vec3> keypoints;
  std::vector<Pair> pairs;
};

// Vertices whose position differs from every lower-indexed vertex. Seam
// wedges share a position, so sampling runs over this set to pick each
// location once.
std::vector<VertexId> distinct_position_vertices(const Mesh& mesh);

// kn distinct positions chosen uniformly without replacement (seeded), in
// ascending vertex order. If kn covers every position, all are returned.
// Throws Error(Parameter) for kn == 0 or an empty mesh.
std::vector<VertexId> sample_random_indices(const Mesh& mesh, std::size_t kn, std::uint64_t seed);
std::vector<Vec3> sample_random(const Mesh& mesh, std::size_t kn, std::uint64_t seed);

// Greedy farthest-point order starting at vertex 0; ties go to the smallest
// index.
std::vector<VertexId> sample_fps_indices(const Mesh& mesh, std::size_t kn);
std::vector<Vec3> sample_fps(const Mesh& mesh, std::size_t kn);

// Exact nearest vertex of every keypoint in both meshes (smallest index on
// ties). `threads` = 0 uses the hardware concurrency.
KeypointSet pair_keypoints(const std::vector<Vec3>& keypoints, const Mesh& ref, const Mesh& dist,
                           unsigned threads = 1);

}  // namespace gpsim
