#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gpsim/clean.hpp"
#include "gpsim/image.hpp"
#include "gpsim/mesh.hpp"

namespace gpsim::fixtures {

// Geodesic sphere: icosahedron split `subdivisions` times, projected onto the
// sphere. Texture coordinates are the planar projection u = (x/r + 1)/2,
// v = (y/r + 1)/2, so the mesh has no uv seams.
Mesh icosphere(int subdivisions, double radius = 1.0);

// `cells` x `cells` quads over [0, size]^2 in z = 0, uv = (x, y) / size.
Mesh planar_grid(int cells, double size = 1.0);

// Unit cube as OBJ text: 8 positions, 14 texture coordinates (a cross-shaped
// unwrap), 6 quads. Its wedge split has 14 vertices and 12 triangles.
std::string seamed_cube_obj();

// 4x4-cell planar grid as OBJ text with known defects injected.
std::string dirty_grid_obj();
inline constexpr CleanReport kDirtyGridDefects{3, 2, 2, 1, 2};

// Shortest-edge collapse to the midpoint (position and uv) until at most
// `target_faces` remain. Collapses that break the link condition or flip a
// face are skipped. Expects a closed manifold with one vertex per position.
Mesh decimate(const Mesh& mesh, std::size_t target_faces);

TextureImage checker_texture(int size, int cell);
TextureImage uniform_texture(int width, int height, Rgb color);
TextureImage smooth_texture(int size);

// Adds i.i.d. Gaussian noise (8-bit units) to every channel, rounding and
// clamping to [0, 255]. sigma = 0 returns the input unchanged.
TextureImage add_gaussian_noise(const TextureImage& image, double sigma, std::uint64_t seed);

inline constexpr std::array<int, 4> kNoiseLevels{0, 5, 10, 20};
inline constexpr std::array<int, 3> kDecimationPercents{90, 70, 50};
inline constexpr int kLadderSubdivisions = 4;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

struct CorpusFile {
  std::string path;  // relative to the corpus root, '/' separated
  std::size_t bytes = 0;
  std::uint64_t hash = 0;
};

struct CorpusPair {
  std::string ref_mesh;
  std::string ref_texture;
  std::string dist_mesh;
  std::string dist_texture;
};

// Writes the full corpus under `dir` (created if needed) and returns the file
// list in write order. Only the noise textures depend on `seed`.
// Throws Error(Io) if the directory cannot be written.
std::vector<CorpusFile> write_corpus(const std::filesystem::path& dir, std::uint64_t seed = 1);

// Every mesh paired with itself, followed by the noise and decimation ladder.
std::vector<CorpusPair> corpus_pairs();

// Meshes of the corpus with the texture they are paired with.
std::vector<CorpusPair> corpus_self_pairs();
std::vector<CorpusPair> ladder_pairs();

// Fabricated MOS for the ladder rows, in ladder_pairs() order.
std::vector<double> ladder_mos();

}  // namespace gpsim::fixtures
