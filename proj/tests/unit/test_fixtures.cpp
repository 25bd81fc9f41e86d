#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gpsim/clean.hpp"
#include "gpsim/error.hpp"
#include "gpsim/obj.hpp"
#include "gpsim/tools/fixtures.hpp"
#include "oracles.hpp"

namespace gpsim {
namespace {

// Frozen after the first generation with the default seed. PNG bytes depend on
// the zlib build, so a different zlib may legitimately need a refresh.
const std::map<std::string, std::uint64_t> kFrozenHashes = {
    {"meshes/ico1.obj", 0xcade287411c61edeULL},
    {"meshes/ico2.obj", 0x4ac88e70745c22acULL},
    {"meshes/ico3.obj", 0x3bc554f066089c42ULL},
    {"meshes/ico4.obj", 0x912c2a4022e639e0ULL},
    {"meshes/grid.obj", 0x5fff184ac41fd353ULL},
    {"meshes/cube.obj", 0x3690c2c62708d7d9ULL},
    {"meshes/dirty.obj", 0x87070831bfc842b8ULL},
    {"meshes/ico4_dec90.obj", 0x6253c1b3e1c4e001ULL},
    {"meshes/ico4_dec70.obj", 0xd66c37b63b8d491aULL},
    {"meshes/ico4_dec50.obj", 0x8da01469a5f405e3ULL},
    {"textures/checker.png", 0xedc994dad339b0f2ULL},
    {"textures/uniform.png", 0xe806c54ecd23a753ULL},
    {"textures/smooth.png", 0xd08378a87d2c3b52ULL},
    {"textures/noise_00.png", 0xd08378a87d2c3b52ULL},
    {"textures/noise_05.png", 0xb49e04176686d2a6ULL},
    {"textures/noise_10.png", 0x693ff55335e4cb2dULL},
    {"textures/noise_20.png", 0x737dc358f9174984ULL},
    {"ladder.csv", 0xa5cd0e8692667767ULL},
};

std::map<std::string, std::uint64_t> hashes(const std::vector<fixtures::CorpusFile>& files) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& f : files) out[f.path] = f.hash;
  return out;
}

TEST(Fixtures, DefaultCorpusMatchesFrozenHashes) {
  const auto files = fixtures::write_corpus(testing::scratch_dir("frozen"));
  EXPECT_EQ(hashes(files), kFrozenHashes);
}

TEST(Fixtures, IndexDescribesFiles) {
  const auto dir = testing::scratch_dir("index");
  const auto files = fixtures::write_corpus(dir);
  const auto index = nlohmann::json::parse(read_text_file(dir / "index.json"));
  ASSERT_EQ(index["files"].size(), files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto bytes = read_binary_file(dir / files[i].path);
    EXPECT_EQ(bytes.size(), files[i].bytes);
    EXPECT_EQ(fixtures::fnv1a64(bytes), files[i].hash);
    EXPECT_EQ(index["files"][i]["path"], files[i].path);
  }
}

TEST(Fixtures, SameSeedSameBytes) {
  const auto a = fixtures::write_corpus(testing::scratch_dir("seed_a"), 77);
  const auto b = fixtures::write_corpus(testing::scratch_dir("seed_b"), 77);
  EXPECT_EQ(hashes(a), hashes(b));
}

TEST(Fixtures, SeedOnlyChangesNoiseTextures) {
  const auto a = hashes(fixtures::write_corpus(testing::scratch_dir("s1"), 1));
  const auto b = hashes(fixtures::write_corpus(testing::scratch_dir("s2"), 2));
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [path, hash] : a) {
    const bool noisy = path.rfind("textures/noise_", 0) == 0 && path != "textures/noise_00.png";
    if (noisy) {
      EXPECT_NE(b.at(path), hash) << path;
    } else {
      EXPECT_EQ(b.at(path), hash) << path;
    }
  }
}

TEST(Fixtures, UnwritableDirectoryIsIoError) {
  const auto dir = testing::scratch_dir("blocked");
  write_file(dir / "file", "x");
  try {
    fixtures::write_corpus(dir / "file" / "corpus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Fixtures, IcosphereCounts) {
  for (int s = 0; s <= 4; ++s) {
    const Mesh m = fixtures::icosphere(s, 2.0);
    const std::size_t faces = 20u << (2 * s);
    EXPECT_EQ(m.faces.size(), faces);
    EXPECT_EQ(m.vertices.size(), faces / 2 + 2);
    for (const Vec3& v : m.vertices) EXPECT_NEAR(v.norm(), 2.0, 1e-12);
    EXPECT_EQ(clean(m).second, (CleanReport{0, 0, 0, 0, 1}));
  }
}

TEST(Fixtures, SeamedCubeShape) {
  const Mesh cube = wedge_split(parse_obj(fixtures::seamed_cube_obj()));
  EXPECT_EQ(cube.vertices.size(), 14u);
  EXPECT_EQ(cube.faces.size(), 12u);
}

// Every edge is shared by exactly two faces with opposite directions, no face
// points inward, and the Euler characteristic is 2.
void expect_closed_sphere(const Mesh& m) {
  std::map<std::pair<VertexId, VertexId>, int> directed;
  for (const Face& f : m.faces) {
    for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
    const Vec3 n = (m.vertices[f[1]] - m.vertices[f[0]]).cross(m.vertices[f[2]] - m.vertices[f[0]]);
    EXPECT_GT(n.dot(m.vertices[f[0]] + m.vertices[f[1]] + m.vertices[f[2]]), 0.0);
  }
  for (const auto& [edge, count] : directed) {
    EXPECT_EQ(count, 1);
    EXPECT_EQ(directed.count({edge.second, edge.first}), 1u);
  }
  const long v = static_cast<long>(m.vertices.size());
  const long f = static_cast<long>(m.faces.size());
  const long e = static_cast<long>(directed.size()) / 2;
  EXPECT_EQ(v - e + f, 2);
}

TEST(Fixtures, DecimationKeepsAClosedSphere) {
  const Mesh base = fixtures::icosphere(fixtures::kLadderSubdivisions);
  std::size_t previous = base.faces.size();
  for (int percent : fixtures::kDecimationPercents) {
    const std::size_t target = base.faces.size() * static_cast<std::size_t>(percent) / 100;
    const Mesh d = fixtures::decimate(base, target);
    EXPECT_LE(d.faces.size(), target);
    EXPECT_GE(d.faces.size(), target - 2);
    EXPECT_LT(d.faces.size(), previous);
    previous = d.faces.size();
    expect_closed_sphere(d);
    EXPECT_EQ(clean(d).second, (CleanReport{0, 0, 0, 0, 1}));
  }
}

TEST(Fixtures, NoiseIsClampedAndSeeded) {
  const TextureImage base = fixtures::smooth_texture(32);
  EXPECT_EQ(fixtures::add_gaussian_noise(base, 0, 5).pixels, base.pixels);
  const TextureImage a = fixtures::add_gaussian_noise(base, 20, 5);
  EXPECT_EQ(a.pixels, fixtures::add_gaussian_noise(base, 20, 5).pixels);
  EXPECT_NE(a.pixels, fixtures::add_gaussian_noise(base, 20, 6).pixels);
  double sum_sq = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(base.pixels[i]);
    sum_sq += d * d;
  }
  const double sigma = std::sqrt(sum_sq / double(a.pixels.size()));
  EXPECT_GT(sigma, 15.0);
  EXPECT_LT(sigma, 21.0);
}

TEST(Fixtures, LadderShape) {
  const auto ladder = fixtures::ladder_pairs();
  const auto mos = fixtures::ladder_mos();
  ASSERT_EQ(ladder.size(), 7u);
  ASSERT_EQ(mos.size(), 7u);
  EXPECT_EQ(std::set<double>(mos.begin(), mos.end()).size(), 7u);
  const auto pairs = fixtures::corpus_pairs();
  EXPECT_EQ(pairs.size(), fixtures::corpus_self_pairs().size() + ladder.size());
  EXPECT_GE(fixtures::corpus_self_pairs().size(), 6u);
}

}  // namespace
}  // namespace gpsim
