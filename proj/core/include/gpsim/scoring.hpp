#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpsim/clean.hpp"
#include "gpsim/features.hpp"
#include "gpsim/image.hpp"
#include "gpsim/mesh.hpp"
#include "gpsim/patch.hpp"
#include "gpsim/sampling.hpp"
#include "gpsim/texturing.hpp"

namespace gpsim {

enum class KeypointSource { Distorted, Reference };

struct MetricConfig {
  std::size_t keypoints = 500;
  Sampler sampler = Sampler::FarthestPoint;
  std::uint64_t seed = 42;
  double tau_scale = 5e-4;  // tau = tau_scale * reference bounding-box scale
  double stability = 2.22e-16;
  std::array<double, 3> gamma{6.0, 1.0, 1.0};
  ColorSpace color_space = ColorSpace::Bt601;
  CropFormula crop_formula = CropFormula::Shrink;
  KernelVariant kernel = KernelVariant::Gaussian;
  LaplacianVariant laplacian = LaplacianVariant::Symmetric;
  KeypointSource keypoint_source = KeypointSource::Distorted;
  unsigned threads = 1;  // 0 = hardware concurrency; never changes results

  // Throws Error(Parameter).
  void validate() const;
};

nlohmann::json to_json(const MetricConfig& config);

struct QualityScore {
  double q = 0.0;
  double sim_pcs = 0.0;
  double sim_dmc = 0.0;
  double sim_pca = 0.0;
  double sim_pcv = 0.0;
  std::array<double, 3> channel_pcs{};
  std::array<double, 3> channel_pca{};
  std::array<double, 3> channel_pcv{};
  std::size_t keypoints_used = 0;
  std::size_t keypoints_skipped = 0;
};

// {q, sim_pcs, sim_dmc, sim_pca, sim_pcv, keypoints_used, keypoints_skipped, config_echo}
nlohmann::json to_json(const QualityScore& score, const MetricConfig& config);

// (|2 fr fd| + T) / (fr^2 + fd^2 + T)
double feature_similarity(double fr, double fd, double stability);

// Arithmetic mean, accumulated in index order. Throws Error(Scoring) if empty.
double pool_keypoints(std::span<const double> sims);

// sum(gamma_i * sim_i) / sum(gamma_i)
double pool_channels(const std::array<double, 3>& sims, const std::array<double, 3>& gamma);

struct KeypointRecord {
  Vec3 keypoint = Vec3::Zero();
  VertexId ref_vertex = 0;
  VertexId dist_vertex = 0;
  std::optional<std::string> skipped;  // reason, when the keypoint was dropped
  PatchFeatures ref_features;
  PatchFeatures dist_features;
  CropDiagnostics ref_crop;
  CropDiagnostics dist_crop;
  std::array<double, 10> similarity{};  // same layout as PatchFeatures::flat()
};

struct ScoreResult {
  QualityScore score;
  CleanReport ref_clean;
  CleanReport dist_clean;
  double tau = 0.0;
  std::vector<KeypointRecord> keypoints;
};

// Runs the whole pipeline from cleaning both meshes to pooling. Keypoints whose
// patch or features degenerate are dropped from every average. Errors are
// re-raised with the failing stage in the message.
ScoreResult evaluate_pair(const Mesh& ref, const TextureImage& ref_texture, const Mesh& dist,
                          const TextureImage& dist_texture, const MetricConfig& config);

QualityScore score_pair(const Mesh& ref, const TextureImage& ref_texture, const Mesh& dist,
                        const TextureImage& dist_texture, const MetricConfig& config);

struct PairPaths {
  std::filesystem::path ref_mesh;
  std::filesystem::path ref_texture;
  std::filesystem::path dist_mesh;
  std::filesystem::path dist_texture;
};

// Loads the four files (input errors carry "load reference mesh" etc.) and
// runs evaluate_pair.
ScoreResult evaluate_files(const PairPaths& paths, const MetricConfig& config);

nlohmann::json keypoints_to_json(const std::vector<KeypointRecord>& records);

}  // namespace gpsim
