#include "gpsim/scoring.hpp"

#include <cmath>
#include <string>

#include "gpsim/error.hpp"
#include "gpsim/obj.hpp"
#include "gpsim/parallel.hpp"

namespace gpsim {
namespace {

const char* name_of(Sampler s) { return s == Sampler::Random ? "rs" : "fps"; }
const char* name_of(ColorSpace c) { return c == ColorSpace::Bt601 ? "bt601" : "bt709"; }
const char* name_of(CropFormula c) { return c == CropFormula::Shrink ? "shrink" : "printed"; }
const char* name_of(KernelVariant k) { return k == KernelVariant::Gaussian ? "gaussian" : "printed"; }
const char* name_of(LaplacianVariant l) {
  return l == LaplacianVariant::Symmetric ? "symmetric" : "printed";
}
const char* name_of(KeypointSource s) { return s == KeypointSource::Distorted ? "dist" : "ref"; }

nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

nlohmann::json features_json(const PatchFeatures& f) {
  return {{"pcs", f.pcs}, {"dmc", f.dmc}, {"pca", f.pca}, {"pcv", f.pcv}};
}

nlohmann::json crop_json(const CropDiagnostics& c) {
  return {{"D_r", c.ref_mean_distance}, {"D_d", c.dist_mean_distance}, {"t", c.ratio},
          {"l", c.size_ratio},           {"step1", c.step1_applied},   {"step2", c.step2_applied}};
}

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    rethrow_with_stage(e, stage);
  }
}

}  // namespace

void MetricConfig::validate() const {
  if (keypoints == 0) throw Error(ErrorKind::Parameter, "keypoints must be at least 1");
  if (!(tau_scale > 0.0) || !std::isfinite(tau_scale)) {
    throw Error(ErrorKind::Parameter, "tau scale must be positive");
  }
  if (!(stability > 0.0) || !std::isfinite(stability)) {
    throw Error(ErrorKind::Parameter, "stability constant T must be positive");
  }
  for (double g : gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw Error(ErrorKind::Parameter, "channel weights must be positive");
    }
  }
}

nlohmann::json to_json(const MetricConfig& c) {
  return {{"keypoints", c.keypoints},
          {"sampler", name_of(c.sampler)},
          {"seed", c.seed},
          {"tau_scale", c.tau_scale},
          {"T", c.stability},
          {"gamma", c.gamma},
          {"color_space", name_of(c.color_space)},
          {"crop_formula", name_of(c.crop_formula)},
          {"kernel", name_of(c.kernel)},
          {"laplacian", name_of(c.laplacian)},
          {"keypoint_source", name_of(c.keypoint_source)}};
}

nlohmann::json to_json(const QualityScore& s, const MetricConfig& config) {
  return {{"q", s.q},
          {"sim_pcs", s.sim_pcs},
          {"sim_dmc", s.sim_dmc},
          {"sim_pca", s.sim_pca},
          {"sim_pcv", s.sim_pcv},
          {"keypoints_used", s.keypoints_used},
          {"keypoints_skipped", s.keypoints_skipped},
          {"config_echo", to_json(config)}};
}

double feature_similarity(double fr, double fd, double stability) {
  return (std::abs(2.0 * fr * fd) + stability) / (fr * fr + fd * fd + stability);
}

double pool_keypoints(std::span<const double> sims) {
  if (sims.empty()) throw Error(ErrorKind::Scoring, "no usable keypoints to pool");
  double sum = 0.0;
  for (double s : sims) sum += s;
  return sum / static_cast<double>(sims.size());
}

double pool_channels(const std::array<double, 3>& sims, const std::array<double, 3>& gamma) {
  const double total = gamma[0] + gamma[1] + gamma[2];
  return (gamma[0] * sims[0] + gamma[1] * sims[1] + gamma[2] * sims[2]) / total;
}

ScoreResult evaluate_pair(const Mesh& ref_in, const TextureImage& ref_texture, const Mesh& dist_in,
                          const TextureImage& dist_texture, const MetricConfig& config) {
  config.validate();
  if (ref_texture.empty() || dist_texture.empty()) {
    throw Error(ErrorKind::Decode, "texture image is empty");
  }
  ScoreResult result;

  auto [ref, ref_report] = with_stage("clean reference mesh", [&] { return clean(ref_in); });
  auto [dist, dist_report] = with_stage("clean distorted mesh", [&] { return clean(dist_in); });
  result.ref_clean = ref_report;
  result.dist_clean = dist_report;
  result.tau = config.tau_scale * bounding_box_scale(ref);

  const KeypointSet pairs = with_stage("keypoint selection", [&] {
    const Mesh& source = config.keypoint_source == KeypointSource::Distorted ? dist : ref;
    std::vector<Vec3> keypoints = config.sampler == Sampler::Random
                                      ? sample_random(source, config.keypoints, config.seed)
                                      : sample_fps(source, config.keypoints);
    return pair_keypoints(keypoints, ref, dist, config.threads);
  });

  const VertexFaceIndex ref_index(ref);
  const VertexFaceIndex dist_index(dist);
  const GraphOptions graph{config.kernel, config.laplacian};
  const std::size_t n = pairs.keypoints.size();
  result.keypoints.resize(n);

  parallel_for(n, config.threads, [&](std::size_t k) {
    KeypointRecord& rec = result.keypoints[k];
    rec.keypoint = pairs.keypoints[k];
    rec.ref_vertex = pairs.pairs[k].ref;
    rec.dist_vertex = pairs.pairs[k].dist;
    try {
      GeodesicPatch ref_patch = build_patch(ref, ref_index, rec.ref_vertex);
      GeodesicPatch dist_patch = build_patch(dist, dist_index, rec.dist_vertex);
      crop_pair(ref_patch, dist_patch, result.tau, config.crop_formula);
      rec.ref_crop = ref_patch.crop;
      rec.dist_crop = dist_patch.crop;
      const auto ref_tp = texture_patch(std::move(ref_patch), ref_texture, config.color_space);
      const auto dist_tp = texture_patch(std::move(dist_patch), dist_texture, config.color_space);
      rec.ref_features = extract_features(ref_tp, graph);
      rec.dist_features = extract_features(dist_tp, graph);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Patch && e.kind() != ErrorKind::Feature) throw;
      rec.skipped = e.what();
      return;
    }
    const auto fr = rec.ref_features.flat();
    const auto fd = rec.dist_features.flat();
    for (std::size_t i = 0; i < fr.size(); ++i) {
      rec.similarity[i] = feature_similarity(fr[i], fd[i], config.stability);
    }
  });

  std::array<std::vector<double>, 10> per_feature;
  for (const KeypointRecord& rec : result.keypoints) {
    if (rec.skipped) {
      ++result.score.keypoints_skipped;
      continue;
    }
    ++result.score.keypoints_used;
    for (std::size_t i = 0; i < 10; ++i) per_feature[i].push_back(rec.similarity[i]);
  }
  if (result.score.keypoints_used == 0) {
    throw Error(ErrorKind::Scoring,
                "feature pooling: all " + std::to_string(n) + " keypoints were skipped");
  }

  std::array<double, 10> pooled{};
  for (std::size_t i = 0; i < 10; ++i) pooled[i] = pool_keypoints(per_feature[i]);

  QualityScore& s = result.score;
  s.channel_pcs = {pooled[0], pooled[1], pooled[2]};
  s.sim_dmc = pooled[3];
  s.channel_pca = {pooled[4], pooled[5], pooled[6]};
  s.channel_pcv = {pooled[7], pooled[8], pooled[9]};
  s.sim_pcs = pool_channels(s.channel_pcs, config.gamma);
  s.sim_pca = pool_channels(s.channel_pca, config.gamma);
  s.sim_pcv = pool_channels(s.channel_pcv, config.gamma);
  s.q = (s.sim_pcs + s.sim_dmc + s.sim_pca + s.sim_pcv) / 4.0;
  return result;
}

QualityScore score_pair(const Mesh& ref, const TextureImage& ref_texture, const Mesh& dist,
                        const TextureImage& dist_texture, const MetricConfig& config) {
  return evaluate_pair(ref, ref_texture, dist, dist_texture, config).score;
}

ScoreResult evaluate_files(const PairPaths& paths, const MetricConfig& config) {
  config.validate();
  Mesh ref = with_stage("load reference mesh", [&] { return load_mesh(paths.ref_mesh); });
  TextureImage ref_tex =
      with_stage("load reference texture", [&] { return load_texture(paths.ref_texture); });
  Mesh dist = with_stage("load distorted mesh", [&] { return load_mesh(paths.dist_mesh); });
  TextureImage dist_tex =
      with_stage("load distorted texture", [&] { return load_texture(paths.dist_texture); });
  return evaluate_pair(ref, ref_tex, dist, dist_tex, config);
}

nlohmann::json keypoints_to_json(const std::vector<KeypointRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const KeypointRecord& r : records) {
    nlohmann::json j = {{"keypoint", vec_json(r.keypoint)},
                        {"ref_vertex", r.ref_vertex},
                        {"dist_vertex", r.dist_vertex}};
    if (r.skipped) {
      j["skipped"] = *r.skipped;
    } else {
      j["ref"] = features_json(r.ref_features);
      j["dist"] = features_json(r.dist_features);
      j["ref_crop"] = crop_json(r.ref_crop);
      j["dist_crop"] = crop_json(r.dist_crop);
      j["similarity"] = r.similarity;
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace gpsim
