#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gpsim {

struct ManifestRow {
  std::string ref_mesh;
  std::string ref_tex;
  std::string dist_mesh;
  std::string dist_tex;
  std::optional<double> mos;
  std::optional<std::string> label;  // `class` column, for per-class breakdowns
};

struct Manifest {
  std::vector<ManifestRow> rows;
  bool has_mos = false;
  bool has_class = false;
};

// CSV with header `ref_mesh,ref_tex,dist_mesh,dist_tex[,mos][,class]` in any
// column order. Empty lines are skipped; fields may be double-quoted.
// Throws ParseError(Manifest) naming the 1-based data row.
Manifest read_manifest(std::string_view text);

struct ScoredRow {
  ManifestRow row;
  double score = 0.0;
};

// `ref_mesh,ref_tex,dist_mesh,dist_tex[,mos][,class],score`
std::string write_scores_csv(std::span<const ScoredRow> rows, bool with_mos, bool with_class);
nlohmann::json scores_to_json(std::span<const ScoredRow> rows);

// Pre-computed scores for correlation only: header `score,mos[,class]`.
struct ScoreTable {
  std::vector<double> scores;
  std::vector<double> mos;
  std::vector<std::string> labels;  // empty when there is no class column
};
ScoreTable read_score_table(std::string_view text);

// Splits one CSV record; handles "quoted, fields" and "" escapes.
std::vector<std::string> split_csv_record(std::string_view line);

}  // namespace gpsim
