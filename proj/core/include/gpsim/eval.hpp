#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpsim/manifest.hpp"
#include "gpsim/scoring.hpp"

namespace gpsim {

// Monotone 4-parameter logistic m(x) = (a - b) / (1 + exp(-(x - c) / d)) + b.
struct LogisticParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  double operator()(double x) const;
};

struct FitOptions {
  int max_iterations = 500;   // per simplex run
  double tolerance = 1e-10;   // relative spread of the simplex values
};

// Least-squares fit with Nelder-Mead. Two starts are tried, the data-driven
// one (a = max mos, b = min mos, c = median score, d = score range / 4) and a
// near-linear one (wide d, slope matched to the least-squares line); each is
// refined once more from its end point and the lowest residual wins.
// Throws Error(Fit) for fewer than 3 samples or constant scores.
LogisticParams fit_logistic(std::span<const double> scores, std::span<const double> mos,
                            const FitOptions& options = {});

double sum_squared_error(const LogisticParams& p, std::span<const double> scores,
                         std::span<const double> mos);

struct Correlations {
  double plcc = 0.0;
  double srcc = 0.0;
  double rmse = 0.0;
};

// Ranks starting at 1; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Throws Error(Correlation) on size mismatch, n < 2 or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
double rmse(std::span<const double> x, std::span<const double> y);
Correlations correlations(std::span<const double> mapped, std::span<const double> mos);

struct EvalRow {
  std::size_t index = 0;  // 0-based manifest row
  double score = 0.0;
  double mos = 0.0;
  double mapped = 0.0;
  std::string label;
};

struct FailedRow {
  std::size_t index = 0;
  std::string error;
};

struct ClassBreakdown {
  std::string label;
  std::size_t n = 0;
  std::optional<Correlations> indicators;  // absent when undefined for the class
};

struct EvalReport {
  double plcc = 0.0;
  double srcc = 0.0;
  double rmse = 0.0;
  double plcc_raw = 0.0;  // before the logistic mapping
  LogisticParams logistic;
  std::size_t n = 0;
  std::vector<EvalRow> rows;
  std::vector<FailedRow> failed;
  std::vector<ClassBreakdown> classes;
};

// Fits the mapping and computes the indicators. `labels` is empty or one per
// score. Throws Error(Correlation) when the scores (or MOS) are constant.
EvalReport evaluate_scores(std::span<const double> scores, std::span<const double> mos,
                           std::span<const std::string> labels = {});

// Scores every manifest row (paths relative to `base_dir`), then evaluates.
// Rows that fail are reported and excluded; more than half failing aborts
// with Error(Scoring). Every row needs a MOS value.
EvalReport run_benchmark(const Manifest& manifest, const std::filesystem::path& base_dir,
                         const MetricConfig& config, unsigned threads = 1);

nlohmann::json to_json(const EvalReport& report);
std::string eval_rows_csv(const EvalReport& report);

}  // namespace gpsim
