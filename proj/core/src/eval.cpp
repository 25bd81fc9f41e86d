#include "gpsim/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpsim/error.hpp"
#include "gpsim/parallel.hpp"

namespace gpsim {
namespace {

using Point = std::array<double, 4>;

LogisticParams from_point(const Point& p) { return {p[0], p[1], p[2], p[3]}; }

double objective(const Point& p, std::span<const double> x, std::span<const double> y) {
  if (p[3] == 0.0 || !std::isfinite(p[3])) return std::numeric_limits<double>::infinity();
  const double sse = sum_squared_error(from_point(p), x, y);
  return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
Point nelder_mead(Point start, const Point& step, std::span<const double> x,
                  std::span<const double> y, const FitOptions& options) {
  constexpr int n = 4;
  std::array<Point, n + 1> simplex;
  std::array<double, n + 1> value;
  simplex[0] = start;
  for (int i = 0; i < n; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += step[i];
  }
  for (int i = 0; i <= n; ++i) value[i] = objective(simplex[i], x, y);

  auto blend = [](const Point& a, const Point& b, double t) {
    Point r;
    for (int i = 0; i < n; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::array<int, n + 1> order;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return value[a] < value[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];

    const double spread = std::abs(value[worst] - value[best]);
    if (std::isfinite(spread) &&
        spread <= options.tolerance * (std::abs(value[best]) + std::abs(value[worst])) + 1e-300) {
      break;
    }

    Point centroid{};
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;
    }
    const Point reflected = blend(centroid, simplex[worst], -1.0);
    const double fr = objective(reflected, x, y);
    if (fr < value[best]) {
      const Point expanded = blend(centroid, simplex[worst], -2.0);
      const double fe = objective(expanded, x, y);
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    const Point contracted = outside ? blend(centroid, reflected, 0.5)
                                     : blend(centroid, simplex[worst], 0.5);
    const double fc = objective(contracted, x, y);
    if (fc < (outside ? fr : value[worst])) {
      simplex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = blend(simplex[best], simplex[i], 0.5);
      value[i] = objective(simplex[i], x, y);
    }
  }
  const auto best = std::min_element(value.begin(), value.end()) - value.begin();
  return simplex[static_cast<std::size_t>(best)];
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Correlation, "vectors differ in length");
  if (x.size() < 2) throw Error(ErrorKind::Correlation, "need at least 2 samples");
}

nlohmann::json correlations_json(const Correlations& c) {
  return {{"plcc", c.plcc}, {"srcc", c.srcc}, {"rmse", c.rmse}};
}

}  // namespace

double LogisticParams::operator()(double x) const {
  return (a - b) / (1.0 + std::exp(-(x - c) / d)) + b;
}

double sum_squared_error(const LogisticParams& p, std::span<const double> scores,
                         std::span<const double> mos) {
  double sse = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double r = p(scores[i]) - mos[i];
    sse += r * r;
  }
  return sse;
}

LogisticParams fit_logistic(std::span<const double> scores, std::span<const double> mos,
                            const FitOptions& options) {
  if (scores.size() != mos.size()) throw Error(ErrorKind::Fit, "scores and mos differ in length");
  if (scores.size() < 3) throw Error(ErrorKind::Fit, "logistic fit needs at least 3 samples");
  const auto [smin, smax] = std::minmax_element(scores.begin(), scores.end());
  const double range = *smax - *smin;
  if (!(range > 0.0)) throw Error(ErrorKind::Fit, "scores are all equal; mapping undefined");
  const auto [mmin, mmax] = std::minmax_element(mos.begin(), mos.end());
  const double mos_range = std::max(*mmax - *mmin, 1e-12);

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);

  // Least-squares line, used to seed the near-linear start.
  const double sx = mean_of(scores), sy = mean_of(mos);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sxy += (scores[i] - sx) * (mos[i] - sy);
    sxx += (scores[i] - sx) * (scores[i] - sx);
  }
  const double slope = sxy / sxx;
  const double wide = range;

  const std::array<Point, 2> starts = {
      Point{*mmax, *mmin, median, range / 4.0},
      Point{sy + 2.0 * wide * slope, sy - 2.0 * wide * slope, sx, wide},
  };

  Point best{};
  double best_value = std::numeric_limits<double>::infinity();
  for (const Point& start : starts) {
    Point p = start;
    for (int run = 0; run < 2; ++run) {
      const Point step{0.1 * std::max(std::abs(p[0] - p[1]), mos_range),
                       0.1 * std::max(std::abs(p[0] - p[1]), mos_range), 0.1 * range,
                       0.5 * p[3]};
      p = nelder_mead(p, step, scores, mos, options);
    }
    const double v = objective(p, scores, mos);
    if (v < best_value) {
      best_value = v;
      best = p;
    }
  }
  if (!std::isfinite(best_value)) throw Error(ErrorKind::Fit, "logistic fit diverged");
  return from_point(best);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorKind::Correlation, "zero variance; correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s / static_cast<double>(x.size()));
}

Correlations correlations(std::span<const double> mapped, std::span<const double> mos) {
  return {pearson(mapped, mos), spearman(mapped, mos), rmse(mapped, mos)};
}

EvalReport evaluate_scores(std::span<const double> scores, std::span<const double> mos,
                           std::span<const std::string> labels) {
  if (scores.size() != mos.size() || (!labels.empty() && labels.size() != scores.size())) {
    throw Error(ErrorKind::Correlation, "scores, mos and labels differ in length");
  }
  const auto [smin, smax] = std::minmax_element(scores.begin(), scores.end());
  if (scores.empty() || *smin == *smax) {
    throw Error(ErrorKind::Correlation, "scores have zero variance; correlation undefined");
  }
  EvalReport report;
  report.n = scores.size();
  report.logistic = fit_logistic(scores, mos);
  std::vector<double> mapped(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) mapped[i] = report.logistic(scores[i]);

  const Correlations c = correlations(mapped, mos);
  report.plcc = c.plcc;
  report.srcc = c.srcc;
  report.rmse = c.rmse;
  report.plcc_raw = pearson(scores, mos);

  for (std::size_t i = 0; i < scores.size(); ++i) {
    report.rows.push_back({i, scores[i], mos[i], mapped[i], labels.empty() ? "" : labels[i]});
  }

  if (!labels.empty()) {
    std::vector<std::string> order;
    for (const std::string& l : labels) {
      if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
    }
    for (const std::string& label : order) {
      std::vector<double> m, y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) {
          m.push_back(mapped[i]);
          y.push_back(mos[i]);
        }
      }
      ClassBreakdown cls{label, m.size(), std::nullopt};
      try {
        cls.indicators = correlations(m, y);
      } catch (const Error&) {
        // Too few rows or a constant column: indicators stay undefined.
      }
      report.classes.push_back(std::move(cls));
    }
  }
  return report;
}

EvalReport run_benchmark(const Manifest& manifest, const std::filesystem::path& base_dir,
                         const MetricConfig& config, unsigned threads) {
  const std::size_t n = manifest.rows.size();
  if (n == 0) throw Error(ErrorKind::Manifest, "manifest has no rows");
  for (std::size_t i = 0; i < n; ++i) {
    if (!manifest.rows[i].mos) {
      throw ParseError(ErrorKind::Manifest, i + 1, "row has no mos value");
    }
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  MetricConfig row_config = config;
  row_config.threads = 1;
  std::vector<std::optional<double>> scores(n);
  std::vector<std::string> errors(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const ManifestRow& row = manifest.rows[i];
    try {
      scores[i] = evaluate_files({resolve(row.ref_mesh), resolve(row.ref_tex),
                                  resolve(row.dist_mesh), resolve(row.dist_tex)},
                                 row_config)
                      .score.q;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  std::vector<double> ok_scores, ok_mos;
  std::vector<std::string> ok_labels;
  std::vector<std::size_t> ok_index;
  std::vector<FailedRow> failed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!scores[i]) {
      failed.push_back({i, errors[i]});
      continue;
    }
    ok_scores.push_back(*scores[i]);
    ok_mos.push_back(*manifest.rows[i].mos);
    if (manifest.has_class) ok_labels.push_back(manifest.rows[i].label.value_or(""));
    ok_index.push_back(i);
  }
  if (2 * failed.size() > n) {
    throw Error(ErrorKind::Scoring, std::to_string(failed.size()) + " of " + std::to_string(n) +
                                        " rows failed to score; first: " + failed.front().error);
  }
  EvalReport report = evaluate_scores(ok_scores, ok_mos, ok_labels);
  for (std::size_t k = 0; k < report.rows.size(); ++k) report.rows[k].index = ok_index[k];
  report.failed = std::move(failed);
  return report;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const EvalRow& row : r.rows) {
    nlohmann::json j = {{"row", row.index},
                        {"score", row.score},
                        {"mos", row.mos},
                        {"mapped_score", row.mapped}};
    if (!row.label.empty()) j["class"] = row.label;
    rows.push_back(std::move(j));
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const FailedRow& f : r.failed) failed.push_back({{"row", f.index}, {"error", f.error}});
  nlohmann::json classes = nlohmann::json::array();
  for (const ClassBreakdown& c : r.classes) {
    nlohmann::json j = {{"class", c.label}, {"n", c.n}};
    j["indicators"] = c.indicators ? correlations_json(*c.indicators) : nlohmann::json(nullptr);
    classes.push_back(std::move(j));
  }
  return {{"plcc", r.plcc},
          {"srcc", r.srcc},
          {"rmse", r.rmse},
          {"plcc_raw", r.plcc_raw},
          {"n", r.n},
          {"logistic_params",
           {{"a", r.logistic.a}, {"b", r.logistic.b}, {"c", r.logistic.c}, {"d", r.logistic.d}}},
          {"per_row", std::move(rows)},
          {"failed", std::move(failed)},
          {"classes", std::move(classes)}};
}

std::string eval_rows_csv(const EvalReport& r) {
  std::string out = "row,score,mos,mapped_score,class\n";
  for (const EvalRow& row : r.rows) {
    nlohmann::json label = row.label;  // reuse JSON string escaping for commas/quotes
    out += std::to_string(row.index) + ',' + nlohmann::json(row.score).dump() + ',' +
           nlohmann::json(row.mos).dump() + ',' + nlohmann::json(row.mapped).dump() + ',' +
           (row.label.empty() ? std::string() : label.dump()) + '\n';
  }
  return out;
}

}  // namespace gpsim
