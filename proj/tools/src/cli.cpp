#include "gpsim/tools/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gpsim/clean.hpp"
#include "gpsim/error.hpp"
#include "gpsim/eval.hpp"
#include "gpsim/manifest.hpp"
#include "gpsim/obj.hpp"
#include "gpsim/parallel.hpp"
#include "gpsim/scoring.hpp"
#include "gpsim/tools/fixtures.hpp"

namespace gpsim::cli {
namespace {

// Raised for bad flag values that CLI11 cannot see (environment variables).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricFlags {
  MetricConfig config;
  std::string sampler = "fps";
  std::string color_space = "bt601";
  std::string crop_formula = "shrink";
  std::string kernel = "gaussian";
  std::string laplacian = "symmetric";
  std::string keypoint_source = "dist";
  std::vector<double> gamma{6.0, 1.0, 1.0};
  std::optional<unsigned> threads;

  void add_to(CLI::App& app) {
    app.add_option("--keypoints", config.keypoints, "Number of keypoints kn")
        ->capture_default_str();
    app.add_option("--sampler", sampler, "Keypoint sampler")
        ->check(CLI::IsMember({"rs", "fps"}))
        ->capture_default_str();
    app.add_option("--seed", config.seed, "Seed for random sampling")->capture_default_str();
    app.add_option("--tau-scale", config.tau_scale,
                   "Crop threshold as a fraction of the reference bounding box")
        ->capture_default_str();
    app.add_option("--stability", config.stability, "Stability constant T")
        ->capture_default_str();
    app.add_option("--gamma", gamma, "Channel weights Y,U,V")
        ->expected(3)
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--color-space", color_space)
        ->check(CLI::IsMember({"bt601", "bt709"}))
        ->capture_default_str();
    app.add_option("--crop-formula", crop_formula)
        ->check(CLI::IsMember({"shrink", "printed"}))
        ->capture_default_str();
    app.add_option("--kernel", kernel)
        ->check(CLI::IsMember({"gaussian", "printed"}))
        ->capture_default_str();
    app.add_option("--laplacian", laplacian)
        ->check(CLI::IsMember({"symmetric", "printed"}))
        ->capture_default_str();
    app.add_option("--keypoint-source", keypoint_source)
        ->check(CLI::IsMember({"dist", "ref"}))
        ->capture_default_str();
    app.add_option("--threads", threads,
                   "Worker threads (0 = all cores; default from GEODESICPSIM_THREADS)");
  }

  MetricConfig resolve() {
    config.sampler = sampler == "rs" ? Sampler::Random : Sampler::FarthestPoint;
    config.color_space = color_space == "bt709" ? ColorSpace::Bt709 : ColorSpace::Bt601;
    config.crop_formula = crop_formula == "printed" ? CropFormula::Printed : CropFormula::Shrink;
    config.kernel = kernel == "printed" ? KernelVariant::Printed : KernelVariant::Gaussian;
    config.laplacian =
        laplacian == "printed" ? LaplacianVariant::Printed : LaplacianVariant::Symmetric;
    config.keypoint_source =
        keypoint_source == "ref" ? KeypointSource::Reference : KeypointSource::Distorted;
    std::copy(gamma.begin(), gamma.end(), config.gamma.begin());
    config.threads = thread_count();
    return config;
  }

  unsigned thread_count() const {
    if (threads) return resolve_thread_count(*threads);
    const char* env = std::getenv("GEODESICPSIM_THREADS");
    if (env == nullptr || *env == '\0') return resolve_thread_count(0);
    unsigned value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end) {
      throw UsageError(std::string("GEODESICPSIM_THREADS is not a count: '") + env + "'");
    }
    return resolve_thread_count(value);
  }
};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string full_precision(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::filesystem::path resolve_against(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

Manifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return read_manifest(text);
  } catch (const ParseError& e) {
    throw Error(ErrorKind::Manifest, path.string() + ": " + e.what());
  }
}

int cmd_clean(const std::string& in, const std::string& out_path, const std::string& report_path,
              std::ostream& out) {
  const Mesh raw = load_mesh(in);
  auto [mesh, report] = clean(raw);
  write_file(out_path, serialize_obj(mesh));
  const nlohmann::json j = to_json(report);
  if (!report_path.empty()) write_file(report_path, j.dump(2) + '\n');
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_score(const PairPaths& paths, const MetricConfig& config, bool json, bool plain,
              const std::string& dump_path, std::ostream& out, std::ostream& err) {
  const ScoreResult result = evaluate_files(paths, config);
  if (!dump_path.empty()) {
    nlohmann::json dump = {{"tau", result.tau},
                           {"ref_clean", to_json(result.ref_clean)},
                           {"dist_clean", to_json(result.dist_clean)},
                           {"keypoints", keypoints_to_json(result.keypoints)}};
    write_file(dump_path, dump.dump(2) + '\n');
  }
  const QualityScore& s = result.score;
  if (plain) {
    out << full_precision(s.q) << '\n';
    return kOk;
  }
  out << to_json(s, config).dump(2) << '\n';
  if (!json) {
    err << "q " << fixed4(s.q) << "  (pcs " << fixed4(s.sim_pcs) << ", dmc " << fixed4(s.sim_dmc)
        << ", pca " << fixed4(s.sim_pca) << ", pcv " << fixed4(s.sim_pcv) << "; "
        << s.keypoints_used << " keypoints, " << s.keypoints_skipped << " skipped)\n";
  }
  return kOk;
}

int cmd_batch(const std::string& manifest_path, const std::string& out_path, bool json,
              MetricConfig config, std::ostream& out) {
  const Manifest manifest = load_manifest(manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();
  const unsigned threads = config.threads;
  config.threads = 1;

  std::vector<ScoredRow> rows(manifest.rows.size());
  std::vector<std::optional<Error>> failures(manifest.rows.size());
  parallel_for(manifest.rows.size(), threads, [&](std::size_t i) {
    const ManifestRow& row = manifest.rows[i];
    try {
      rows[i] = {row, evaluate_files({resolve_against(base, row.ref_mesh),
                                      resolve_against(base, row.ref_tex),
                                      resolve_against(base, row.dist_mesh),
                                      resolve_against(base, row.dist_tex)},
                                     config)
                          .score.q};
    } catch (const Error& e) {
      failures[i] = e;
    }
  });
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i]) rethrow_with_stage(*failures[i], "manifest row " + std::to_string(i + 1));
  }

  const std::string text = json ? scores_to_json(rows).dump(2) + '\n'
                                : write_scores_csv(rows, manifest.has_mos, manifest.has_class);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

int cmd_eval(const std::string& manifest_path, const std::string& scores_path,
             const std::string& out_path, const std::string& csv_path, const MetricConfig& config,
             std::ostream& out) {
  EvalReport report;
  if (!scores_path.empty()) {
    const std::string text = read_text_file(scores_path);
    ScoreTable table;
    try {
      table = read_score_table(text);
    } catch (const ParseError& e) {
      throw Error(ErrorKind::Manifest, scores_path + ": " + e.what());
    }
    report = evaluate_scores(table.scores, table.mos, table.labels);
  } else {
    const Manifest manifest = load_manifest(manifest_path);
    report = run_benchmark(manifest, std::filesystem::path(manifest_path).parent_path(), config,
                           config.threads);
  }
  const nlohmann::json j = to_json(report);
  if (!csv_path.empty()) write_file(csv_path, eval_rows_csv(report));
  if (out_path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_file(out_path, j.dump(2) + '\n');
    out << "PLCC " << fixed4(report.plcc) << "  SRCC " << fixed4(report.srcc) << "  RMSE "
        << fixed4(report.rmse) << "  (n " << report.n << ", failed " << report.failed.size()
        << ")\n";
  }
  return kOk;
}

int cmd_fixtures(const std::string& dir, std::uint64_t seed, std::ostream& out) {
  const auto files = fixtures::write_corpus(dir, seed);
  out << "wrote " << files.size() << " files and index.json to " << dir << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Full-reference quality metric for textured triangle meshes", "geodesicpsim");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // clean
  std::string clean_in, clean_out, clean_report;
  CLI::App* clean_cmd = app.add_subcommand("clean", "Clean a mesh and report what was removed");
  clean_cmd->add_option("--in", clean_in, "Input OBJ")->required();
  clean_cmd->add_option("--out", clean_out, "Output OBJ")->required();
  clean_cmd->add_option("--report", clean_report, "Also write the report JSON here");

  // score
  std::string ref_mesh, ref_tex, dist_mesh, dist_tex;
  MetricFlags score_flags;
  bool score_json = false, score_plain = false;
  std::string dump_path;
  CLI::App* score_cmd = app.add_subcommand("score", "Score a distorted mesh against a reference");
  score_cmd->add_option("--ref", ref_mesh, "Reference OBJ")->required();
  score_cmd->add_option("--ref-tex", ref_tex, "Reference texture (PNG/JPEG)")->required();
  score_cmd->add_option("--dist", dist_mesh, "Distorted OBJ")->required();
  score_cmd->add_option("--dist-tex", dist_tex, "Distorted texture (PNG/JPEG)")
      ->required();
  score_flags.add_to(*score_cmd);
  CLI::Option* json_opt = score_cmd->add_flag("--json", score_json, "Print JSON only");
  CLI::Option* plain_opt = score_cmd->add_flag("--plain", score_plain, "Print only q");
  json_opt->excludes(plain_opt);
  score_cmd->add_option("--dump-features", dump_path, "Write per-keypoint features as JSON");

  // batch
  std::string batch_manifest, batch_out;
  bool batch_json = false;
  MetricFlags batch_flags;
  CLI::App* batch_cmd = app.add_subcommand("batch", "Score every row of a manifest CSV");
  batch_cmd->add_option("--manifest", batch_manifest, "Manifest CSV")->required();
  batch_cmd->add_option("--out", batch_out, "Output file (default stdout)");
  batch_cmd->add_flag("--json", batch_json, "Emit JSON instead of CSV");
  batch_flags.add_to(*batch_cmd);

  // eval
  std::string eval_manifest, eval_scores, eval_out, eval_csv;
  MetricFlags eval_flags;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Correlate scores with MOS");
  CLI::Option* m_opt = eval_cmd->add_option("--manifest", eval_manifest, "Manifest CSV with mos");
  CLI::Option* s_opt =
      eval_cmd->add_option("--scores-only", eval_scores, "CSV of precomputed score,mos[,class]");
  m_opt->excludes(s_opt);
  eval_cmd->add_option("--out", eval_out, "Report JSON (default stdout)");
  eval_cmd->add_option("--csv", eval_csv, "Per-row CSV");
  eval_flags.add_to(*eval_cmd);

  // fixtures
  std::string fixtures_dir;
  std::uint64_t fixtures_seed = 1;
  CLI::App* fixtures_cmd = app.add_subcommand("fixtures", "Write the synthetic test corpus");
  fixtures_cmd->add_option("--out", fixtures_dir, "Output directory")->required();
  fixtures_cmd->add_option("--seed", fixtures_seed, "Noise seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (eval_cmd->parsed() && eval_manifest.empty() && eval_scores.empty()) {
      throw CLI::RequiredError("eval needs --manifest or --scores-only");
    }
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsageError;
  }

  try {
    if (clean_cmd->parsed()) return cmd_clean(clean_in, clean_out, clean_report, out);
    if (score_cmd->parsed()) {
      return cmd_score({ref_mesh, ref_tex, dist_mesh, dist_tex}, score_flags.resolve(), score_json,
                       score_plain, dump_path, out, err);
    }
    if (batch_cmd->parsed()) {
      return cmd_batch(batch_manifest, batch_out, batch_json, batch_flags.resolve(), out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_manifest, eval_scores, eval_out, eval_csv, eval_flags.resolve(), out);
    }
    if (fixtures_cmd->parsed()) return cmd_fixtures(fixtures_dir, fixtures_seed, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_input_error() ? kInputError : kProcessError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kProcessError;
  }
  return kUsageError;
}

}  // namespace gpsim::cli
