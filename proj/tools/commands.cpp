#include "commands.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "dfpred/classify.hpp"
#include "dfpred/config.hpp"
#include "dfpred/cv.hpp"
#include "dfpred/io.hpp"
#include "dfpred/rfe.hpp"
#include "dfpred/synth.hpp"
#include "dfpred/version.hpp"

namespace dfpred::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string model = "gbr";
  int folds = 20;
  std::string app;  // optional app filter
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Seed for every random choice");
  cmd->add_option("--model", opts.model, "Model family")
      ->check(CLI::IsMember({"gbr", "mlp"}));
  cmd->add_option("--folds", opts.folds, "Cross-validation fold count");
  cmd->add_option("--app", opts.app, "Restrict rows to one application label");
}

Trainer make_trainer(const std::string& model, std::uint64_t seed) {
  if (model == "mlp") {
    MlpConfig cfg;
    cfg.seed = seed;
    return make_mlp_trainer(cfg);
  }
  GbrConfig cfg;
  cfg.seed = seed;
  return make_gbr_trainer(cfg);
}

std::string rel(const fs::path& base, const fs::path& p) {
  return fs::relative(p, base).string();
}

void add_output(RunManifest& manifest, const fs::path& dir, const fs::path& file) {
  manifest.outputs.emplace_back(rel(dir, file), file_hash(file));
}

void add_input(RunManifest& manifest, const fs::path& file) {
  manifest.inputs.emplace_back(file.string(), file_hash(file));
}

FeatureMatrix load_matrix(const fs::path& path, const std::string& app) {
  FeatureMatrix fm = read_feature_matrix(path);
  if (app.empty()) return fm;
  FeatureMatrix filtered = fm.filter_app(app);
  if (filtered.rows() == 0) throw DataError("no rows with app label " + app);
  return filtered;
}

ModelArtifact train_full_artifact(const FeatureMatrix& fm, const std::string& model,
                                  std::uint64_t seed) {
  ModelArtifact artifact;
  artifact.model_type = model;
  artifact.seed = seed;
  artifact.feature_names = fm.feature_names;
  artifact.standardizer = fit_standardizer(fm.X, fm.y);
  const Matrix x_std = apply_standardizer(artifact.standardizer, fm.X);
  const Vector y_std = standardize_targets(artifact.standardizer, fm.y);
  if (model == "mlp") {
    MlpConfig cfg;
    cfg.seed = seed;
    artifact.mlp = MlpModel::train(x_std, y_std, cfg);
  } else {
    GbrConfig cfg;
    cfg.seed = seed;
    artifact.gbr = GbrModel::train(x_std, y_std, cfg);
  }
  return artifact;
}

int cmd_synth(const std::string& config_path, const fs::path& out,
              const std::vector<std::string>& overrides, std::uint64_t seed, bool seed_set) {
  KeyValueConfig kv;
  if (!config_path.empty()) kv = KeyValueConfig::parse_file(config_path);
  for (const std::string& o : overrides) kv.apply_override(o);
  SynthConfig cfg = SynthConfig::from_config(kv);
  if (seed_set) cfg.seed = seed;
  cfg.validate();

  SynthDataset ds = generate(cfg);
  fs::create_directories(out);
  save_topology(ds.topology_spec, out / "topology.json");
  write_counter_stream(ds, out / "stream.csv");
  write_jobs(ds.jobs, out / "jobs.csv");
  write_ground_truth(ds.truth, out / "ground_truth.csv");

  RunManifest manifest;
  manifest.command = "synth";
  manifest.config_path = config_path;
  manifest.seed = cfg.seed;
  if (!config_path.empty()) add_input(manifest, config_path);
  for (const char* f : {"topology.json", "stream.csv", "jobs.csv", "ground_truth.csv"})
    add_output(manifest, out, out / f);
  write_manifest(manifest, out);

  std::printf("synth: %zu jobs over %d windows, %zu counter samples -> %s\n", ds.jobs.size(),
              ds.epochs, ds.stream.size(), out.string().c_str());
  return 0;
}

int cmd_extract(const fs::path& data, const fs::path& out, int threads) {
  Machine machine = load_topology(data / "topology.json");
  std::vector<JobRecord> jobs = read_jobs(data / "jobs.csv");
  CounterStream stream = load_counter_stream(data / "stream.csv", machine);

  ExtractOptions opts;
  opts.threads = threads;
  ExtractionReport report = extract_job_windows(stream, jobs, machine, opts);

  fs::create_directories(out);
  write_windows(report, machine, FeatureKind::Raw, out / "windows_raw.csv");
  write_windows(report, machine, FeatureKind::Derived, out / "windows_derived.csv");
  write_skipped(report.skipped, out / "skipped_jobs.csv");

  RunManifest manifest;
  manifest.command = "extract";
  for (const char* f : {"topology.json", "jobs.csv", "stream.csv"})
    add_input(manifest, data / f);
  for (const char* f : {"windows_raw.csv", "windows_derived.csv", "skipped_jobs.csv"})
    add_output(manifest, out, out / f);
  write_manifest(manifest, out);

  std::printf("extract: %zu jobs extracted, %zu skipped -> %s\n", report.jobs.size(),
              report.skipped.size(), out.string().c_str());
  for (const auto& skip : report.skipped)
    std::printf("  skipped %s: %s\n", skip.job_id.c_str(), skip.reason.c_str());
  return 0;
}

int cmd_featurize(const fs::path& data, const fs::path& windows, const fs::path& out,
                  const std::string& routers, const std::string& agg, const std::string& features) {
  Machine machine = load_topology(data / "topology.json");
  std::vector<JobRecord> jobs = read_jobs(data / "jobs.csv");
  ExtractionReport report =
      read_windows(windows / "windows_raw.csv", windows / "windows_derived.csv", machine);
  report.skipped = read_skipped(windows / "skipped_jobs.csv");

  FeatureMatrix fm =
      build_feature_matrix(machine, jobs, report, selector_from_string(routers),
                           agg_from_string(agg), feature_kind_from_string(features));

  fs::create_directories(out);
  write_feature_matrix(fm, out / "features.csv");
  write_skipped(report.skipped, out / "skipped_jobs.csv");

  RunManifest manifest;
  manifest.command = "featurize";
  add_input(manifest, data / "topology.json");
  add_input(manifest, data / "jobs.csv");
  for (const char* f : {"windows_raw.csv", "windows_derived.csv", "skipped_jobs.csv"})
    add_input(manifest, windows / f);
  add_output(manifest, out, out / "features.csv");
  add_output(manifest, out, out / "skipped_jobs.csv");
  write_manifest(manifest, out);

  std::printf("featurize: %lld rows x %lld features (%s, %s, %s) -> %s\n",
              static_cast<long long>(fm.rows()), static_cast<long long>(fm.cols()),
              routers.c_str(), agg.c_str(), features.c_str(), out.string().c_str());
  return 0;
}

int cmd_train(const fs::path& matrix, const fs::path& out, const CommonOpts& opts) {
  FeatureMatrix fm = load_matrix(matrix, opts.app);
  fs::create_directories(out);

  RunManifest manifest;
  manifest.command = "train";
  manifest.seed = opts.seed;
  add_input(manifest, matrix);

  if (opts.folds >= 2) {
    CvResult cv = cross_validate(fm.X, fm.y, opts.folds, make_trainer(opts.model, opts.seed),
                                 opts.seed);
    EvaluationReport report = cv.report();
    write_cv_report(report, out / "cv_report.csv");
    std::vector<PredictionRow> rows;
    for (Index i = 0; i < fm.rows(); ++i)
      rows.push_back({fm.job_ids[i], fm.apps[i], fm.y[i], cv.predictions[i]});
    write_predictions(rows, out / "cv_predictions.csv");
    add_output(manifest, out, out / "cv_report.csv");
    add_output(manifest, out, out / "cv_predictions.csv");
    std::printf("train: %d-fold cv on %lld rows: mape=%.4f psle=%.4f\n", opts.folds,
                static_cast<long long>(fm.rows()), report.mape, report.psle);
  }

  ModelArtifact artifact = train_full_artifact(fm, opts.model, opts.seed);
  save_model_artifact(artifact, out / "model.json");
  add_output(manifest, out, out / "model.json");
  write_manifest(manifest, out);
  std::printf("train: %s model on %lld rows -> %s\n", opts.model.c_str(),
              static_cast<long long>(fm.rows()), (out / "model.json").string().c_str());
  return 0;
}

int cmd_predict(const fs::path& model_path, const fs::path& matrix, const fs::path& out,
                const CommonOpts& opts) {
  ModelArtifact artifact = load_model_artifact(model_path);
  FeatureMatrix fm = load_matrix(matrix, opts.app);
  if (artifact.feature_names != fm.feature_names)
    throw DataError("model feature names do not match the matrix columns");
  Vector pred = artifact.predict_seconds(fm.X);

  fs::create_directories(out);
  std::vector<PredictionRow> rows;
  for (Index i = 0; i < fm.rows(); ++i)
    rows.push_back({fm.job_ids[i], fm.apps[i], fm.y[i], pred[i]});
  write_predictions(rows, out / "predictions.csv");

  RunManifest manifest;
  manifest.command = "predict";
  add_input(manifest, model_path);
  add_input(manifest, matrix);
  add_output(manifest, out, out / "predictions.csv");
  write_manifest(manifest, out);
  std::printf("predict: %lld rows -> %s\n", static_cast<long long>(fm.rows()),
              (out / "predictions.csv").string().c_str());
  return 0;
}

int cmd_evaluate(const fs::path& predictions, const fs::path& out, double threshold) {
  std::vector<PredictionRow> rows = read_predictions(predictions);
  if (rows.empty()) throw DataError("no predictions to evaluate");
  Vector y(static_cast<Index>(rows.size())), yhat(static_cast<Index>(rows.size()));
  for (Index i = 0; i < y.size(); ++i) {
    y[i] = rows[i].exec_time;
    yhat[i] = rows[i].predicted;
  }
  EvaluationReport report = evaluate_predictions(y, yhat, threshold);

  fs::create_directories(out);
  std::vector<std::pair<std::string, std::string>> metrics;
  metrics.emplace_back("n", std::to_string(report.n));
  metrics.emplace_back("mape", format_double(report.mape));
  metrics.emplace_back("psle", format_double(report.psle));
  metrics.emplace_back("psle_threshold", format_double(report.psle_threshold));

  // Per-application breakdown in deterministic label order.
  std::map<std::string, std::vector<Index>> by_app;
  for (Index i = 0; i < y.size(); ++i) by_app[rows[i].app].push_back(i);
  for (const auto& [app, idx] : by_app) {
    Vector ya(static_cast<Index>(idx.size())), pa(static_cast<Index>(idx.size()));
    for (Index i = 0; i < ya.size(); ++i) {
      ya[i] = y[idx[i]];
      pa[i] = yhat[idx[i]];
    }
    metrics.emplace_back("mape_" + app, format_double(mape(ya, pa)));
    metrics.emplace_back("psle_" + app, format_double(psle(ya, pa, threshold)));
  }
  write_metric_report(metrics, out / "evaluation.csv");

  RunManifest manifest;
  manifest.command = "evaluate";
  add_input(manifest, predictions);
  add_output(manifest, out, out / "evaluation.csv");
  write_manifest(manifest, out);

  std::printf("evaluate: n=%lld mape=%.4f psle(%.2f)=%.4f\n", static_cast<long long>(report.n),
              report.mape, threshold, report.psle);
  return 0;
}

int cmd_rfe(const fs::path& matrix, const fs::path& out, const CommonOpts& opts) {
  FeatureMatrix fm = load_matrix(matrix, opts.app);
  GbrConfig cfg;
  cfg.seed = opts.seed;
  const int folds = opts.folds == 20 ? 5 : opts.folds;  // rfe default is 5-fold
  ImportanceRanking ranking = rfe(fm.X, fm.y, fm.feature_names, cfg, folds, opts.seed);

  fs::create_directories(out);
  {
    std::vector<std::pair<std::string, std::string>> rows;
    for (std::size_t i = 0; i < ranking.elimination_order.size(); ++i)
      rows.emplace_back("eliminated_" + std::to_string(i + 1), ranking.elimination_order[i]);
    for (Index i = 0; i < static_cast<Index>(ranking.top5.size()); ++i)
      rows.emplace_back("top5_" + ranking.top5[i], format_double(ranking.top5_scores[i]));
    write_metric_report(rows, out / "rfe_report.csv");
  }

  RunManifest manifest;
  manifest.command = "rfe";
  manifest.seed = opts.seed;
  add_input(manifest, matrix);
  add_output(manifest, out, out / "rfe_report.csv");
  write_manifest(manifest, out);

  std::printf("rfe: top-5 of %zu features:", ranking.elimination_order.size());
  for (std::size_t i = 0; i < ranking.top5.size(); ++i)
    std::printf(" %s=%.3f", ranking.top5[i].c_str(), ranking.top5_scores[i]);
  std::printf("\n");
  return 0;
}

int cmd_classify(const fs::path& matrix, const fs::path& out, const std::string& rule_name,
                 std::vector<std::string> feature_names, const CommonOpts& opts) {
  FeatureMatrix fm = load_matrix(matrix, opts.app);
  if (feature_names.empty()) feature_names = default_speed_features();
  FeatureMatrix selected = fm.select_features(feature_names);
  SpeedLabeling labeling =
      classify_fast_slow(selected.X, selected.feature_names, rule_from_string(rule_name));

  fs::create_directories(out);
  std::vector<ClassifyRow> rows;
  for (Index i = 0; i < fm.rows(); ++i)
    rows.push_back({fm.job_ids[i], std::string(to_string(labeling.labels[i])), fm.y[i]});
  write_classify_report(rows, out / "classification.csv");

  RunManifest manifest;
  manifest.command = "classify";
  add_input(manifest, matrix);
  add_output(manifest, out, out / "classification.csv");
  write_manifest(manifest, out);

  Index fast = 0, slow = 0;
  for (SpeedLabel l : labeling.labels) {
    fast += l == SpeedLabel::LikelyFast;
    slow += l == SpeedLabel::LikelySlow;
  }
  std::printf("classify: %lld likely_fast, %lld likely_slow, %lld indeterminate -> %s\n",
              static_cast<long long>(fast), static_cast<long long>(slow),
              static_cast<long long>(fm.rows() - fast - slow),
              (out / "classification.csv").string().c_str());
  return 0;
}

int cmd_test(const fs::path& labels, const fs::path& out) {
  std::vector<ClassifyRow> rows = read_classify_report(labels);
  std::vector<double> fast, slow;
  for (const ClassifyRow& r : rows) {
    if (r.label == "likely_fast") fast.push_back(r.exec_time);
    if (r.label == "likely_slow") slow.push_back(r.exec_time);
  }
  if (fast.empty() || slow.empty())
    throw DataError("significance test needs both likely_fast and likely_slow jobs");
  const std::array<std::vector<double>, 2> groups{fast, slow};
  TestResult kw = kruskal_wallis(groups);
  TestResult anova = one_way_anova(groups);

  const double mean_fast =
      Eigen::Map<const Vector>(fast.data(), static_cast<Index>(fast.size())).mean();
  const double mean_slow =
      Eigen::Map<const Vector>(slow.data(), static_cast<Index>(slow.size())).mean();

  fs::create_directories(out);
  std::vector<std::pair<std::string, std::string>> metrics;
  metrics.emplace_back("n_fast", std::to_string(fast.size()));
  metrics.emplace_back("n_slow", std::to_string(slow.size()));
  metrics.emplace_back("mean_fast", format_double(mean_fast));
  metrics.emplace_back("mean_slow", format_double(mean_slow));
  metrics.emplace_back("kruskal_wallis_h", format_double(kw.statistic));
  metrics.emplace_back("kruskal_wallis_df", format_double(kw.df1));
  metrics.emplace_back("kruskal_wallis_p", format_double(kw.p_value));
  metrics.emplace_back("anova_f", format_double(anova.statistic));
  metrics.emplace_back("anova_df1", format_double(anova.df1));
  metrics.emplace_back("anova_df2", format_double(anova.df2));
  metrics.emplace_back("anova_p", format_double(anova.p_value));
  write_metric_report(metrics, out / "test_report.csv");

  RunManifest manifest;
  manifest.command = "test";
  add_input(manifest, labels);
  add_output(manifest, out, out / "test_report.csv");
  write_manifest(manifest, out);

  std::printf("test: mean fast=%.2f s, mean slow=%.2f s, H=%.3f (p=%.3g), F=%.3f (p=%.3g)\n",
              mean_fast, mean_slow, kw.statistic, kw.p_value, anova.statistic, anova.p_value);
  return 0;
}

int cmd_agnostic(const fs::path& matrix, const fs::path& out, const std::string& held_out,
                 const CommonOpts& opts) {
  if (opts.model != "mlp")
    throw UsageError("agnostic training uses the mlp model (pass --model mlp)");
  FeatureMatrix fm = read_feature_matrix(matrix);
  std::set<std::string> labels(fm.apps.begin(), fm.apps.end());
  if (!labels.contains(held_out)) throw DataError("held-out app not present: " + held_out);
  if (labels.size() < 3) throw DataError("agnostic training needs >= 2 training apps");

  std::vector<LabeledDataset> training;
  for (const std::string& label : labels)
    if (label != held_out) training.push_back({label, fm.filter_app(label)});
  LabeledDataset test{held_out, fm.filter_app(held_out)};

  MlpConfig cfg;
  cfg.seed = opts.seed;
  const int folds = opts.folds == 20 ? 8 : opts.folds;  // agnostic default is 8-fold
  AgnosticResult result = train_agnostic(training, test, cfg, folds);

  fs::create_directories(out);
  std::vector<PredictionRow> rows;
  for (Index i = 0; i < test.data.rows(); ++i)
    rows.push_back({test.data.job_ids[i], held_out, test.data.y[i],
                    result.held_out_predictions[i]});
  write_predictions(rows, out / "predictions.csv");

  std::vector<std::pair<std::string, std::string>> metrics;
  metrics.emplace_back("held_out_app", held_out);
  metrics.emplace_back("held_out_mape", format_double(result.held_out_report.mape));
  metrics.emplace_back("held_out_psle", format_double(result.held_out_report.psle));
  metrics.emplace_back("combined_cv_mape", format_double(result.combined_report.mape));
  metrics.emplace_back("combined_cv_psle", format_double(result.combined_report.psle));
  for (const std::string& label : result.training_labels) {
    EvaluationReport lr = result.label_report(label);
    metrics.emplace_back("combined_cv_mape_" + label, format_double(lr.mape));
    metrics.emplace_back("combined_cv_psle_" + label, format_double(lr.psle));
  }
  write_metric_report(metrics, out / "agnostic_report.csv");

  ModelArtifact artifact;
  artifact.model_type = "mlp";
  artifact.seed = opts.seed;
  artifact.feature_names = fm.feature_names;
  artifact.standardizer = result.held_out_standardizer;
  artifact.mlp = result.model;
  save_model_artifact(artifact, out / "model.json");

  RunManifest manifest;
  manifest.command = "agnostic";
  manifest.seed = opts.seed;
  add_input(manifest, matrix);
  for (const char* f : {"predictions.csv", "agnostic_report.csv", "model.json"})
    add_output(manifest, out, out / f);
  write_manifest(manifest, out);

  std::printf("agnostic: held-out %s mape=%.4f psle=%.4f (combined cv mape=%.4f)\n",
              held_out.c_str(), result.held_out_report.mape, result.held_out_report.psle,
              result.combined_report.mape);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Dragonfly network telemetry toolkit: predicts HPC job runtime from "
               "pre-job hardware-counter state"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic telemetry dataset");
  std::string synth_config;
  std::string synth_out;
  std::vector<std::string> synth_sets;
  std::uint64_t synth_seed = 0;
  synth->add_option("--config", synth_config, "Key=value config file");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--set", synth_sets, "Config override key=value (repeatable)");
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "Generator seed");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract pre-job counter windows");
  std::string extract_data, extract_out;
  int extract_jobs = static_cast<int>(std::thread::hardware_concurrency());
  extract->add_option("--data", extract_data, "Dataset directory (synth output)")->required();
  extract->add_option("--out", extract_out, "Output directory")->required();
  extract->add_option("--jobs", extract_jobs, "Worker threads");

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Aggregate windows into a feature matrix");
  std::string fz_data, fz_windows, fz_out;
  std::string fz_routers = "all", fz_agg = "mean", fz_features = "derived";
  featurize->add_option("--data", fz_data, "Dataset directory")->required();
  featurize->add_option("--windows", fz_windows, "Extracted windows directory")->required();
  featurize->add_option("--out", fz_out, "Output directory")->required();
  featurize->add_option("--routers", fz_routers, "Router group")
      ->check(CLI::IsMember({"all", "my", "io"}));
  featurize->add_option("--agg", fz_agg, "Aggregation function")
      ->check(CLI::IsMember({"mean", "std", "median", "p75", "p95", "iqr"}));
  featurize->add_option("--features", fz_features, "Counter set")
      ->check(CLI::IsMember({"raw", "derived"}));

  // train
  auto* train = app.add_subcommand("train", "Cross-validate and train a model");
  std::string train_matrix, train_out;
  CommonOpts train_opts;
  train->add_option("--matrix", train_matrix, "Feature matrix CSV")->required();
  train->add_option("--out", train_out, "Output directory")->required();
  add_common(train, train_opts);

  // predict
  auto* predict = app.add_subcommand("predict", "Apply a model artifact to a feature matrix");
  std::string predict_model, predict_matrix, predict_out;
  CommonOpts predict_opts;
  predict->add_option("--model-file", predict_model, "Model artifact JSON")->required();
  predict->add_option("--matrix", predict_matrix, "Feature matrix CSV")->required();
  predict->add_option("--out", predict_out, "Output directory")->required();
  add_common(predict, predict_opts);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compute MAPE and PSLE for predictions");
  std::string eval_predictions, eval_out;
  double eval_threshold = kDefaultPsleThreshold;
  CommonOpts eval_opts;
  evaluate->add_option("--predictions", eval_predictions, "Predictions CSV")->required();
  evaluate->add_option("--out", eval_out, "Output directory")->required();
  evaluate->add_option("--threshold", eval_threshold, "PSLE large-error threshold");
  add_common(evaluate, eval_opts);

  // rfe
  auto* rfe_cmd = app.add_subcommand("rfe", "Recursive feature elimination with GBR importances");
  std::string rfe_matrix, rfe_out;
  CommonOpts rfe_opts;
  rfe_cmd->add_option("--matrix", rfe_matrix, "Feature matrix CSV")->required();
  rfe_cmd->add_option("--out", rfe_out, "Output directory")->required();
  add_common(rfe_cmd, rfe_opts);

  // classify
  auto* classify = app.add_subcommand("classify", "Median-threshold fast/slow labeling");
  std::string cls_matrix, cls_out, cls_rule = "majority";
  std::vector<std::string> cls_features;
  CommonOpts cls_opts;
  classify->add_option("--matrix", cls_matrix, "Feature matrix CSV")->required();
  classify->add_option("--out", cls_out, "Output directory")->required();
  classify->add_option("--rule", cls_rule, "Vote combination rule")
      ->check(CLI::IsMember({"majority", "all_three"}));
  classify->add_option("--features", cls_features,
                       "Counter columns to threshold (default NUM_GROUPS RT_STL_COL RT_STL_GBL)");
  add_common(classify, cls_opts);

  // test
  auto* test = app.add_subcommand("test", "Significance tests between fast and slow groups");
  std::string test_labels, test_out;
  CommonOpts test_opts;
  test->add_option("--labels", test_labels, "Classification CSV")->required();
  test->add_option("--out", test_out, "Output directory")->required();
  add_common(test, test_opts);

  // agnostic
  auto* agnostic = app.add_subcommand(
      "agnostic", "Train on all apps except one and predict the held-out app");
  std::string ag_matrix, ag_out, ag_held_out;
  CommonOpts ag_opts;
  ag_opts.model = "mlp";
  agnostic->add_option("--matrix", ag_matrix, "Feature matrix CSV")->required();
  agnostic->add_option("--held-out", ag_held_out, "App label reserved for testing")->required();
  agnostic->add_option("--out", ag_out, "Output directory")->required();
  add_common(agnostic, ag_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed())
      return cmd_synth(synth_config, synth_out, synth_sets, synth_seed,
                       synth_seed_opt->count() > 0);
    if (extract->parsed()) return cmd_extract(extract_data, extract_out, extract_jobs);
    if (featurize->parsed())
      return cmd_featurize(fz_data, fz_windows, fz_out, fz_routers, fz_agg, fz_features);
    if (train->parsed()) return cmd_train(train_matrix, train_out, train_opts);
    if (predict->parsed())
      return cmd_predict(predict_model, predict_matrix, predict_out, predict_opts);
    if (evaluate->parsed()) return cmd_evaluate(eval_predictions, eval_out, eval_threshold);
    if (rfe_cmd->parsed()) return cmd_rfe(rfe_matrix, rfe_out, rfe_opts);
    if (classify->parsed())
      return cmd_classify(cls_matrix, cls_out, cls_rule, cls_features, cls_opts);
    if (test->parsed()) return cmd_test(test_labels, test_out);
    if (agnostic->parsed()) return cmd_agnostic(ag_matrix, ag_out, ag_held_out, ag_opts);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace dfpred::cli
