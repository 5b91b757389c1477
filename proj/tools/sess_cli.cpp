// sess: command-line front end for the semantic similarity engine.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sess/graph_matching.hpp"
#include "sess/io.hpp"
#include "sess/metrics.hpp"
#include "sess/tuning.hpp"

namespace {

using namespace sess;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kInputError = 2, kDimensionError = 3, kNoData = 4 };

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::DimensionMismatch ? kDimensionError : kInputError;
}

const std::vector<std::string> kKnownMetrics = {"sess", "psnr", "mse", "ssim", "msssim", "clip", "vit"};

std::vector<std::string> split_metrics(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) continue;
    if (std::find(kKnownMetrics.begin(), kKnownMetrics.end(), item) == kKnownMetrics.end())
      throw Error(ErrorCode::InvalidArgument, "unknown metric '" + item + "'");
    out.push_back(item);
  }
  return out;
}

SimilarityProvider make_provider(const std::string& relations_path) {
  std::string path = relations_path;
  if (path.empty())
    if (const char* env = std::getenv("SESS_RELATION_TABLE")) path = env;
  if (path.empty()) return SimilarityProvider{};
  return SimilarityProvider(io::load_relation_table(path));
}

HyperParams make_params(const std::string& params_path) {
  return params_path.empty() ? HyperParams{} : io::load_params(params_path);
}

/// Inputs for one comparison; any of them may be absent.
struct PairInputs {
  fs::path ref_graph, cand_graph;
  std::optional<fs::path> ref_raster, cand_raster, ref_patches, cand_patches;
};

struct PairOutcome {
  std::map<std::string, double> values;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

/// Evaluates each requested metric independently so one failure does not
/// hide the others.
PairOutcome evaluate_pair(const PairInputs& in, const std::vector<std::string>& metrics,
                          const SimilarityProvider& provider, const HyperParams& params,
                          bool strict) {
  PairOutcome out;
  auto wants = [&](const char* m) { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); };
  auto attempt = [&](const std::string& metric, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      out.errors.push_back(metric + ": " + e.what());
    }
  };

  std::optional<Raster> r1, r2;
  const bool need_rasters = wants("psnr") || wants("mse") || wants("ssim") || wants("msssim");
  if (in.ref_raster && in.cand_raster) {
    attempt("raster", [&] {
      r1 = io::load_raster(*in.ref_raster);
      r2 = io::load_raster(*in.cand_raster);
    });
  } else if (need_rasters) {
    out.warnings.push_back("raster metrics requested but rasters not supplied");
  }

  std::optional<SceneGraph> g1, g2;
  if (wants("sess") || wants("clip")) {
    attempt("graph", [&] {
      g1 = io::load_graph(in.ref_graph, strict);
      g2 = io::load_graph(in.cand_graph, strict);
    });
  }
  if (g1 && g2) {
    if (wants("sess")) {
      attempt("sess", [&] {
        SessOptions opt;
        if (r1 && r2) {
          opt.image1 = &*r1;
          opt.image2 = &*r2;
        }
        out.values["sess"] = sess::sess(*g1, *g2, provider, params, opt).sess;
      });
    }
    if (wants("clip"))
      attempt("clip", [&] { out.values["clip"] = clip_metric(g1->image_embedding, g2->image_embedding); });
  }
  if (r1 && r2) {
    if (wants("mse")) attempt("mse", [&] { out.values["mse"] = mse(*r1, *r2); });
    if (wants("psnr")) attempt("psnr", [&] { out.values["psnr"] = psnr(*r1, *r2); });
    if (wants("ssim")) attempt("ssim", [&] { out.values["ssim"] = ssim(*r1, *r2); });
    if (wants("msssim")) attempt("msssim", [&] { out.values["msssim"] = ms_ssim(*r1, *r2); });
  }
  if (wants("vit")) {
    if (in.ref_patches && in.cand_patches)
      attempt("vit", [&] {
        out.values["vit"] = vit_score(io::load_patch_embeddings(*in.ref_patches),
                                      io::load_patch_embeddings(*in.cand_patches));
      });
    else
      out.warnings.push_back("vit requested but patch embeddings not supplied");
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
}

std::vector<PairOutcome> evaluate_manifest(const std::vector<io::ManifestEntry>& entries,
                                           const std::vector<std::string>& metrics,
                                           const SimilarityProvider& provider,
                                           const HyperParams& params, bool strict, unsigned threads) {
  std::vector<PairOutcome> rows(entries.size());
  std::mutex err_mutex;
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const auto& e = entries[i];
    PairInputs in{e.ref_graph, e.cand_graph, e.ref_raster, e.cand_raster, e.ref_patches, e.cand_patches};
    rows[i] = evaluate_pair(in, metrics, provider, params, strict);
    std::lock_guard lock(err_mutex);
    for (const auto& w : rows[i].warnings)
      std::cerr << "warning: manifest line " << e.line << ": " << w << "\n";
  });
  return rows;
}

// --- subcommands -------------------------------------------------------------

struct CommonOptions {
  std::string params;
  std::string relations;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--params", o.params, "HyperParams JSON (defaults otherwise)");
  cmd->add_option("--relations", o.relations,
                  "Relation similarity table JSON (falls back to $SESS_RELATION_TABLE)");
  cmd->add_flag("--strict", o.strict, "Reject unknown fields in input files");
}

struct ScoreOptions {
  CommonOptions common;
  std::string ref, cand, explain, metrics;
  std::string ref_raster, cand_raster, ref_patches, cand_patches;
  bool snapshots = false;
};

int run_score(const ScoreOptions& o) {
  const SimilarityProvider provider = make_provider(o.common.relations);
  const HyperParams params = make_params(o.common.params);
  std::vector<std::string> metrics = {"sess"};
  for (const auto& m : split_metrics(o.metrics))
    if (m != "sess") metrics.push_back(m);

  // Graph problems are fatal for score, so load them up front.
  const SceneGraph g1 = io::load_graph(o.ref, o.common.strict);
  const SceneGraph g2 = io::load_graph(o.cand, o.common.strict);
  std::optional<Raster> r1, r2;
  if (!o.ref_raster.empty() != !o.cand_raster.empty())
    throw Error(ErrorCode::InvalidArgument, "--ref-raster and --cand-raster must be given together");
  if (!o.ref_raster.empty()) {
    r1 = io::load_raster(o.ref_raster);
    r2 = io::load_raster(o.cand_raster);
  }
  SessOptions opt;
  if (r1) {
    opt.image1 = &*r1;
    opt.image2 = &*r2;
  }
  opt.keep_snapshots = o.snapshots;
  ScoreReport report = sess::sess(g1, g2, provider, params, opt);

  for (const auto& m : metrics) {
    if (m == "sess") continue;
    if (m == "clip") {
      report.baselines["clip"] = clip_metric(g1.image_embedding, g2.image_embedding);
    } else if (m == "vit") {
      if (o.ref_patches.empty() || o.cand_patches.empty()) {
        std::cerr << "warning: vit requested but patch embeddings not supplied\n";
        continue;
      }
      report.baselines["vit"] = vit_score(io::load_patch_embeddings(o.ref_patches),
                                          io::load_patch_embeddings(o.cand_patches));
    } else if (!r1) {
      std::cerr << "warning: " << m << " requested but rasters not supplied\n";
    } else if (m == "mse") {
      report.baselines["mse"] = mse(*r1, *r2);
    } else if (m == "psnr") {
      report.baselines["psnr"] = psnr(*r1, *r2);
    } else if (m == "ssim") {
      report.baselines["ssim"] = ssim(*r1, *r2);
    } else if (m == "msssim") {
      report.baselines["msssim"] = ms_ssim(*r1, *r2);
    }
  }

  std::string json = io::report_to_json(report);
  if (o.snapshots) {
    auto doc = nlohmann::json::parse(json);
    auto snaps = nlohmann::json::array();
    for (const auto& s : report.snapshots) {
      auto mat = nlohmann::json::array();
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < s.cols(); ++j) row.push_back(s(i, j));
        mat.push_back(std::move(row));
      }
      snaps.push_back(std::move(mat));
    }
    doc["snapshots"] = std::move(snaps);
    json = doc.dump(2) + "\n";
  }
  std::cout << json;
  if (!o.explain.empty()) io::write_file(o.explain, io::explain_dot(g1, g2, report));
  return kOk;
}

struct BatchOptions {
  CommonOptions common;
  std::string manifest, out, metrics = "sess";
  unsigned threads = 0;
};

int run_batch(const BatchOptions& o) {
  const auto metrics = split_metrics(o.metrics);
  if (metrics.empty()) throw Error(ErrorCode::InvalidArgument, "--metrics lists no metrics");
  const SimilarityProvider provider = make_provider(o.common.relations);
  const HyperParams params = make_params(o.common.params);
  const auto entries = io::load_manifest(o.manifest, o.common.strict);
  const auto rows = evaluate_manifest(entries, metrics, provider, params, o.common.strict, o.threads);

  std::vector<std::string> header = {"condition_name", "condition_value"};
  header.insert(header.end(), metrics.begin(), metrics.end());
  header.push_back("errors");
  std::string csv = io::csv_row(header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> fields = {entries[i].condition_name,
                                       io::format_number(entries[i].condition_value, 6)};
    for (const auto& m : metrics) {
      auto it = rows[i].values.find(m);
      fields.push_back(it == rows[i].values.end() ? "" : io::format_number(it->second));
    }
    std::string errors;
    for (const auto& e : rows[i].errors) errors += (errors.empty() ? "" : "; ") + e;
    fields.push_back(errors);
    csv += io::csv_row(fields);
  }
  io::write_file(o.out, csv);
  return kOk;
}

struct CurveOptions {
  CommonOptions common;
  std::string manifest, out, metric = "sess";
  unsigned threads = 0;
};

int run_curve(const CurveOptions& o) {
  const auto metrics = split_metrics(o.metric);
  if (metrics.size() != 1) throw Error(ErrorCode::InvalidArgument, "--metric takes exactly one metric");
  const SimilarityProvider provider = make_provider(o.common.relations);
  const HyperParams params = make_params(o.common.params);
  const auto entries = io::load_manifest(o.manifest, o.common.strict);
  const auto rows = evaluate_manifest(entries, metrics, provider, params, o.common.strict, o.threads);

  std::map<double, std::vector<double>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& e : rows[i].errors)
      std::cerr << "warning: manifest line " << entries[i].line << ": " << e << "\n";
    auto it = rows[i].values.find(metrics.front());
    if (it != rows[i].values.end() && std::isfinite(it->second))
      groups[entries[i].condition_value].push_back(it->second);
  }
  if (groups.empty()) {
    std::cerr << "error: no data for metric '" << metrics.front() << "'\n";
    return kNoData;
  }
  std::string csv = io::csv_row({"condition_value", "mean", "stddev", "n"});
  for (const auto& [value, xs] : groups) {
    const Eigen::Map<const Eigen::VectorXd> v(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const double mean = v.mean();
    const double sd = xs.size() > 1
                          ? std::sqrt((v.array() - mean).square().sum() / static_cast<double>(xs.size() - 1))
                          : 0.0;
    csv += io::csv_row({io::format_number(value, 6), io::format_number(mean),
                        io::format_number(sd), std::to_string(xs.size())});
  }
  io::write_file(o.out, csv);
  return kOk;
}

struct TuneOptions {
  CommonOptions common;
  std::string dataset, out, history;
  int trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

int run_tune(const TuneOptions& o) {
  const SimilarityProvider provider = make_provider(o.common.relations);
  const fs::path dataset_path(o.dataset);
  const auto records = io::load_annotations(dataset_path);
  const AnnotatedDataset dataset =
      io::resolve_annotations(records, dataset_path.parent_path(), o.common.strict);

  std::atomic<int> done{0};
  const SearchResult result = random_search(
      SearchSpace{}, dataset, provider, o.trials, o.seed, o.threads,
      [&](std::size_t index, const TrialResult& t) {
        std::cerr << "trial " << ++done << "/" << o.trials << " (#" << index << ")"
                  << " pearson=" << io::format_number(t.pearson, 4)
                  << " mae=" << io::format_number(t.mae, 4) << "\n";
      });

  const auto& b = result.best;
  nlohmann::json doc = {
      {"params",
       {{"alpha", b.params.alpha}, {"beta", b.params.beta}, {"gamma", b.params.gamma},
        {"iterations", b.params.iterations}, {"k", b.params.k}}},
      {"trial",
       {{"index", result.best_index}, {"pearson", b.pearson}, {"mae", b.mae}, {"n_pairs", b.n_pairs},
        {"degenerate", b.degenerate}}},
      {"search", {{"seed", o.seed}, {"trials", o.trials}}}};
  io::write_file(o.out, doc.dump(2) + "\n");

  if (!o.history.empty()) {
    std::string csv = io::csv_row({"trial", "alpha", "beta", "gamma", "iterations", "k", "pearson",
                                   "mae", "n_pairs", "degenerate"});
    for (std::size_t i = 0; i < result.history.size(); ++i) {
      const auto& t = result.history[i];
      csv += io::csv_row({std::to_string(i), io::format_number(t.params.alpha),
                          io::format_number(t.params.beta), io::format_number(t.params.gamma),
                          std::to_string(t.params.iterations), io::format_number(t.params.k),
                          io::format_number(t.pearson), io::format_number(t.mae),
                          std::to_string(t.n_pairs), t.degenerate ? "1" : "0"});
    }
    io::write_file(o.history, csv);
  }
  return kOk;
}

struct ValidateOptions {
  std::vector<std::string> graphs;
  std::string relations;
  bool strict = false;
};

int run_validate(const ValidateOptions& o) {
  int status = kOk;
  for (const auto& path : o.graphs) {
    try {
      io::load_graph(path, o.strict);
      std::cout << path << ": ok\n";
    } catch (const Error& e) {
      std::cout << e.what() << "\n";
      status = kInputError;
    }
  }
  if (!o.relations.empty()) {
    try {
      io::load_relation_table(o.relations);
      std::cout << o.relations << ": ok\n";
    } catch (const Error& e) {
      std::cout << e.what() << "\n";
      status = kInputError;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic similarity scoring of scene graphs"};
  app.require_subcommand(1);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score one reference/candidate graph pair");
  score_cmd->add_option("--ref", score.ref, "Reference graph JSON")->required();
  score_cmd->add_option("--cand", score.cand, "Candidate graph JSON")->required();
  score_cmd->add_option("--explain", score.explain, "Write the final matching as DOT");
  score_cmd->add_option("--metrics", score.metrics, "Extra baselines: psnr,mse,ssim,msssim,clip,vit");
  score_cmd->add_option("--ref-raster", score.ref_raster, "Reference image (PNG/PGM/PPM)");
  score_cmd->add_option("--cand-raster", score.cand_raster, "Candidate image (PNG/PGM/PPM)");
  score_cmd->add_option("--ref-patches", score.ref_patches, "Reference patch embeddings");
  score_cmd->add_option("--cand-patches", score.cand_patches, "Candidate patch embeddings");
  score_cmd->add_flag("--snapshots", score.snapshots, "Include per-iteration similarity matrices");
  add_common(score_cmd, score.common);

  BatchOptions batch;
  auto* batch_cmd = app.add_subcommand("batch", "Score every manifest line into a CSV");
  batch_cmd->add_option("--manifest", batch.manifest, "Manifest (JSON lines)")->required();
  batch_cmd->add_option("--out", batch.out, "Output CSV")->required();
  batch_cmd->add_option("--metrics", batch.metrics, "Comma-separated metrics")->capture_default_str();
  batch_cmd->add_option("--threads", batch.threads, "Worker threads (0 = all cores)");
  add_common(batch_cmd, batch.common);

  CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("curve", "Aggregate one metric per condition value");
  curve_cmd->add_option("--manifest", curve.manifest, "Manifest (JSON lines)")->required();
  curve_cmd->add_option("--out", curve.out, "Output CSV")->required();
  curve_cmd->add_option("--metric", curve.metric, "Metric to aggregate")->capture_default_str();
  curve_cmd->add_option("--threads", curve.threads, "Worker threads (0 = all cores)");
  add_common(curve_cmd, curve.common);

  TuneOptions tune;
  auto* tune_cmd = app.add_subcommand("tune", "Random search over hyperparameters");
  tune_cmd->add_option("--dataset", tune.dataset, "Annotation dataset (JSON lines)")->required();
  tune_cmd->add_option("--trials", tune.trials, "Number of trials")->check(CLI::PositiveNumber)->capture_default_str();
  tune_cmd->add_option("--seed", tune.seed, "Random seed")->capture_default_str();
  tune_cmd->add_option("--out", tune.out, "Best parameters JSON")->required();
  tune_cmd->add_option("--history", tune.history, "Optional per-trial CSV");
  tune_cmd->add_option("--threads", tune.threads, "Worker threads (0 = all cores)");
  tune_cmd->add_option("--relations", tune.common.relations,
                       "Relation similarity table JSON (falls back to $SESS_RELATION_TABLE)");
  tune_cmd->add_flag("--strict", tune.common.strict, "Reject unknown fields in input files");

  ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check graph and relation table files");
  validate_cmd->add_option("graphs", validate.graphs, "Graph JSON files");
  validate_cmd->add_option("--relations", validate.relations, "Relation table JSON");
  validate_cmd->add_flag("--strict", validate.strict, "Reject unknown fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*score_cmd) return run_score(score);
    if (*batch_cmd) return run_batch(batch);
    if (*curve_cmd) return run_curve(curve);
    if (*tune_cmd) return run_tune(tune);
    if (*validate_cmd) return run_validate(validate);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
