// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Mock provider and committed fixtures only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "json.hpp"
#include "sess/assignment.hpp"
#include "sess/graph_matching.hpp"
#include "sess/io.hpp"
#include "sess/metrics.hpp"
#include "sess/tuning.hpp"
#include "support/cli_runner.hpp"
#include "support/dataset_gen.hpp"
#include "support/graph_gen.hpp"
#include "support/reference_sess.hpp"
#include "support/ssim_oracle.hpp"

using namespace sess;
using namespace sess::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SESS_FIXTURE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Outcome km_oracle() {
  Stopwatch sw;
  Rng rng(1000);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = rng.integer(0, 7), m = rng.integer(0, 7);
    Eigen::MatrixXd w(n, m);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform();
    worst = std::max(worst, std::abs(km_max_value(w) - brute_force_matching(w).value));
  }
  const double s = sw.seconds();
  return {worst < 1e-9 && s < 5.0, "1000 matrices, max |km - brute| " + fmt("%.2e", worst) + ", " + fmt("%.2f", s) + " s"};
}

Outcome identity() {
  Stopwatch sw;
  Rng rng(50);
  const auto mock = mock_provider(50, 32);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const auto g = random_graph(mock, rng, static_cast<int>(rng.integer(2, 10)), rng.uniform(0.1, 0.6), t % 2 == 0);
    worst = std::max(worst, std::abs(sess::sess(g, g, mock.provider(), HyperParams{}).sess - 1.0));
  }
  const double s = sw.seconds();
  return {worst <= 1e-9 && s < 10.0, "50 graphs, max |sess - 1| " + fmt("%.2e", worst) + ", " + fmt("%.2f", s) + " s"};
}

Outcome symmetry_permutation() {
  Rng rng(200);
  const auto mock = mock_provider(200, 24);
  double asym = 0, perm = 0;
  for (int t = 0; t < 200; ++t) {
    const bool imp = t % 3 != 0;
    const auto a = random_graph(mock, rng, static_cast<int>(rng.integer(1, 8)), 0.35, imp);
    const auto b = random_graph(mock, rng, static_cast<int>(rng.integer(1, 8)), 0.35, imp);
    const double ab = sess::sess(a, b, mock.provider(), HyperParams{}).sess;
    const double ba = sess::sess(b, a, mock.provider(), HyperParams{}).sess;
    const double pa = sess::sess(permute_nodes(a, rng), permute_nodes(b, rng), mock.provider(), HyperParams{}).sess;
    asym = std::max(asym, std::abs(ab - ba));
    perm = std::max(perm, std::abs(ab - pa));
  }
  return {asym < 1e-9 && perm < 1e-9,
          "200 pairs, max asymmetry " + fmt("%.2e", asym) + ", max permutation drift " + fmt("%.2e", perm)};
}

Outcome degenerate_laws() {
  Rng rng(51);
  const auto mock = mock_provider(51, 16);
  int violations = 0;
  for (int t = 0; t < 50; ++t) {
    const auto a = random_graph(mock, rng, static_cast<int>(rng.integer(1, 7)), 0.4, t % 2 == 0);
    const auto b = random_graph(mock, rng, static_cast<int>(rng.integer(1, 7)), 0.4, t % 2 == 0);
    const double alpha = rng.uniform(), beta = rng.uniform(), gamma = rng.uniform(), k = rng.uniform(1, 4);
    const int ite = static_cast<int>(rng.integer(1, 10));

    const auto g1 = sess::sess(a, b, mock.provider(), HyperParams::make(alpha, beta, 1.0, ite, k));
    if (g1.sess != g1.image_score) ++violations;

    // No-iteration path: weighted matching straight on the initial matrix.
    const auto imp1 = graph_importance(a, k), imp2 = graph_importance(b, k);
    MatchContext ctx(a, b, mock.provider(), HyperParams::make(alpha, beta, gamma, 0, k), imp1, imp2);
    const double graph = weighted_matching_score(initial_matrix(ctx), imp1, imp2).score;
    const double direct = (1 - gamma) * graph + gamma * g1.image_score;
    const double no_beta = sess::sess(a, b, mock.provider(), HyperParams::make(alpha, 0.0, gamma, ite, k)).sess;
    const double no_ite = sess::sess(a, b, mock.provider(), HyperParams::make(alpha, beta, gamma, 0, k)).sess;
    if (no_beta != direct) ++violations;
    if (no_ite != direct) ++violations;
  }
  return {violations == 0, "50 pairs, " + std::to_string(violations) + " exact-equality violations"};
}

Outcome reference_fixture() {
  const fs::path dir = kFixtures / "two_node_swap";
  const auto g1 = io::load_graph(dir / "ref.json", true);
  const auto g2 = io::load_graph(dir / "cand.json", true);
  const SimilarityProvider provider(io::load_relation_table(dir / "relations.json"));
  const HyperParams p = HyperParams::make(0.25, 0.05, 0.10, 7, 2.25);
  const double got = sess::sess(g1, g2, provider, p).sess;
  const double ref = reference_sess(g1, g2, [&](const std::string& x, const std::string& y) {
                       return provider.relation_similarity(x, y);
                     }, p).sess;
  const double committed = nlohmann::json::parse(slurp(dir / "expected.json"))["sess"].get<double>();
  const double d = std::max(std::abs(got - ref), std::abs(got - committed));
  return {d < 1e-9, "sess " + fmt("%.12f", got) + ", reference " + fmt("%.12f", ref) + ", committed " +
                        fmt("%.12f", committed)};
}

Outcome baseline_closed_forms() {
  Rng rng(64);
  Raster x(32, 32, 3);
  for (auto& s : x.samples) s = static_cast<std::uint8_t>(rng.integer(0, 239));
  Raster y = x;
  for (auto& s : y.samples) s = static_cast<std::uint8_t>(s + 16);
  const double p = psnr(x, y);
  Raster c100(32, 32, 1), c120(32, 32, 1);
  std::fill(c100.samples.begin(), c100.samples.end(), 100);
  std::fill(c120.samples.begin(), c120.samples.end(), 120);
  const double s = ssim(c100, c120);
  const bool identical = ssim(x, x) == 1.0 && ms_ssim(x, x) == 1.0 && std::isinf(psnr(x, x)) && psnr(x, x) > 0 &&
                         mse(x, x) == 0.0;

  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    Raster a(64, 64, 1), b(64, 64, 1);
    const double f = rng.uniform(0.05, 0.4);
    for (int r = 0; r < 64; ++r)
      for (int col = 0; col < 64; ++col) {
        const double base = 128 + 90 * std::sin(f * col) * std::cos(f * 0.7 * r);
        a.at(col, r) = static_cast<std::uint8_t>(std::clamp(base + 20 * rng.normal(), 0.0, 255.0));
        b.at(col, r) = static_cast<std::uint8_t>(std::clamp(base + 20 * rng.normal(), 0.0, 255.0));
      }
    worst = std::max(worst, std::abs(ssim(a, b) - ssim_oracle(a, b)));
  }
  const bool ok = std::abs(p - 24.05) <= 0.01 && std::abs(s - 0.9836) <= 1e-3 && identical && worst < 1e-6;
  return {ok, "psnr " + fmt("%.4f", p) + " dB, ssim(100,120) " + fmt("%.5f", s) + ", identical cases " +
                  (identical ? "exact" : "WRONG") + ", ssim oracle max diff " + fmt("%.2e", worst)};
}

Outcome vit_fixture() {
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const double v = vit_score(PatchEmbeddingSet(Eigen::MatrixXd(I.leftCols(1))), PatchEmbeddingSet(Eigen::MatrixXd(I)));
  return {std::abs(v - 0.6667) <= 1e-4, "{e1} vs {e1,e2}: " + fmt("%.6f", v)};
}

Outcome importance_distribution() {
  Rng rng(25);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = rng.integer(1, 20);
    Eigen::VectorXd raw(n);
    for (Eigen::Index i = 0; i < n; ++i) raw[i] = rng.uniform() < 0.1 ? 0.0 : rng.uniform(0, 1e4);
    worst = std::max(worst, std::abs(flatten_importance(raw, rng.uniform(1, 10)).sum() - 1.0));
  }
  const auto w = flatten_importance(Eigen::Vector2d(16, 1), 2.0);
  const bool exact = w[0] == 0.8 && w[1] == 0.2;
  return {worst <= 1e-9 && exact, "1000 random sums, max |sum - 1| " + fmt("%.2e", worst) + "; (16,1) at k=2 -> (" +
                                      fmt("%.17g", w[0]) + ", " + fmt("%.17g", w[1]) + ")"};
}

Outcome tuning_recovery() {
  Stopwatch sw;
  const auto mock = mock_provider(77, 32);
  const HyperParams planted = HyperParams::make(0.4, 0.3, 0.2, 5, 2.0);
  const auto ds = planted_dataset(mock, 77, 20, 5, planted, 0.02);
  const auto a = random_search(SearchSpace{}, ds, mock.provider(), 200, 2024);
  const auto b = random_search(SearchSpace{}, ds, mock.provider(), 200, 2024);
  bool same = a.history.size() == b.history.size() && a.best_index == b.best_index;
  for (std::size_t i = 0; same && i < a.history.size(); ++i)
    same = a.history[i].pearson == b.history[i].pearson && a.history[i].mae == b.history[i].mae &&
           a.history[i].params.alpha == b.history[i].params.alpha && a.history[i].params.k == b.history[i].params.k;
  const double s = sw.seconds();
  return {a.best.pearson >= 0.95 && same && s < 120.0,
          std::to_string(ds.pairs.size()) + " pairs, 200 trials, best pearson " + fmt("%.4f", a.best.pearson) +
              ", rerun " + (same ? "identical" : "DIFFERS") + ", " + fmt("%.1f", s) + " s for both runs"};
}

Outcome corruption_trend() {
  Rng rng(20);
  const auto mock = mock_provider(20, 32);
  const double levels[] = {0.0, 0.25, 0.5, 0.75};
  double means[4] = {0, 0, 0, 0};
  for (int f = 0; f < 20; ++f) {
    const auto g = random_graph(mock, rng, static_cast<int>(rng.integer(6, 10)), 0.3);
    for (int l = 0; l < 4; ++l)
      means[l] += sess::sess(g, corrupt_graph(g, rng, levels[l], levels[l]), mock.provider(), HyperParams{}).sess / 20;
  }
  const bool ok = means[0] > means[1] && means[1] > means[2] && means[2] > means[3];
  return {ok, "mean sess " + fmt("%.4f", means[0]) + " > " + fmt("%.4f", means[1]) + " > " + fmt("%.4f", means[2]) +
                  " > " + fmt("%.4f", means[3])};
}

Outcome cli_contract() {
  ScratchDir dir("sess-acceptance");
  const fs::path swap = kFixtures / "two_node_swap";
  auto q = [](const fs::path& p) { return shell_quote(p.string()); };
  std::string notes;
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes += " [" + what + "]";
    }
  };

  const auto mock = mock_provider(9, 8);
  Rng rng(9);
  std::string manifest, ann;
  const int lines = 7;
  for (int i = 0; i < lines; ++i) {
    const auto g = random_graph(mock, rng, 4);
    const std::string a = "r" + std::to_string(i) + ".json", b = "c" + std::to_string(i) + ".json";
    io::save_graph(dir / a, g);
    io::save_graph(dir / b, corrupt_graph(g, rng, 0.25, 0.5));
    const std::string cand = i == 3 ? "absent.json" : b;
    manifest += "{\"ref_graph\": \"" + a + "\", \"cand_graph\": \"" + cand + "\", \"condition\": {\"name\": \"snr\", \"value\": " +
                std::to_string(i % 3) + "}}\n";
    ann += "{\"original\": \"" + a + "\", \"candidates\": [{\"graph\": \"" + b + "\", \"human_score\": " +
           std::to_string(0.1 * i) + "}, {\"graph\": \"" + a + "\", \"human_score\": 1}]}\n";
  }
  spit(dir / "manifest.jsonl", manifest);
  spit(dir / "ann.jsonl", ann);

  const int batch = run_cli("batch --manifest " + q(dir / "manifest.jsonl") + " --out " + q(dir / "out.csv")).status;
  const int rows = count_lines(slurp(dir / "out.csv")) - 1;
  expect(batch == 0 && rows == lines, "batch rows");

  spit(dir / "bad.json", "{ not json");
  auto wide = io::load_graph(swap / "ref.json");
  wide.image_embedding = Eigen::VectorXd::Ones(7);
  for (auto& n : wide.nodes) n.embedding = Eigen::VectorXd::Ones(7);
  io::save_graph(dir / "wide.json", wide);
  const int ok_code = run_cli("score --ref " + q(swap / "ref.json") + " --cand " + q(swap / "cand.json")).status;
  const int parse_code = run_cli("score --ref " + q(dir / "bad.json") + " --cand " + q(swap / "cand.json")).status;
  const int dim_code = run_cli("score --ref " + q(dir / "wide.json") + " --cand " + q(swap / "cand.json")).status;
  const int nodata_code = run_cli("curve --manifest " + q(dir / "manifest.jsonl") + " --out " + q(dir / "curve.csv") +
                                  " --metric ssim").status;
  expect(ok_code == 0, "exit 0");
  expect(parse_code == 2, "exit 2");
  expect(dim_code == 3, "exit 3");
  expect(nodata_code == 4, "exit 4");

  const std::string tune = "tune --dataset " + q(dir / "ann.jsonl") + " --trials 10 --seed 17 ";
  const int t1 = run_cli(tune + "--threads 1 --out " + q(dir / "t1.json") + " --history " + q(dir / "h1.csv")).status;
  const int t2 = run_cli(tune + "--threads 4 --out " + q(dir / "t2.json") + " --history " + q(dir / "h2.csv")).status;
  const bool repro = t1 == 0 && t2 == 0 && slurp(dir / "t1.json") == slurp(dir / "t2.json") &&
                     slurp(dir / "h1.csv") == slurp(dir / "h2.csv") && !slurp(dir / "t1.json").empty();
  expect(repro, "seed reproducibility");

  return {ok, "batch " + std::to_string(rows) + "/" + std::to_string(lines) + " rows; exit codes ok=" +
                  std::to_string(ok_code) + " parse=" + std::to_string(parse_code) + " dim=" +
                  std::to_string(dim_code) + " nodata=" + std::to_string(nodata_code) + "; tune --seed " +
                  (repro ? "byte-identical" : "NOT reproducible") + notes};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"km-oracle", km_oracle},
      {"sess-identity", identity},
      {"sess-symmetry-permutation", symmetry_permutation},
      {"degenerate-hyperparameters", degenerate_laws},
      {"reference-fixture", reference_fixture},
      {"baseline-closed-forms", baseline_closed_forms},
      {"vit-fixture", vit_fixture},
      {"importance-distribution", importance_distribution},
      {"tuning-recovery", tuning_recovery},
      {"corruption-trend", corruption_trend},
      {"cli-contract", cli_contract},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
