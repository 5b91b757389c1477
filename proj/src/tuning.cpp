#include "sess/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sess/graph_matching.hpp"
#include "sess/random.hpp"

namespace sess {

std::size_t AnnotatedDataset::add_graph(SceneGraph g) {
  graphs.push_back(std::move(g));
  return graphs.size() - 1;
}

void AnnotatedDataset::add_pair(std::size_t original, std::size_t candidate, double human_score) {
  if (original >= graphs.size() || candidate >= graphs.size())
    throw Error(ErrorCode::InvalidArgument, "annotation pair references an unknown graph");
  if (!(human_score >= 0.0 && human_score <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "human score must lie in [0,1]");
  pairs.push_back({original, candidate, human_score});
}

void SearchSpace::validate() const {
  auto range = [](double lo, double hi, double min, double max, const char* name) {
    if (!(lo >= min && hi <= max && lo <= hi))
      throw Error(ErrorCode::InvalidArgument, std::string("search space: bad range for ") + name);
  };
  range(alpha_min, alpha_max, 0, 1, "alpha");
  range(beta_min, beta_max, 0, 1, "beta");
  range(gamma_min, gamma_max, 0, 1, "gamma");
  range(k_min, k_max, 1, 4, "k");
  if (!(iterations_min >= 0 && iterations_max <= 12 && iterations_min <= iterations_max))
    throw Error(ErrorCode::InvalidArgument, "search space: bad range for iterations");
}

HyperParams SearchSpace::sample(Rng& rng) const {
  HyperParams p;
  p.alpha = rng.uniform(alpha_min, alpha_max);
  p.beta = rng.uniform(beta_min, beta_max);
  p.gamma = rng.uniform(gamma_min, gamma_max);
  p.iterations = static_cast<int>(rng.integer(iterations_min, iterations_max));
  p.k = rng.uniform(k_min, k_max);
  return p;
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b,
                           bool* degenerate) {
  if (a.size() != b.size() || a.size() < 2)
    throw Error(ErrorCode::InsufficientPairs, "pearson: need at least two paired values");
  const Eigen::Map<const Eigen::VectorXd> x(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::Map<const Eigen::VectorXd> y(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double sxx = dx.squaredNorm(), syy = dy.squaredNorm();
  if (degenerate) *degenerate = false;
  if (sxx == 0.0 || syy == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::clamp(dx.dot(dy) / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> score_pairs(const HyperParams& params, const AnnotatedDataset& dataset,
                                const SimilarityProvider& provider) {
  std::vector<double> out;
  out.reserve(dataset.pairs.size());
  for (const auto& p : dataset.pairs)
    out.push_back(sess(dataset.graphs[p.original], dataset.graphs[p.candidate], provider, params).sess);
  return out;
}

TrialResult evaluate_params(const HyperParams& params, const AnnotatedDataset& dataset,
                            const SimilarityProvider& provider) {
  if (dataset.pairs.size() < 2)
    throw Error(ErrorCode::InsufficientPairs, "tuning: dataset needs at least two annotated pairs");
  const std::vector<double> scores = score_pairs(params, dataset, provider);
  std::vector<double> human;
  human.reserve(dataset.pairs.size());
  for (const auto& p : dataset.pairs) human.push_back(p.human_score);

  TrialResult r;
  r.params = params;
  r.n_pairs = static_cast<int>(scores.size());
  r.pearson = pearson_correlation(scores, human, &r.degenerate);
  double err = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) err += std::abs(scores[i] - human[i]);
  r.mae = err / static_cast<double>(scores.size());
  return r;
}

bool better_trial(const TrialResult& a, const TrialResult& b) {
  if (a.pearson != b.pearson) return a.pearson > b.pearson;
  return a.mae < b.mae;
}

SearchResult random_search(const SearchSpace& space, const AnnotatedDataset& dataset,
                           const SimilarityProvider& provider, int trials, std::uint64_t seed,
                           unsigned threads, const TrialCallback& on_trial) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "random_search: trials must be >= 1");
  space.validate();
  if (dataset.pairs.size() < 2)
    throw Error(ErrorCode::InsufficientPairs, "tuning: dataset needs at least two annotated pairs");

  Rng rng(seed);
  std::vector<HyperParams> draws;
  draws.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) draws.push_back(space.sample(rng));

  SearchResult result;
  result.history.resize(draws.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(draws.size()));

  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < draws.size(); i = next++) {
      try {
        result.history[i] = evaluate_params(draws[i], dataset, provider);
        if (on_trial) {
          std::lock_guard lock(report_mutex);
          on_trial(i, result.history[i]);
        }
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!failure) failure = std::current_exception();
        next = draws.size();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 1; i < result.history.size(); ++i)
    if (better_trial(result.history[i], result.history[result.best_index])) result.best_index = i;
  result.best = result.history[result.best_index];
  return result;
}

}  // namespace sess
