#include "sess/providers.hpp"

#include <cmath>

#include "sess/random.hpp"

namespace sess {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double relation_similarity(const std::string& r1, const std::string& r2,
                           const RelationSimilarityTable& table) {
  const auto i = table.find(r1);
  const auto j = table.find(r2);
  if (i && j) return table.matrix()(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
  return r1 == r2 ? 1.0 : kUnknownRelationSimilarity;
}

const std::vector<std::string>& psg_relation_labels() {
  static const std::vector<std::string> labels = {
      "over",          "in front of",  "beside",       "on",          "in",
      "attached to",   "hanging from", "on back of",   "falling off", "going down",
      "painted on",    "walking on",   "running on",   "crossing",    "standing on",
      "lying on",      "sitting on",   "flying over",  "jumping over", "jumping from",
      "wearing",       "holding",      "carrying",     "looking at",  "guiding",
      "kissing",       "eating",       "drinking",     "feeding",     "biting",
      "catching",      "picking",      "playing with", "chasing",     "climbing",
      "cleaning",      "playing",      "touching",     "pushing",     "pulling",
      "opening",       "cooking",      "talking to",   "throwing",    "slicing",
      "driving",       "riding",       "parked on",    "driving on",  "about to hit",
      "kicking",       "swinging",     "entering",     "exiting",     "enclosing",
      "leaning on"};
  return labels;
}

MockProvider::MockProvider(std::uint64_t seed, int dimension)
    : seed_(seed), dimension_(dimension) {
  if (dimension < 2) throw Error(ErrorCode::InvalidArgument, "mock_provider: dimension must be >= 2");
  const auto& labels = psg_relation_labels();
  const auto n = static_cast<Eigen::Index>(labels.size());
  Rng rng(mix_seed(seed, 0x52454c));
  SimilarityMatrix raw(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) raw(i, j) = rng.uniform();
  SimilarityMatrix sym = 0.5 * (raw + raw.transpose());
  sym.diagonal().setOnes();
  provider_ = SimilarityProvider(RelationSimilarityTable(labels, sym));
}

EmbeddingVector MockProvider::embedding(std::uint64_t key) const {
  Rng rng(mix_seed(seed_, key));
  EmbeddingVector v(dimension_);
  for (int i = 0; i < dimension_; ++i) v[i] = rng.uniform(-1.0, 1.0) + 0.3;
  return v;
}

MockProvider mock_provider(std::uint64_t seed, int dimension) {
  return MockProvider(seed, dimension);
}

}  // namespace sess
