#include "sess/core.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "sess/rle.hpp"

namespace sess {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NoNodes: return "NoNodes";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::MissingGraphFile: return "MissingGraphFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::ptrdiff_t SceneGraph::index_of(std::int64_t id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

RelationSimilarityTable::RelationSimilarityTable(std::vector<std::string> labels,
                                                 SimilarityMatrix matrix)
    : labels_(std::move(labels)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw Error(ErrorCode::InvalidArgument, "relation table: matrix must be |labels| x |labels|");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!index_.emplace(labels_[i], static_cast<std::size_t>(i)).second)
      throw Error(ErrorCode::InvalidArgument, "relation table: duplicate label '" + labels_[i] + "'");
    if (matrix_(i, i) != 1.0)
      throw Error(ErrorCode::InvalidArgument, "relation table: diagonal entry for '" + labels_[i] +
                                                  "' is not 1");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = matrix_(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw Error(ErrorCode::InvalidArgument, "relation table: entry out of [0,1]");
      if (std::abs(v - matrix_(j, i)) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "relation table: matrix not symmetric");
    }
  }
}

std::optional<std::size_t> RelationSimilarityTable::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

HyperParams HyperParams::make(double alpha, double beta, double gamma, int iterations,
                              double k) {
  HyperParams p{alpha, beta, gamma, iterations, k};
  p.validate();
  return p;
}

void HyperParams::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0,1]");
  };
  unit(alpha, "alpha");
  unit(beta, "beta");
  unit(gamma, "gamma");
  if (iterations < 0) throw Error(ErrorCode::InvalidArgument, "iterations must be nonnegative");
  if (!(k >= 1.0) || std::isnan(k)) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
}

namespace {

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

bool all_finite(const EmbeddingVector& v) { return v.allFinite(); }

}  // namespace

std::vector<std::string> validate_graph(const SceneGraph& g, std::size_t dimension) {
  std::vector<std::string> out;
  const std::size_t dim = dimension ? dimension : static_cast<std::size_t>(g.image_embedding.size());

  if (g.image.width == 0 || g.image.height == 0)
    out.push_back("image: width and height must be positive");
  if (g.image_embedding.size() == 0)
    out.push_back("image.embedding: dimension must be >= 1");
  else if (static_cast<std::size_t>(g.image_embedding.size()) != dim)
    out.push_back(cat("image.embedding: dimension ", g.image_embedding.size(),
                      " != session dimension ", dim));
  if (!all_finite(g.image_embedding)) out.push_back("image.embedding: non-finite entry");

  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    const std::string where = cat("node ", i, " (id ", n.id, ")");
    if (!ids.insert(n.id).second) out.push_back(cat(where, ": duplicate id"));
    if (n.embedding.size() == 0)
      out.push_back(cat(where, ": embedding dimension must be >= 1"));
    else if (static_cast<std::size_t>(n.embedding.size()) != dim)
      out.push_back(cat(where, ": embedding dimension ", n.embedding.size(),
                        " != session dimension ", dim));
    if (!all_finite(n.embedding)) out.push_back(cat(where, ": embedding has non-finite entry"));

    const auto& b = n.region.bbox;
    if (!(b.w > 0 && b.h > 0))
      out.push_back(cat(where, ": bbox width and height must be positive"));
    if (!(b.x >= 0 && b.y >= 0 && b.x + b.w <= g.image.width && b.y + b.h <= g.image.height))
      out.push_back(cat(where, ": bbox outside image bounds"));
    if (n.region.mask) {
      const auto& m = *n.region.mask;
      if (m.height != g.image.height || m.width != g.image.width)
        out.push_back(cat(where, ": mask size ", m.width, "x", m.height,
                          " differs from image size"));
      else if (!rle_consistent(m))
        out.push_back(cat(where, ": mask counts do not cover the image"));
      else if (rle_area(m) == 0)
        out.push_back(cat(where, ": mask is empty"));
    }
    if (n.raw_importance && !(std::isfinite(*n.raw_importance) && *n.raw_importance >= 0))
      out.push_back(cat(where, ": raw_importance must be finite and nonnegative"));
  }

  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (!ids.count(edge.subject))
      out.push_back(cat("edge ", e, ": subject id ", edge.subject, " unresolved"));
    if (!ids.count(edge.object))
      out.push_back(cat("edge ", e, ": object id ", edge.object, " unresolved"));
    if (edge.subject == edge.object)
      out.push_back(cat("edge ", e, ": subject equals object"));
  }
  return out;
}

void require_valid(const SceneGraph& g, std::size_t dimension) {
  const auto v = validate_graph(g, dimension);
  if (v.empty()) return;
  std::string msg = "invalid scene graph:";
  for (const auto& s : v) msg += "\n  " + s;
  throw Error(ErrorCode::InvalidGraph, msg);
}

}  // namespace sess
