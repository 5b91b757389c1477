#include "sess/importance.hpp"

#include <algorithm>
#include <cmath>

#include "sess/rle.hpp"

namespace sess {

namespace {

double clamped(const Plane& p, Eigen::Index y, Eigen::Index x) {
  y = std::clamp<Eigen::Index>(y, 0, p.rows() - 1);
  x = std::clamp<Eigen::Index>(x, 0, p.cols() - 1);
  return p(y, x);
}

}  // namespace

ImportanceMap gradient_importance(const Plane& plane) {
  if (plane.size() == 0) throw Error(ErrorCode::EmptyImage, "importance: empty image");
  const Eigen::Index h = plane.rows(), w = plane.cols();
  Plane mag(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      auto p = [&](int dy, int dx) { return clamped(plane, y + dy, x + dx); };
      const double gx = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      const double gy = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      mag(y, x) = std::sqrt(gx * gx + gy * gy);
    }
  ImportanceMap out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      double s = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) s += clamped(mag, y + dy, x + dx);
      out(y, x) = s / 9.0;
    }
  return out;
}

ImportanceMap predict_pixel_importance(const Raster& image) {
  if (image.empty()) throw Error(ErrorCode::EmptyImage, "importance: empty image");
  return gradient_importance(luma(image));
}

double region_mass(const ImportanceMap& map, const Region& region) {
  if (region.mask) {
    const auto& m = *region.mask;
    if (m.height != map.rows() || m.width != map.cols())
      throw Error(ErrorCode::ShapeMismatch, "importance: mask size differs from importance map");
    const BinaryMask mask = rle_decode(m);
    return (mask.cast<double>() * map.array()).sum();
  }
  const auto& b = region.bbox;
  const auto x0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(b.x)), 0, map.cols());
  const auto y0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(b.y)), 0, map.rows());
  const auto x1 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(b.x + b.w)), 0, map.cols());
  const auto y1 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(b.y + b.h)), 0, map.rows());
  if (x1 <= x0 || y1 <= y0) return 0.0;
  return map.block(y0, x0, y1 - y0, x1 - x0).sum();
}

ImportanceDistribution flatten_importance(const Eigen::VectorXd& raw, double k) {
  if (raw.size() == 0) throw Error(ErrorCode::NoNodes, "importance: no nodes");
  if (!(k >= 1.0)) throw Error(ErrorCode::InvalidArgument, "importance: k must be >= 1");
  for (Eigen::Index i = 0; i < raw.size(); ++i)
    if (!std::isfinite(raw[i]) || raw[i] < 0)
      throw Error(ErrorCode::InvalidArgument, "importance: raw mass must be finite and nonnegative");
  const Eigen::VectorXd t = raw.array().pow(1.0 / k).matrix();
  const double total = t.sum();
  if (!(total > 0)) return Eigen::VectorXd::Constant(raw.size(), 1.0 / static_cast<double>(raw.size()));
  return t / total;
}

ImportanceDistribution object_importance(const ImportanceMap& map,
                                         std::span<const GraphNode> nodes, double k) {
  if (nodes.empty()) throw Error(ErrorCode::NoNodes, "importance: no nodes");
  Eigen::VectorXd raw(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    raw[static_cast<Eigen::Index>(i)] = region_mass(map, nodes[i].region);
  return flatten_importance(raw, k);
}

ImportanceDistribution graph_importance(const SceneGraph& g, double k, const Raster* image) {
  const auto n = static_cast<Eigen::Index>(g.nodes.size());
  if (n == 0) return {};
  const bool all_raw = std::all_of(g.nodes.begin(), g.nodes.end(),
                                   [](const GraphNode& v) { return v.raw_importance.has_value(); });
  if (all_raw) {
    Eigen::VectorXd raw(n);
    for (Eigen::Index i = 0; i < n; ++i) raw[i] = *g.nodes[static_cast<std::size_t>(i)].raw_importance;
    return flatten_importance(raw, k);
  }
  if (image) {
    if (static_cast<std::uint32_t>(image->width) != g.image.width ||
        static_cast<std::uint32_t>(image->height) != g.image.height)
      throw Error(ErrorCode::ShapeMismatch, "importance: raster size differs from graph image size");
    return object_importance(predict_pixel_importance(*image), g.nodes, k);
  }
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

}  // namespace sess
