#pragma once

#include <span>

#include "sess/core.hpp"
#include "sess/raster.hpp"

namespace sess {

/// Per-pixel importance, rows = image height; finite and nonnegative.
using ImportanceMap = Eigen::MatrixXd;

/// One weight per graph node; nonnegative, sums to 1.
using ImportanceDistribution = Eigen::VectorXd;

/// Sobel gradient magnitude of a plane (replicated borders), smoothed with
/// a 3x3 box filter.
ImportanceMap gradient_importance(const Plane& plane);

/// gradient_importance of the luma channel. Throws EmptyImage.
ImportanceMap predict_pixel_importance(const Raster& image);

/// Mass of `map` under a node's mask, or under its bbox when no mask is set.
double region_mass(const ImportanceMap& map, const Region& region);

/// Flattens raw masses as s^(1/k) and normalizes; all-zero input yields the
/// uniform distribution. Throws NoNodes on empty input.
ImportanceDistribution flatten_importance(const Eigen::VectorXd& raw, double k);

/// Normalized object weights from the masses under each node's region.
ImportanceDistribution object_importance(const ImportanceMap& map,
                                         std::span<const GraphNode> nodes, double k);

/// Importance for a whole graph: per-node raw_importance when every node
/// carries one, else the map of `image` when given, else uniform.
/// Returns an empty vector for graphs without nodes.
ImportanceDistribution graph_importance(const SceneGraph& g, double k,
                                        const Raster* image = nullptr);

}  // namespace sess
