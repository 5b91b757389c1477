#pragma once

#include <limits>
#include <vector>

#include "sess/core.hpp"
#include "sess/providers.hpp"
#include "sess/raster.hpp"

namespace sess {

/// Mean squared difference over all samples. Throws ShapeMismatch.
double mse(const Raster& x, const Raster& y);

/// 10 log10(255^2 / MSE); +infinity for identical inputs.
double psnr(const Raster& x, const Raster& y);
double psnr_from_mse(double mse_value);

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = Raster::kDynamicRange;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
Eigen::VectorXd gaussian_taps(int size, double sigma);

/// Mean of the luminance and contrast-structure maps over all valid window
/// positions.
struct SsimComponents {
  double luminance = 0;
  double contrast_structure = 0;
  double ssim = 0;
};

SsimComponents ssim_components(const Plane& x, const Plane& y, const SsimConfig& cfg = {});

/// Single-scale SSIM of the luma planes. Throws ShapeMismatch, TooSmall.
double ssim(const Raster& x, const Raster& y, const SsimConfig& cfg = {});

inline const std::vector<double>& ms_ssim_weights() {
  static const std::vector<double> w = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  return w;
}

/// Multi-scale SSIM: up to five dyadic scales, contrast-structure at every
/// scale and luminance at the coarsest only. Fewer scales are used when the
/// image is too small, with weights renormalized to sum to one.
double ms_ssim(const Raster& x, const Raster& y, const SsimConfig& cfg = {});
double ms_ssim(const Plane& x, const Plane& y, const SsimConfig& cfg = {});

/// Number of scales ms_ssim uses for a given minimum side length.
int ms_ssim_scales(Eigen::Index min_side, int window = 11);

/// Unit-normalized patch embeddings, one per column.
class PatchEmbeddingSet {
 public:
  PatchEmbeddingSet() = default;
  /// Normalizes each column. Throws EmptySet, ZeroVector, NonFiniteEntry.
  explicit PatchEmbeddingSet(const Eigen::MatrixXd& columns);
  static PatchEmbeddingSet from_vectors(const std::vector<EmbeddingVector>& patches);

  const Eigen::MatrixXd& patches() const { return patches_; }
  Eigen::Index size() const { return patches_.cols(); }
  Eigen::Index dimension() const { return patches_.rows(); }

 private:
  Eigen::MatrixXd patches_;
};

/// F-measure of best-match recall and precision over patch dot products,
/// with negative dot products clamped to zero.
double vit_score(const PatchEmbeddingSet& x, const PatchEmbeddingSet& y);

inline double clip_metric(const EmbeddingVector& a, const EmbeddingVector& b) {
  return clip_score(a, b);
}

}  // namespace sess
