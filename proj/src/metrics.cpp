#include "sess/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sess {

namespace {

void require_same_shape(const Raster& x, const Raster& y, const char* who) {
  if (!x.same_shape(y))
    throw Error(ErrorCode::ShapeMismatch,
                std::string(who) + ": rasters differ in shape (" + std::to_string(x.width) + "x" +
                    std::to_string(x.height) + "x" + std::to_string(x.channels) + " vs " +
                    std::to_string(y.width) + "x" + std::to_string(y.height) + "x" +
                    std::to_string(y.channels) + ")");
}

/// Separable "valid" correlation with a symmetric kernel.
Plane filter_valid(const Plane& p, const Eigen::VectorXd& taps) {
  const Eigen::Index k = taps.size();
  const Eigen::Index rows = p.rows() - k + 1, cols = p.cols() - k + 1;
  Plane horiz(p.rows(), cols);
  for (Eigen::Index x = 0; x < cols; ++x) horiz.col(x) = p.middleCols(x, k) * taps;
  Plane out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) out.row(y) = taps.transpose() * horiz.middleRows(y, k);
  return out;
}

Plane downsample(const Plane& p) {
  const Eigen::Index h = p.rows() / 2, w = p.cols() / 2;
  Plane out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      out(y, x) = 0.25 * (p(2 * y, 2 * x) + p(2 * y, 2 * x + 1) + p(2 * y + 1, 2 * x) +
                          p(2 * y + 1, 2 * x + 1));
  return out;
}

}  // namespace

double mse(const Raster& x, const Raster& y) {
  require_same_shape(x, y, "mse");
  double acc = 0;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    const double d = static_cast<double>(x.samples[i]) - static_cast<double>(y.samples[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(x.samples.size());
}

double psnr_from_mse(double mse_value) {
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(Raster::kDynamicRange * Raster::kDynamicRange / mse_value);
}

double psnr(const Raster& x, const Raster& y) { return psnr_from_mse(mse(x, y)); }

Eigen::VectorXd gaussian_taps(int size, double sigma) {
  Eigen::VectorXd t(size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) t[i] = std::exp(-((i - c) * (i - c)) / (2 * sigma * sigma));
  return t / t.sum();
}

SsimComponents ssim_components(const Plane& x, const Plane& y, const SsimConfig& cfg) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw Error(ErrorCode::ShapeMismatch, "ssim: planes differ in shape");
  if (std::min(x.rows(), x.cols()) < cfg.window)
    throw Error(ErrorCode::TooSmall, "ssim: image smaller than the " + std::to_string(cfg.window) +
                                         "x" + std::to_string(cfg.window) + " window");
  const Eigen::VectorXd taps = gaussian_taps(cfg.window, cfg.sigma);
  const Plane mx = filter_valid(x, taps);
  const Plane my = filter_valid(y, taps);
  const Plane sxx = filter_valid(x.cwiseProduct(x), taps) - mx.cwiseProduct(mx);
  const Plane syy = filter_valid(y.cwiseProduct(y), taps) - my.cwiseProduct(my);
  const Plane sxy = filter_valid(x.cwiseProduct(y), taps) - mx.cwiseProduct(my);

  const double c1 = cfg.c1(), c2 = cfg.c2();
  const auto l = ((2.0 * mx.array() * my.array() + c1) /
                  (mx.array().square() + my.array().square() + c1))
                     .eval();
  const auto cs = ((2.0 * sxy.array() + c2) / (sxx.array() + syy.array() + c2)).eval();
  return {l.mean(), cs.mean(), (l * cs).mean()};
}

double ssim(const Raster& x, const Raster& y, const SsimConfig& cfg) {
  require_same_shape(x, y, "ssim");
  return ssim_components(luma(x), luma(y), cfg).ssim;
}

int ms_ssim_scales(Eigen::Index min_side, int window) {
  const int full = static_cast<int>(ms_ssim_weights().size());
  int scales = 0;
  for (Eigen::Index side = min_side; scales < full && side >= window; side /= 2) ++scales;
  return scales;
}

double ms_ssim(const Plane& x, const Plane& y, const SsimConfig& cfg) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw Error(ErrorCode::ShapeMismatch, "ms_ssim: planes differ in shape");
  const int scales = ms_ssim_scales(std::min(x.rows(), x.cols()), cfg.window);
  if (scales == 0)
    throw Error(ErrorCode::TooSmall, "ms_ssim: image smaller than the " + std::to_string(cfg.window) +
                                         "x" + std::to_string(cfg.window) + " window");
  const auto& base = ms_ssim_weights();
  double wsum = 0;
  for (int j = 0; j < scales; ++j) wsum += base[static_cast<std::size_t>(j)];

  Plane px = x, py = y;
  double result = 1.0;
  for (int j = 0; j < scales; ++j) {
    const double w = base[static_cast<std::size_t>(j)] / wsum;
    const SsimComponents c = ssim_components(px, py, cfg);
    // Negative means would make fractional powers undefined.
    result *= std::pow(std::max(c.contrast_structure, 0.0), w);
    if (j == scales - 1) result *= std::pow(std::max(c.luminance, 0.0), w);
    else {
      px = downsample(px);
      py = downsample(py);
    }
  }
  return result;
}

double ms_ssim(const Raster& x, const Raster& y, const SsimConfig& cfg) {
  require_same_shape(x, y, "ms_ssim");
  return ms_ssim(luma(x), luma(y), cfg);
}

PatchEmbeddingSet::PatchEmbeddingSet(const Eigen::MatrixXd& columns) : patches_(columns) {
  if (patches_.cols() == 0 || patches_.rows() == 0)
    throw Error(ErrorCode::EmptySet, "patch embeddings: empty set");
  if (!patches_.allFinite())
    throw Error(ErrorCode::NonFiniteEntry, "patch embeddings: non-finite entry");
  for (Eigen::Index j = 0; j < patches_.cols(); ++j) {
    const double n = patches_.col(j).norm();
    if (n == 0.0) throw Error(ErrorCode::ZeroVector, "patch embeddings: zero patch vector");
    patches_.col(j) /= n;
  }
}

PatchEmbeddingSet PatchEmbeddingSet::from_vectors(const std::vector<EmbeddingVector>& patches) {
  if (patches.empty()) throw Error(ErrorCode::EmptySet, "patch embeddings: empty set");
  const Eigen::Index d = patches.front().size();
  Eigen::MatrixXd m(d, static_cast<Eigen::Index>(patches.size()));
  for (std::size_t j = 0; j < patches.size(); ++j) {
    if (patches[j].size() != d)
      throw Error(ErrorCode::DimensionMismatch, "patch embeddings: inconsistent dimension");
    m.col(static_cast<Eigen::Index>(j)) = patches[j];
  }
  return PatchEmbeddingSet(m);
}

double vit_score(const PatchEmbeddingSet& x, const PatchEmbeddingSet& y) {
  if (x.size() == 0 || y.size() == 0) throw Error(ErrorCode::EmptySet, "vit_score: empty patch set");
  if (x.dimension() != y.dimension())
    throw Error(ErrorCode::DimensionMismatch, "vit_score: patch dimensions differ");
  const Eigen::MatrixXd sim = (x.patches().transpose() * y.patches()).cwiseMax(0.0).cwiseMin(1.0);
  const double recall = sim.rowwise().maxCoeff().mean();
  const double precision = sim.colwise().maxCoeff().mean();
  if (recall + precision == 0.0) return 0.0;
  return 2.0 * recall * precision / (recall + precision);
}

}  // namespace sess
