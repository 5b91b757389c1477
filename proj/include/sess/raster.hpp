#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sess/error.hpp"

namespace sess {

/// 8-bit raster, interleaved samples, row-major, 1 or 3 channels.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> samples;

  static constexpr double kDynamicRange = 255.0;

  Raster() = default;
  Raster(int w, int h, int c);
  Raster(int w, int h, int c, std::vector<std::uint8_t> data);

  std::uint8_t& at(int x, int y, int c = 0) {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool empty() const { return samples.empty(); }
  bool same_shape(const Raster& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

using Plane = Eigen::MatrixXd;

/// Luma plane (rows = height). RGB uses ITU-R BT.601 weights, unrounded.
Plane luma(const Raster& r);

}  // namespace sess
