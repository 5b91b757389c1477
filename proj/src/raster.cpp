#include "sess/raster.hpp"

#include <string>

namespace sess {

Raster::Raster(int w, int h, int c)
    : Raster(w, h, c, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * c, 0)) {}

Raster::Raster(int w, int h, int c, std::vector<std::uint8_t> data)
    : width(w), height(h), channels(c), samples(std::move(data)) {
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidArgument, "raster: dimensions must be >= 1");
  if (c != 1 && c != 3) throw Error(ErrorCode::InvalidArgument, "raster: channels must be 1 or 3");
  if (samples.size() != static_cast<std::size_t>(w) * h * c)
    throw Error(ErrorCode::InvalidArgument,
                "raster: expected " + std::to_string(static_cast<std::size_t>(w) * h * c) +
                    " samples, got " + std::to_string(samples.size()));
}

Plane luma(const Raster& r) {
  Plane p(r.height, r.width);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) {
      if (r.channels == 1)
        p(y, x) = r.at(x, y);
      else
        p(y, x) = 0.299 * r.at(x, y, 0) + 0.587 * r.at(x, y, 1) + 0.114 * r.at(x, y, 2);
    }
  return p;
}

}  // namespace sess
