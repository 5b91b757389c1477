#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "sess/core.hpp"

namespace sess {

using BinaryMask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Compressed COCO counts string (LEB128-like, delta against counts[i-2]).
std::string rle_to_string(const RleMask& rle);
RleMask rle_from_string(std::string_view s, std::uint32_t height, std::uint32_t width);

RleMask rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const RleMask& rle);

/// Number of set pixels.
std::uint64_t rle_area(const RleMask& rle);

/// Sum of counts equals height * width.
bool rle_consistent(const RleMask& rle);

}  // namespace sess
