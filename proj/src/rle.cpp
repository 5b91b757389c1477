#include "sess/rle.hpp"

#include <numeric>

namespace sess {

std::string rle_to_string(const RleMask& rle) {
  std::string s;
  const auto& cnts = rle.counts;
  for (std::size_t i = 0; i < cnts.size(); ++i) {
    std::int64_t x = cnts[i];
    if (i > 2) x -= static_cast<std::int64_t>(cnts[i - 2]);
    bool more = true;
    while (more) {
      auto c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      s.push_back(static_cast<char>(c + 48));
    }
  }
  return s;
}

RleMask rle_from_string(std::string_view s, std::uint32_t height, std::uint32_t width) {
  RleMask rle{height, width, {}};
  std::size_t p = 0;
  while (p < s.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    int c = 0;
    while (more) {
      if (p >= s.size()) throw Error(ErrorCode::ParseError, "truncated RLE string");
      c = static_cast<int>(s[p]) - 48;
      if (c < 0 || c > 63) throw Error(ErrorCode::ParseError, "invalid RLE character");
      x |= static_cast<std::int64_t>(c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (k > 12) throw Error(ErrorCode::ParseError, "RLE count overflow");
    }
    if (c & 0x10) x |= ~std::int64_t{0} << (5 * k);
    const std::size_t m = rle.counts.size();
    if (m > 2) x += rle.counts[m - 2];
    if (x < 0 || x > 0xffffffffLL) throw Error(ErrorCode::ParseError, "RLE count out of range");
    rle.counts.push_back(static_cast<std::uint32_t>(x));
  }
  return rle;
}

RleMask rle_encode(const BinaryMask& mask) {
  RleMask rle{static_cast<std::uint32_t>(mask.rows()), static_cast<std::uint32_t>(mask.cols()),
              {}};
  std::uint8_t prev = 0;
  std::uint32_t run = 0;
  // Eigen's default storage is column-major, matching COCO order.
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    const std::uint8_t v = mask.data()[i] ? 1 : 0;
    if (v != prev) {
      rle.counts.push_back(run);
      run = 0;
      prev = v;
    }
    ++run;
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask rle_decode(const RleMask& rle) {
  if (!rle_consistent(rle))
    throw Error(ErrorCode::InvalidArgument, "RLE counts do not cover the mask area");
  BinaryMask mask = BinaryMask::Zero(rle.height, rle.width);
  std::uint64_t pos = 0;
  std::uint8_t v = 0;
  for (auto c : rle.counts) {
    for (std::uint32_t j = 0; j < c; ++j) mask.data()[pos++] = v;
    v = 1 - v;
  }
  return mask;
}

std::uint64_t rle_area(const RleMask& rle) {
  std::uint64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

bool rle_consistent(const RleMask& rle) {
  const std::uint64_t total =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
  return total == std::uint64_t{rle.height} * rle.width;
}

}  // namespace sess
