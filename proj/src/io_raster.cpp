#include <png.h>

#include <cctype>
#include <cstring>
#include <csetjmp>

#include "sess/io.hpp"

namespace sess::io {

namespace {

constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::string_view bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

// PNM header token reader; skips whitespace and '#' comments.
class PnmHeader {
 public:
  explicit PnmHeader(std::string_view b) : bytes_(b), pos_(2) {}

  long next_int() {
    skip();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      throw Error(ErrorCode::CorruptFile, "PNM header truncated or malformed");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000) throw Error(ErrorCode::CorruptFile, "PNM header value too large");
    }
    return v;
  }

  /// Offset of pixel data: exactly one whitespace byte after maxval.
  std::size_t data_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw Error(ErrorCode::CorruptFile, "PNM header truncated");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_;
};

Raster decode_pnm(std::string_view bytes) {
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeader header(bytes);
  const long w = header.next_int();
  const long h = header.next_int();
  const long maxval = header.next_int();
  const std::size_t offset = header.data_offset();
  if (w < 1 || h < 1) throw Error(ErrorCode::CorruptFile, "PNM dimensions must be positive");
  if (maxval != 255) throw Error(ErrorCode::UnsupportedFormat, "PNM maxval must be 255");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() < offset + n) throw Error(ErrorCode::CorruptFile, "PNM pixel data truncated");
  std::vector<std::uint8_t> data(n);
  std::memcpy(data.data(), bytes.data() + offset, n);
  return Raster(static_cast<int>(w), static_cast<int>(h), channels, std::move(data));
}

struct PngReadState {
  std::string_view bytes;
  std::size_t pos = 8;
  std::string error = {};
  std::vector<std::uint8_t> pixels = {};
  std::vector<png_bytep> rows = {};
  png_uint_32 width = 0, height = 0;
  int channels = 0;
  bool unsupported_depth = false;
};

void png_read_callback(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->pos + len > st->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, st->bytes.data() + st->pos, len);
  st->pos += len;
}

void png_error_callback(png_structp png, png_const_charp msg) {
  auto* st = static_cast<PngReadState*>(png_get_error_ptr(png));
  if (st) st->error = msg;
  png_longjmp(png, 1);
}

void png_warning_callback(png_structp, png_const_charp) {}

Raster decode_png(std::string_view bytes) {
  PngReadState st{bytes};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, png_error_callback,
                                           png_warning_callback);
  if (!png) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::CorruptFile, "corrupt PNG: " + st.error);
  }
  png_set_read_fn(png, &st, png_read_callback);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  st.width = png_get_image_width(png, info);
  st.height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth == 16) {
    st.unsupported_depth = true;
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    // Also drops alpha introduced by palette transparency.
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    st.channels = png_get_channels(png, info);
    st.pixels.resize(static_cast<std::size_t>(st.width) * st.height * st.channels);
    st.rows.resize(st.height);
    for (png_uint_32 y = 0; y < st.height; ++y)
      st.rows[y] = st.pixels.data() + static_cast<std::size_t>(y) * st.width * st.channels;
    png_read_image(png, st.rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (st.unsupported_depth)
    throw Error(ErrorCode::UnsupportedFormat, "16-bit PNG is not supported");
  if (st.channels != 1 && st.channels != 3)
    throw Error(ErrorCode::UnsupportedFormat, "unexpected PNG channel count");
  return Raster(static_cast<int>(st.width), static_cast<int>(st.height), st.channels,
                std::move(st.pixels));
}

void png_write_callback(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

void png_flush_callback(png_structp) {}

}  // namespace

Raster decode_raster(std::string_view bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '5' || bytes[1] == '6') return decode_pnm(bytes);
    throw Error(ErrorCode::UnsupportedFormat, "only binary PGM (P5) and PPM (P6) are supported");
  }
  if (bytes.size() < 8 && std::string_view(reinterpret_cast<const char*>(kPngSignature), 8)
                                  .substr(0, bytes.size()) == bytes)
    throw Error(ErrorCode::CorruptFile, "truncated PNG signature");
  throw Error(ErrorCode::UnsupportedFormat, "unrecognized raster format");
}

Raster load_raster(const fs::path& path) {
  try {
    return decode_raster(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string encode_pnm(const Raster& r) {
  std::string out = (r.channels == 1 ? "P5\n" : "P6\n") + std::to_string(r.width) + " " +
                    std::to_string(r.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(r.samples.data()), r.samples.size());
  return out;
}

std::string encode_png(const Raster& r) {
  std::string out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(static_cast<std::size_t>(r.height));
  for (int y = 0; y < r.height; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(r.samples.data() + static_cast<std::size_t>(y) * r.width * r.channels);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_callback, png_flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(r.width), static_cast<png_uint_32>(r.height), 8,
               r.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace sess::io
