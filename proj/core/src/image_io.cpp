#include "elq/image_io.hpp"

#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <png.h>

namespace elq {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Raster<Rgb> read_png_file(const std::string& path, std::FILE* fp) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Err::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(Err::IoError, "libpng init failed");
  }
  std::vector<png_bytep> row_ptrs;
  Raster<Rgb> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Err::IoError, "failed to decode PNG '" + path + "'");
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  // Normalize every color type to 8-bit RGB.
  png_set_expand(png);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (png_get_color_type(png, info) & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  const png_byte color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  if (png_get_rowbytes(png, info) != w * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Err::IoError, "unexpected PNG row layout in '" + path + "'");
  }

  out = Raster<Rgb>(int(w), int(h));
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y)
    row_ptrs[y] = reinterpret_cast<png_bytep>(out.data().data() + size_t(y) * w);
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

uint32_t le32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
uint16_t le16(const uint8_t* p) { return uint16_t(p[0] | p[1] << 8); }

// Minimal uncompressed 24/32-bit BMP reader; machines exporting stills often
// hand these over instead of PNG.
Raster<Rgb> read_bmp_file(const std::string& path, std::FILE* fp) {
  uint8_t header[54];
  if (std::fread(header, 1, 54, fp) != 54 || header[0] != 'B' || header[1] != 'M')
    fail(Err::IoError, "'" + path + "' is not a BMP file");
  const uint32_t data_offset = le32(header + 10);
  const uint32_t dib_size = le32(header + 14);
  if (dib_size < 40) fail(Err::IoError, "'" + path + "': unsupported BMP header");
  const int32_t w = int32_t(le32(header + 18));
  const int32_t h_raw = int32_t(le32(header + 22));
  const uint16_t planes = le16(header + 26);
  const uint16_t bpp = le16(header + 28);
  const uint32_t compression = le32(header + 30);
  if (planes != 1 || compression != 0 || (bpp != 24 && bpp != 32))
    fail(Err::IoError, "'" + path + "': only uncompressed 24/32-bit BMP is supported");
  if (w <= 0 || h_raw == 0 || w > (1 << 20) || std::abs(h_raw) > (1 << 20))
    fail(Err::IoError, "'" + path + "': implausible BMP dimensions");

  const bool bottom_up = h_raw > 0;  // the usual layout
  const int h = std::abs(h_raw);
  const size_t bytes_px = bpp / 8;
  const size_t stride = (size_t(w) * bytes_px + 3) & ~size_t(3);

  if (std::fseek(fp, long(data_offset), SEEK_SET) != 0)
    fail(Err::IoError, "'" + path + "': truncated BMP");
  std::vector<uint8_t> row(stride);
  Raster<Rgb> out(w, h);
  for (int i = 0; i < h; ++i) {
    if (std::fread(row.data(), 1, stride, fp) != stride)
      fail(Err::IoError, "'" + path + "': truncated BMP pixel data");
    const int y = bottom_up ? h - 1 - i : i;
    for (int x = 0; x < w; ++x) {
      const uint8_t* p = row.data() + size_t(x) * bytes_px;
      out.at(x, y) = Rgb{p[2], p[1], p[0]};  // BMP stores BGR
    }
  }
  return out;
}

}  // namespace

Raster<Rgb> read_image(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(Err::IoError, "cannot open '" + path + "'");

  uint8_t sig[8] = {0};
  const size_t n = std::fread(sig, 1, 8, fp.get());
  std::rewind(fp.get());
  if (n >= 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png_file(path, fp.get());
  if (n >= 2 && sig[0] == 'B' && sig[1] == 'M') return read_bmp_file(path, fp.get());
  fail(Err::IoError, "'" + path + "' is neither PNG nor BMP");
}

Raster<uint8_t> read_image_gray(const std::string& path) {
  const Raster<Rgb> rgb = read_image(path);
  Raster<uint8_t> gray(rgb.width(), rgb.height());
  for (size_t i = 0; i < rgb.size(); ++i) gray.data()[i] = rgb_luma(rgb.data()[i]);
  return gray;
}

void write_png(const std::string& path, const Raster<Rgb>& image) {
  if (image.empty()) fail(Err::InvalidArgument, "refusing to write an empty image");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(Err::IoError, "cannot write '" + path + "'");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Err::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(Err::IoError, "libpng init failed");
  }
  std::vector<png_bytep> row_ptrs(size_t(image.height()));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Err::IoError, "failed to encode PNG '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, png_uint_32(image.width()), png_uint_32(image.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y)
    row_ptrs[size_t(y)] = reinterpret_cast<png_bytep>(
        const_cast<Rgb*>(image.data().data() + size_t(y) * size_t(image.width())));
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace elq
