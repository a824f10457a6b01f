#include "moon/encode.hpp"

#include <png.h>

#include <fstream>
#include <string>

#include "moon/error.hpp"

namespace moon {

namespace {

std::vector<std::uint8_t> encode_ppm(const RasterImage& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto px = img.bytes();
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

// Holds no objects with destructors: libpng reports errors by longjmp.
bool write_png(png_structp png, png_infop info, png_bytepp rows,
               png_uint_32 width, png_uint_32 height) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  return true;
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(ErrorKind::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::Io, "png_create_info_struct failed");
  }
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  auto* base = const_cast<std::uint8_t*>(img.bytes().data());
  const auto stride = static_cast<std::size_t>(img.width()) * 3;
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = base + y * stride;
  png_set_write_fn(png, &out, append_bytes, nullptr);
  const bool ok = write_png(png, info, rows.data(),
                            static_cast<png_uint_32>(img.width()),
                            static_cast<png_uint_32>(img.height()));
  png_destroy_write_struct(&png, &info);
  if (!ok) fail(ErrorKind::Io, "libpng failed to encode image");
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_image(const RasterImage& img,
                                       ImageFormat format) {
  if (img.width() <= 0 || img.height() <= 0 ||
      img.bytes().size() != static_cast<std::size_t>(img.width()) *
                                static_cast<std::size_t>(img.height()) * 3)
    fail(ErrorKind::Validation, "invalid raster image");
  return format == ImageFormat::Png ? encode_png(img) : encode_ppm(img);
}

ImageFormat parse_image_format(std::string_view name) {
  if (name == "ppm" || name == "PPM_P6") return ImageFormat::PpmP6;
  if (name == "png" || name == "PNG") return ImageFormat::Png;
  fail(ErrorKind::Validation, "unknown image format '" + std::string(name) + "'");
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace moon
