#include "moon/raster.hpp"

#include "moon/error.hpp"

namespace moon {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    fail(ErrorKind::Validation, "image dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) *
                 static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

}  // namespace moon
