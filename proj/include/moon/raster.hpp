#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace moon {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB image.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb at(int x, int y) const {
    const auto* p = &pixels_[index(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    auto* p = &pixels_[index(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::span<std::uint8_t> bytes() { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace moon
