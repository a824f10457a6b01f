#include "moon/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "moon/error.hpp"
#include "moon/format.hpp"

namespace moon {

namespace {

double eye_sign(Eye eye) { return eye == Eye::Left ? 1.0 : -1.0; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint8_t jitter(std::uint8_t base, int delta) {
  return static_cast<std::uint8_t>(std::clamp(int{base} + delta, 0, 255));
}

// First pixel index whose centre (i + 0.5) is >= edge.
int first_covered(double edge) {
  return static_cast<int>(std::ceil(edge - 0.5));
}

void paint_sky(RasterImage& img, const CameraRig& rig, const Sky& sky,
               Eye eye) {
  if (!sky.texture_seed) {
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) img.set(x, y, sky.color);
    return;
  }
  // Texture lives on the sky plane, so it carries the plane's disparity.
  const double shift =
      eye_sign(eye) * rig.focal_px * rig.baseline / (2.0 * sky.distance);
  const std::uint64_t seed = splitmix64(*sky.texture_seed);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto cell = static_cast<std::int64_t>(
          std::floor(x + 0.5 - 0.5 * rig.width_px - shift));
      const std::uint64_t h = splitmix64(
          seed ^ splitmix64(static_cast<std::uint64_t>(cell) * 0x100000001B3ULL +
                            static_cast<std::uint64_t>(y)));
      const int delta = static_cast<int>(h % 25) - 12;
      img.set(x, y,
              {jitter(sky.color.r, delta), jitter(sky.color.g, delta),
               jitter(sky.color.b, delta)});
    }
  }
}

// Both eyes share one quantized footprint taken from the left-eye projection;
// the right eye is that footprint moved by the rounded disparity, so the mask
// offset between eyes is never more than half a pixel from f * b / z.
void paint_cue(RasterImage& img, const CameraRig& rig, const Cue& cue,
               Eye eye) {
  const PixelCoord lo = project_point(
      rig, Eye::Left, {cue.silhouette.x_min, cue.silhouette.y_min, cue.distance});
  const PixelCoord hi = project_point(
      rig, Eye::Left, {cue.silhouette.x_max, cue.silhouette.y_max, cue.distance});
  const int shift =
      eye == Eye::Left
          ? 0
          : static_cast<int>(std::lround(rig.focal_px * rig.baseline / cue.distance));
  const int x0 = std::max(0, first_covered(lo.u) - shift);
  const int x1 = std::min(img.width(), first_covered(hi.u) - shift);
  const int y0 = std::max(0, first_covered(lo.v));
  const int y1 = std::min(img.height(), first_covered(hi.v));
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) img.set(x, y, cue.color);
}

void paint_moon(RasterImage& img, const CameraRig& rig, const Moon& moon,
                Eye eye) {
  const PixelCoord c = moon_center(rig, moon, eye);
  const double r = moon_radius_px(rig, moon);
  const double r2 = r * r;
  const Rgb color = moon.color();
  const int x0 = std::max(0, static_cast<int>(std::floor(c.u - r)) - 1);
  const int x1 = std::min(img.width(), static_cast<int>(std::ceil(c.u + r)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(c.v - r)) - 1);
  const int y1 = std::min(img.height(), static_cast<int>(std::ceil(c.v + r)) + 1);
  // Hard threshold at the radius: no anti-aliasing on the disc edge.
  for (int y = y0; y < y1; ++y) {
    const double dy = y + 0.5 - c.v;
    for (int x = x0; x < x1; ++x) {
      const double dx = x + 0.5 - c.u;
      if (dx * dx + dy * dy <= r2) img.set(x, y, color);
    }
  }
}

RasterImage render_eye(const CameraRig& rig, const StereoScene& scene,
                       std::span<const Cue* const> cues_far_to_near, Eye eye) {
  RasterImage img(rig.width_px, rig.height_px);
  paint_sky(img, rig, scene.sky, eye);
  for (const Cue* cue : cues_far_to_near) paint_cue(img, rig, *cue, eye);
  paint_moon(img, rig, scene.moon, eye);
  return img;
}

void require_same_shape(const StereoPair& pair) {
  if (pair.left.width() != pair.right.width() ||
      pair.left.height() != pair.right.height() || pair.left.width() == 0)
    fail(ErrorKind::Validation, "stereo pair images differ in dimensions");
}

}  // namespace

void validate(const CameraRig& rig) {
  if (!(rig.baseline > 0.0))
    fail(ErrorKind::Validation, "rig.baseline_m must be positive");
  if (!(rig.focal_px > 0.0))
    fail(ErrorKind::Validation, "rig.focal_px must be positive");
  if (rig.width_px < 64 || rig.height_px < 64)
    fail(ErrorKind::Validation, "rig dimensions must be at least 64 px");
}

Rgb Moon::color() const {
  const auto level =
      static_cast<std::uint8_t>(std::lround(std::clamp(luminance, 0.0, 1.0) * 255.0));
  return {level, level, level};
}

void validate(const StereoScene& scene) {
  if (!(scene.sky.distance > 0.0) || !std::isfinite(scene.sky.distance))
    fail(ErrorKind::Validation, "sky.distance_m must be positive and finite");
  const double diam = scene.moon.angular_diameter.deg();
  if (!(diam > 0.0 && diam < 10.0))
    fail(ErrorKind::Validation,
         "moon.angular_diameter_deg must lie in (0, 10), got " + sig9(diam));
  if (!(std::abs(scene.moon.azimuth.deg()) < 89.0) ||
      !(std::abs(scene.moon.elevation.deg()) < 89.0))
    fail(ErrorKind::Validation, "moon direction must be in front of the rig");
  if (!(scene.moon.luminance >= 0.0 && scene.moon.luminance <= 1.0))
    fail(ErrorKind::Validation, "moon.luminance must lie in [0, 1]");
  if (!(scene.moon.distance > 0.0))
    fail(ErrorKind::Validation, "moon.distance_m must be positive");
  if (scene.moon.disparity_override &&
      !(std::abs(scene.moon.disparity_override->deg()) < 10.0))
    fail(ErrorKind::Validation, "moon.disparity_deg must lie in (-10, 10)");
  for (std::size_t i = 0; i < scene.cues.size(); ++i) {
    const Cue& cue = scene.cues[i];
    const std::string field = "cues[" + std::to_string(i) + "]";
    if (!(cue.distance > 0.0 && cue.distance <= scene.sky.distance))
      fail(ErrorKind::Validation,
           field + ".distance_m must lie in (0, sky.distance_m]");
    if (!(cue.silhouette.x_min < cue.silhouette.x_max) ||
        !(cue.silhouette.y_min < cue.silhouette.y_max))
      fail(ErrorKind::Validation, field + ".rect_m must have min < max");
  }
}

PixelCoord project_point(const CameraRig& rig, Eye eye, WorldPoint p) {
  if (!(p.z > 0.0))
    fail(ErrorKind::BehindCamera, "point at z = " + sig9(p.z) +
                                      " is not in front of the cameras");
  const double x_eye = p.x + eye_sign(eye) * 0.5 * rig.baseline;
  return {rig.focal_px * x_eye / p.z + 0.5 * rig.width_px,
          rig.focal_px * p.y / p.z + 0.5 * rig.height_px};
}

PixelCoord moon_center(const CameraRig& rig, const Moon& moon, Eye eye) {
  const double az = moon.azimuth.rad();
  const double el = moon.elevation.rad();
  const double cu = 0.5 * rig.width_px + rig.focal_px * std::tan(az);
  const double cv = 0.5 * rig.height_px - rig.focal_px * std::tan(el) / std::cos(az);
  const Angle disparity = moon.disparity_override
                              ? *moon.disparity_override
                              : vergence_angle(make_observer(rig.baseline),
                                               moon.distance);
  const double pixel_disparity =
      2.0 * rig.focal_px * std::tan(0.5 * disparity.rad());
  return {cu + eye_sign(eye) * 0.5 * pixel_disparity, cv};
}

double moon_radius_px(const CameraRig& rig, const Moon& moon) {
  return rig.focal_px * std::tan(0.5 * moon.angular_diameter.rad());
}

StereoPair render_stereo(const CameraRig& rig, const StereoScene& scene) {
  validate(rig);
  validate(scene);
  std::vector<const Cue*> order;
  order.reserve(scene.cues.size());
  for (const Cue& cue : scene.cues) order.push_back(&cue);
  // Far to near; equal depths keep listing order.
  std::stable_sort(order.begin(), order.end(), [](const Cue* a, const Cue* b) {
    return a->distance > b->distance;
  });
  return {render_eye(rig, scene, order, Eye::Left),
          render_eye(rig, scene, order, Eye::Right)};
}

RasterImage compose_side_by_side(const StereoPair& pair) {
  require_same_shape(pair);
  const int w = pair.left.width();
  const int h = pair.left.height();
  RasterImage out(2 * w, h);
  const auto row_bytes = static_cast<std::size_t>(w) * 3;
  auto dst = out.bytes();
  const auto l = pair.left.bytes();
  const auto r = pair.right.bytes();
  for (int y = 0; y < h; ++y) {
    const auto src_off = static_cast<std::size_t>(y) * row_bytes;
    const auto dst_off = 2 * src_off;
    std::copy_n(l.begin() + src_off, row_bytes, dst.begin() + dst_off);
    std::copy_n(r.begin() + src_off, row_bytes, dst.begin() + dst_off + row_bytes);
  }
  return out;
}

RasterImage compose_anaglyph(const StereoPair& pair) {
  require_same_shape(pair);
  RasterImage out = pair.right;
  auto dst = out.bytes();
  const auto l = pair.left.bytes();
  for (std::size_t i = 0; i < dst.size(); i += 3) dst[i] = l[i];
  return out;
}

RasterImage present(const StereoPair& pair, Presentation mode) {
  return mode == Presentation::Anaglyph ? compose_anaglyph(pair)
                                        : compose_side_by_side(pair);
}

}  // namespace moon
