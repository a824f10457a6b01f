#pragma once

// Stereo stimulus generation with a parallel-axes pinhole rig.
//
// Draw order in each eye is fixed: sky plane, cue rectangles far to near,
// then the moon disc. The moon is painted last whatever its nominal
// distance, so it always reads as an occluder of the sky, never as
// something seen through a hole in it. Its binocular disparity is set
// independently (zero by default).

#include <cstdint>
#include <optional>
#include <vector>

#include "moon/angle.hpp"
#include "moon/geometry.hpp"
#include "moon/raster.hpp"

namespace moon {

enum class Eye { Left, Right };

struct CameraRig {
  double baseline = ObserverGeometry::kDefaultBaseline;  // meters
  double focal_px = 1000.0;
  int width_px = 640;
  int height_px = 480;
};

void validate(const CameraRig& rig);

struct PixelCoord {
  double u;
  double v;
};

struct WorldPoint {
  double x;
  double y;  // image-down
  double z;
};

/// Pinhole projection from the eye at (-b/2, 0, 0) (left) or (+b/2, 0, 0)
/// (right). Left-minus-right horizontal disparity is focal_px * b / z.
PixelCoord project_point(const CameraRig& rig, Eye eye, WorldPoint p);

struct WorldRect {
  double x_min;
  double y_min;
  double x_max;
  double y_max;
};

struct Sky {
  double distance = 1000.0;  // meters
  Rgb color{40, 60, 110};
  std::optional<std::uint64_t> texture_seed;
};

struct Moon {
  Angle angular_diameter = Angle::degrees(5.0);
  Angle azimuth;    // relative to the optical axis, positive right
  Angle elevation;  // relative to the optical axis, positive up
  // Disparity of the disc as a vergence-equivalent angle; nullopt means
  // veridical, i.e. projected from `distance`.
  std::optional<Angle> disparity_override = Angle::radians(0.0);
  double luminance = 0.9;
  double distance = constants::kMoonDistanceKm * 1000.0;  // meters

  Rgb color() const;
};

struct Cue {
  WorldRect silhouette;
  double distance;  // meters
  Rgb color;
};

struct StereoScene {
  Sky sky;
  Moon moon;
  std::vector<Cue> cues;
};

void validate(const StereoScene& scene);

struct StereoPair {
  RasterImage left;
  RasterImage right;
};

/// Moon disc centre for one eye, continuous pixel coordinates.
PixelCoord moon_center(const CameraRig& rig, const Moon& moon, Eye eye);

/// Disc radius in pixels: f * tan(theta / 2).
double moon_radius_px(const CameraRig& rig, const Moon& moon);

StereoPair render_stereo(const CameraRig& rig, const StereoScene& scene);

RasterImage compose_side_by_side(const StereoPair& pair);

/// Red from the left eye, green and blue from the right.
RasterImage compose_anaglyph(const StereoPair& pair);

enum class Presentation { SideBySide, Anaglyph };

RasterImage present(const StereoPair& pair, Presentation mode);

}  // namespace moon
