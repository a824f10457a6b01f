#pragma once

#include <cstdint>
#include <random>

#include "moon/experiment.hpp"
#include "moon/renderer.hpp"

namespace moon::testing {

/// Rig and scene frozen into tests/golden/reference_scene.{json,ppm}.
CameraRig reference_rig();
StereoScene reference_scene();

/// Session config used by the engine, service, and acceptance tests.
SessionConfig staircase_config(double start_m = 1.5, std::uint64_t seed = 7);

struct RandomCueScene {
  CameraRig rig;
  StereoScene scene;
};

/// Untextured sky, a zero-disparity moon in the upper band, and 1-3
/// non-overlapping cues fully inside the lower band of the image. Every
/// element has a unique colour.
RandomCueScene random_cue_scene(std::mt19937_64& gen);

struct Mask {
  long count = 0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  std::vector<std::uint8_t> bits;

  double centroid_x() const { return sum_x / static_cast<double>(count); }
};

Mask color_mask(const RasterImage& img, Rgb color);

}  // namespace moon::testing
