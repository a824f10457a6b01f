#pragma once

// Three competing predictors of the horizon/zenith size difference:
//  - DisparityConflict: the sky's perceived distance sets a displacement
//    ratio, which is pushed through angular_expansion.
//  - ApparentDistance: Emmert scaling on a flattened (half-ellipse) dome.
//  - SizeContrast: inverse power of the surrounding referent's size.
// Each returns a magnification relative to the neutral (zenith, no-cue)
// condition, so a value of 1 means "no illusion".

#include <array>
#include <optional>
#include <string_view>

#include "moon/angle.hpp"
#include "moon/geometry.hpp"

namespace moon {

struct SkyDome {
  double horizon_distance = 1.0;
  double zenith_distance = 1.0;
};

void validate(const SkyDome& dome);

struct SceneContext {
  Angle elevation;
  Angle referent_angular_size;
  // Referent size in the reference (zenith) condition. Unset means the same
  // referent as here, i.e. no contrast.
  std::optional<Angle> reference_referent_angular_size;
  // Unset: no distance cues available.
  std::optional<double> perceived_sky_distance;
  Angle moon_angular_size = constants::kMoonAngularDiameter;
};

void validate(const SceneContext& ctx);

/// r(d) = r_max / (1 + d / d0); r_floor when the sky distance is unknown.
class CueMapping {
 public:
  CueMapping() = default;
  CueMapping(double r_max, double d0, double r_floor = 0.0);

  /// Mapping whose value at `sky_distance` is exactly `target`.
  static CueMapping calibrated(DisplacementRatio target, double sky_distance,
                               double d0, double r_floor = 0.0);

  DisplacementRatio operator()(std::optional<double> sky_distance) const;

  double r_max() const { return r_max_; }
  double d0() const { return d0_; }
  double r_floor() const { return r_floor_; }

 private:
  double r_max_ = 0.0;
  double d0_ = 1.0;
  double r_floor_ = 0.0;
};

enum class ModelId { DisparityConflict, ApparentDistance, SizeContrast };

std::string_view to_string(ModelId id);

struct ModelPrediction {
  ModelId model;
  double magnification;
};

/// Ray length from the dome centre to a half-ellipse with semi-axes
/// (horizon_distance, zenith_distance) at the given elevation.
double dome_distance(const SkyDome& dome, Angle elevation);

ModelPrediction apparent_distance_prediction(const SkyDome& dome,
                                             Angle elevation);

ModelPrediction size_contrast_prediction(Angle referent_here,
                                         Angle referent_reference,
                                         double gamma = 1.0);

ModelPrediction disparity_conflict_prediction(const SceneContext& ctx,
                                              const CueMapping& mapping);

/// Ordered DisparityConflict, ApparentDistance, SizeContrast.
std::array<ModelPrediction, 3> compare_models(const SceneContext& ctx,
                                              const SkyDome& dome,
                                              double gamma,
                                              const CueMapping& mapping);

}  // namespace moon
