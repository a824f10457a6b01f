#include "moon/models.hpp"

#include <cmath>
#include <numbers>

#include "moon/error.hpp"
#include "moon/format.hpp"

namespace moon {

namespace {

void require_elevation(Angle e) {
  if (!(e.rad() >= 0.0 && e.rad() <= 0.5 * std::numbers::pi))
    fail(ErrorKind::Domain,
         "elevation must lie in [0, 90] deg, got " + sig9(e.deg()));
}

}  // namespace

void validate(const SkyDome& dome) {
  if (!(dome.horizon_distance > 0.0) || !(dome.zenith_distance > 0.0))
    fail(ErrorKind::Domain, "dome distances must be positive");
  if (dome.horizon_distance < dome.zenith_distance)
    fail(ErrorKind::Domain,
         "dome must be flattened: horizon_distance >= zenith_distance");
}

void validate(const SceneContext& ctx) {
  require_elevation(ctx.elevation);
  if (!(ctx.referent_angular_size.rad() > 0.0))
    fail(ErrorKind::Domain, "referent angular size must be positive");
  if (ctx.reference_referent_angular_size &&
      !(ctx.reference_referent_angular_size->rad() > 0.0))
    fail(ErrorKind::Domain, "reference referent angular size must be positive");
  if (ctx.perceived_sky_distance && !(*ctx.perceived_sky_distance > 0.0))
    fail(ErrorKind::Domain, "perceived sky distance must be positive");
  if (!(ctx.moon_angular_size.rad() > 0.0 &&
        ctx.moon_angular_size.rad() < std::numbers::pi))
    fail(ErrorKind::Domain, "moon angular size must lie in (0, pi)");
}

CueMapping::CueMapping(double r_max, double d0, double r_floor)
    : r_max_(r_max), d0_(d0), r_floor_(r_floor) {
  if (!(r_max >= 0.0 && r_max < 1.0))
    fail(ErrorKind::Configuration, "r_max must lie in [0, 1), got " + sig9(r_max));
  if (!(d0 > 0.0) || !std::isfinite(d0))
    fail(ErrorKind::Configuration, "d0 must be positive, got " + sig9(d0));
  if (!(r_floor >= 0.0 && r_floor < 1.0))
    fail(ErrorKind::Configuration,
         "r_floor must lie in [0, 1), got " + sig9(r_floor));
}

CueMapping CueMapping::calibrated(DisplacementRatio target,
                                  double sky_distance, double d0,
                                  double r_floor) {
  if (!(sky_distance > 0.0) || !(d0 > 0.0))
    fail(ErrorKind::Configuration, "calibration distances must be positive");
  return CueMapping(target.value() * (1.0 + sky_distance / d0), d0, r_floor);
}

DisplacementRatio CueMapping::operator()(
    std::optional<double> sky_distance) const {
  if (!sky_distance) return DisplacementRatio(r_floor_);
  if (!(*sky_distance > 0.0))
    fail(ErrorKind::Domain, "perceived sky distance must be positive");
  return DisplacementRatio(r_max_ / (1.0 + *sky_distance / d0_));
}

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::DisparityConflict: return "DisparityConflict";
    case ModelId::ApparentDistance: return "ApparentDistance";
    case ModelId::SizeContrast: return "SizeContrast";
  }
  return "Unknown";
}

double dome_distance(const SkyDome& dome, Angle elevation) {
  validate(dome);
  require_elevation(elevation);
  const double c = std::cos(elevation.rad()) / dome.horizon_distance;
  const double s = std::sin(elevation.rad()) / dome.zenith_distance;
  return 1.0 / std::sqrt(c * c + s * s);
}

ModelPrediction apparent_distance_prediction(const SkyDome& dome,
                                             Angle elevation) {
  // Emmert: at a fixed visual angle, perceived size scales with perceived
  // distance. The zenith point of the dome is the reference.
  const double here = dome_distance(dome, elevation);
  return {ModelId::ApparentDistance, here / dome.zenith_distance};
}

ModelPrediction size_contrast_prediction(Angle referent_here,
                                         Angle referent_reference,
                                         double gamma) {
  if (!(referent_here.rad() > 0.0) || !(referent_reference.rad() > 0.0))
    fail(ErrorKind::Domain, "referent angular sizes must be positive");
  if (!(gamma > 0.0))
    fail(ErrorKind::Domain, "gamma must be positive, got " + sig9(gamma));
  return {ModelId::SizeContrast,
          std::pow(referent_reference / referent_here, gamma)};
}

ModelPrediction disparity_conflict_prediction(const SceneContext& ctx,
                                              const CueMapping& mapping) {
  validate(ctx);
  const DisplacementRatio r = mapping(ctx.perceived_sky_distance);
  return {ModelId::DisparityConflict, magnification(ctx.moon_angular_size, r)};
}

std::array<ModelPrediction, 3> compare_models(const SceneContext& ctx,
                                              const SkyDome& dome,
                                              double gamma,
                                              const CueMapping& mapping) {
  validate(ctx);
  const Angle reference =
      ctx.reference_referent_angular_size.value_or(ctx.referent_angular_size);
  return {disparity_conflict_prediction(ctx, mapping),
          apparent_distance_prediction(dome, ctx.elevation),
          size_contrast_prediction(ctx.referent_angular_size, reference, gamma)};
}

}  // namespace moon
