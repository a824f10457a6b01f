#include "moon/geometry.hpp"

#include <cmath>
#include <numbers>

#include "moon/error.hpp"
#include "moon/format.hpp"

namespace moon {

namespace {

void require_angular_size(Angle theta, const char* what) {
  if (!(theta.rad() > 0.0 && theta.rad() < std::numbers::pi))
    fail(ErrorKind::Domain,
         std::string(what) + " must lie in (0, pi) rad, got " +
             sig9(theta.rad()));
}

}  // namespace

DisplacementRatio::DisplacementRatio(double value) : value_(value) {
  if (!(value >= 0.0))
    fail(ErrorKind::Domain,
         "displacement ratio must be >= 0, got " + sig9(value));
  if (value >= 1.0 - kPoleGuard)
    fail(ErrorKind::Pole,
         "displacement ratio must be < 1 (pole at delta_z = z), got " +
             sig9(value));
}

ObserverGeometry make_observer(double baseline_m) {
  if (!(baseline_m > 0.0) || !std::isfinite(baseline_m))
    fail(ErrorKind::Domain, "baseline must be positive, got " + sig9(baseline_m));
  return ObserverGeometry{baseline_m};
}

Angle angular_size_of(double diameter, double distance) {
  if (!(diameter > 0.0) || !(distance > 0.0))
    fail(ErrorKind::Domain, "diameter and distance must be positive");
  return Angle::radians(2.0 * std::atan(diameter / (2.0 * distance)));
}

Angle angular_expansion(Angle theta, DisplacementRatio r) {
  require_angular_size(theta, "theta");
  const double half = std::tan(0.5 * theta.rad()) / (1.0 - r.value());
  return Angle::radians(2.0 * std::atan(half));
}

DisplacementRatio displacement_for_magnification(Angle theta, double m) {
  require_angular_size(theta, "theta");
  if (!(m >= 1.0))
    fail(ErrorKind::Domain, "magnification must be >= 1, got " + sig9(m));
  const double target = m * theta.rad();
  if (!(target < std::numbers::pi))
    fail(ErrorKind::UnreachableMagnification,
         "magnified angle " + sig9(target) + " rad is not below pi");
  const double r = 1.0 - std::tan(0.5 * theta.rad()) / std::tan(0.5 * target);
  if (r >= 1.0 - DisplacementRatio::kPoleGuard)
    fail(ErrorKind::UnreachableMagnification,
         "magnification " + sig9(m) + " needs a displacement at the pole");
  // m == 1 can produce a tiny negative rounding residue.
  return DisplacementRatio(r < 0.0 ? 0.0 : r);
}

Angle vergence_angle(const ObserverGeometry& obs, double distance) {
  if (!(distance > 0.0))
    fail(ErrorKind::Domain, "distance must be positive, got " + sig9(distance));
  return Angle::radians(2.0 * std::atan(obs.baseline / (2.0 * distance)));
}

Angle relative_disparity(const ObserverGeometry& obs, double z_near,
                         double z_far) {
  if (!(z_near > 0.0))
    fail(ErrorKind::Domain, "z_near must be positive");
  if (z_near > z_far)
    fail(ErrorKind::ArgumentOrder, "z_near must not exceed z_far");
  return vergence_angle(obs, z_near) - vergence_angle(obs, z_far);
}

std::vector<CurvePoint> expansion_curve(Angle theta,
                                        std::span<const double> samples) {
  require_angular_size(theta, "theta");
  std::vector<CurvePoint> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && !(samples[i] > samples[i - 1]))
      fail(ErrorKind::Validation, "samples must be strictly increasing");
    DisplacementRatio r;
    try {
      r = DisplacementRatio(samples[i]);
    } catch (const Error& e) {
      fail(ErrorKind::Validation, e.what());
    }
    const Angle hat = angular_expansion(theta, r);
    out.push_back({r.value(), hat / theta, hat});
  }
  return out;
}

std::string curve_to_csv(std::span<const CurvePoint> curve) {
  std::string csv = "r,magnification,theta_hat_deg\n";
  for (const auto& p : curve) {
    csv += sig9(p.r);
    csv += ',';
    csv += sig9(p.magnification);
    csv += ',';
    csv += sig9(p.theta_hat.deg());
    csv += '\n';
  }
  return csv;
}

}  // namespace moon
