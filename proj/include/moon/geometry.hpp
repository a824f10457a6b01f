#pragma once

// Visual-angle geometry: the angular expansion law, its inverse, and the
// binocular vergence/disparity quantities that go with it.
//
// Lengths are plain doubles; any unit works as long as the arguments of one
// call agree. The observer baseline is in meters.

#include <span>
#include <string>
#include <vector>

#include "moon/angle.hpp"

namespace moon {

/// Fraction of the true distance by which an object is pulled nearer
/// (delta_z / z). Valid range is [0, 1 - kPoleGuard).
class DisplacementRatio {
 public:
  static constexpr double kPoleGuard = 1e-9;

  DisplacementRatio() = default;
  explicit DisplacementRatio(double value);

  double value() const { return value_; }

  auto operator<=>(const DisplacementRatio&) const = default;

 private:
  double value_ = 0.0;
};

struct ObserverGeometry {
  static constexpr double kDefaultBaseline = 0.065;  // meters

  double baseline = kDefaultBaseline;
};

ObserverGeometry make_observer(double baseline_m);

namespace constants {
inline constexpr double kMoonDistanceKm = 384400.0;
inline constexpr double kMoonDiameterKm = 3474.2;
inline constexpr double kMoonAngularDiameterDeg = 0.5179;
inline constexpr Angle kMoonAngularDiameter =
    Angle::degrees(kMoonAngularDiameterDeg);
}  // namespace constants

/// Full angle subtended by an object of the given diameter at the given
/// distance: 2 atan(d / 2z).
Angle angular_size_of(double diameter, double distance);

/// Expanded angular size after the object is displaced nearer by r * z while
/// its physical extent stays fixed.
Angle angular_expansion(Angle theta, DisplacementRatio r);

inline double magnification(Angle theta, DisplacementRatio r) {
  return angular_expansion(theta, r) / theta;
}

/// Inverse of angular_expansion: the displacement ratio that multiplies theta
/// by m. Requires m >= 1 and m * theta < pi.
DisplacementRatio displacement_for_magnification(Angle theta, double m);

Angle vergence_angle(const ObserverGeometry& obs, double distance);

/// Vergence difference between a near and a far point; z_far may be +inf.
Angle relative_disparity(const ObserverGeometry& obs, double z_near,
                         double z_far);

struct CurvePoint {
  double r;
  double magnification;
  Angle theta_hat;
};

std::vector<CurvePoint> expansion_curve(Angle theta,
                                        std::span<const double> samples);

/// `r,magnification,theta_hat_deg` with a header row, 9 significant digits.
std::string curve_to_csv(std::span<const CurvePoint> curve);

}  // namespace moon
