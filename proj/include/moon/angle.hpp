#pragma once

#include <compare>
#include <numbers>

namespace moon {

/// Plane angle. Stored in radians; degrees only at the edges.
class Angle {
 public:
  constexpr Angle() = default;

  static constexpr Angle radians(double rad) { return Angle(rad); }
  static constexpr Angle degrees(double deg) {
    return Angle(deg * (std::numbers::pi / 180.0));
  }

  constexpr double rad() const { return rad_; }
  constexpr double deg() const { return rad_ * (180.0 / std::numbers::pi); }

  constexpr Angle operator*(double k) const { return Angle(rad_ * k); }
  constexpr Angle operator+(Angle o) const { return Angle(rad_ + o.rad_); }
  constexpr Angle operator-(Angle o) const { return Angle(rad_ - o.rad_); }
  constexpr double operator/(Angle o) const { return rad_ / o.rad_; }

  constexpr auto operator<=>(const Angle&) const = default;

 private:
  constexpr explicit Angle(double rad) : rad_(rad) {}
  double rad_ = 0.0;
};

}  // namespace moon
