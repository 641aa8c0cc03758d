#pragma once

#include <string>
#include <string_view>

#include "bolab/random.hpp"
#include "bolab/state.hpp"

namespace bolab {

/// Rotation-invariant law on C with a strictly positive radial density.
///
/// Two families are supported, each with a scale parameter lambda > 0:
///   gaussian            f(x, y) = exp(-r^2 / lambda^2) / (pi lambda^2)
///   radial_exponential  f(x, y) = exp(-r / lambda) / (2 pi lambda^2)
/// With lambda = 1 the Gaussian is the standard complex Gaussian (E|g|^2 = 1).
class RadialLaw {
 public:
  enum class Family { gaussian, radial_exponential };

  static RadialLaw gaussian(double scale = 1.0);
  static RadialLaw radial_exponential(double scale = 1.0);
  /// Parses "gaussian" / "radial_exponential".
  static RadialLaw from_name(std::string_view name, double scale = 1.0);

  /// Same family rescaled so that E|g|^2 = 1.
  RadialLaw normalized() const;

  Family family() const noexcept { return family_; }
  double scale() const noexcept { return scale_; }
  std::string name() const;

  /// f(x, y)
  double density(double x, double y) const;
  /// Density of |g| on (0, inf): 2 pi r f(r).
  double radius_density(double r) const;
  /// P(|g| <= r)
  double radius_cdf(double r) const;

  /// E|g|^2 = int (x^2 + y^2) f
  double second_moment() const;
  /// int (x^4 + y^4) f  (= 3/4 E|g|^4 by rotation invariance)
  double fourth_moment() const;
  /// E|g|^4
  double abs_fourth_moment() const;
  /// Mass of the closed unit disk, int_{x^2+y^2<=1} f.
  double unit_disk_mass() const { return radius_cdf(1.0); }

  /// Draw g from uniforms; u_radius* in (0,1], u_angle in [0,1). u_radius2 is unused by the Gaussian.
  complex from_uniforms(double u_radius1, double u_radius2, double u_angle) const;

  /// One draw of g for (slot) within `rng`'s stream. Pure in (stream, slot).
  complex sample_at(const RandomStream& rng, std::uint32_t slot) const;

  friend bool operator==(const RadialLaw&, const RadialLaw&) = default;

 private:
  RadialLaw(Family family, double scale);
  Family family_;
  double scale_;
};

/// One draw from `law` using sequential draws of `rng`.
complex sample_radial(const RadialLaw& law, RandomStream& rng);

}  // namespace bolab
