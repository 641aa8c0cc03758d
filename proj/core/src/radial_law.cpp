#include "bolab/radial_law.hpp"

#include <cmath>
#include <numbers>

#include "bolab/error.hpp"

namespace bolab {

RadialLaw::RadialLaw(Family family, double scale) : family_(family), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("RadialLaw: scale must be finite and > 0");
  }
}

RadialLaw RadialLaw::gaussian(double scale) { return {Family::gaussian, scale}; }

RadialLaw RadialLaw::radial_exponential(double scale) {
  return {Family::radial_exponential, scale};
}

RadialLaw RadialLaw::from_name(std::string_view name, double scale) {
  if (name == "gaussian") return gaussian(scale);
  if (name == "radial_exponential") return radial_exponential(scale);
  throw InvalidArgument("unknown radial law '" + std::string(name) +
                        "' (expected gaussian or radial_exponential)");
}

RadialLaw RadialLaw::normalized() const {
  return {family_, scale_ / std::sqrt(second_moment())};
}

std::string RadialLaw::name() const {
  return family_ == Family::gaussian ? "gaussian" : "radial_exponential";
}

double RadialLaw::density(double x, double y) const {
  const double r2 = x * x + y * y;
  const double l2 = scale_ * scale_;
  if (family_ == Family::gaussian) return std::exp(-r2 / l2) / (std::numbers::pi * l2);
  return std::exp(-std::sqrt(r2) / scale_) / (2.0 * std::numbers::pi * l2);
}

double RadialLaw::radius_density(double r) const {
  if (r <= 0.0) return 0.0;
  const double x = r / scale_;
  if (family_ == Family::gaussian) return 2.0 * x * std::exp(-x * x) / scale_;
  return x * std::exp(-x) / scale_;
}

double RadialLaw::radius_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  const double x = r / scale_;
  if (family_ == Family::gaussian) return -std::expm1(-x * x);
  return -std::expm1(-x) - x * std::exp(-x);
}

double RadialLaw::second_moment() const {
  const double l2 = scale_ * scale_;
  return family_ == Family::gaussian ? l2 : 6.0 * l2;
}

double RadialLaw::abs_fourth_moment() const {
  const double l4 = std::pow(scale_, 4);
  // Gaussian: |g|^2 ~ lambda^2 Exp(1); radial exponential: |g| ~ lambda Gamma(2).
  return family_ == Family::gaussian ? 2.0 * l4 : 120.0 * l4;
}

double RadialLaw::fourth_moment() const { return 0.75 * abs_fourth_moment(); }

complex RadialLaw::from_uniforms(double u_radius1, double u_radius2, double u_angle) const {
  double r;
  if (family_ == Family::gaussian) {
    r = scale_ * std::sqrt(-std::log(u_radius1));
  } else {
    // Gamma(2, lambda) as a sum of two exponentials.
    r = -scale_ * (std::log(u_radius1) + std::log(u_radius2));
  }
  const double angle = 2.0 * std::numbers::pi * u_angle;
  return {r * std::cos(angle), r * std::sin(angle)};
}

complex RadialLaw::sample_at(const RandomStream& rng, std::uint32_t slot) const {
  const auto w = rng.bits(slot, 0);
  double u2 = 1.0;
  if (family_ == Family::radial_exponential) u2 = RandomStream::to_open_unit(rng.bits(slot, 1)[0]);
  return from_uniforms(RandomStream::to_open_unit(w[0]), u2, RandomStream::to_unit(w[1]));
}

complex sample_radial(const RadialLaw& law, RandomStream& rng) {
  const double u1 = RandomStream::to_open_unit(rng.next_u64());
  const double ua = rng.next_unit();
  const double u2 =
      law.family() == RadialLaw::Family::radial_exponential ? RandomStream::to_open_unit(rng.next_u64()) : 1.0;
  return law.from_uniforms(u1, u2, ua);
}

}  // namespace bolab
