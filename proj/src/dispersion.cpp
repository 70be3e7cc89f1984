#include "dscatter/dispersion.hpp"

#include <cmath>

namespace dscatter::disp {

void Power1D::validate() const {
  if (sigma != 1 && sigma != -1) fail(Errc::bad_argument, "sigma must be +1 or -1");
  if (!(d > 0.0) || !std::isfinite(d)) fail(Errc::bad_argument, "scale d must be positive");
  if (m < 1) fail(Errc::bad_argument, "power m must be a positive integer");
}

void Isotropic::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) fail(Errc::bad_argument, "radial power a must be positive");
  if (D < 1 || D > 3) fail(Errc::bad_argument, "dimension D must be 1, 2 or 3");
}

double Isotropic::solid_angle() const {
  switch (D) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    default: return 4.0 * pi;
  }
}

bool Spectrum::contains(double E) const {
  for (auto [lo, hi] : intervals)
    if (E > lo && E < hi) return true;
  return false;
}

double Spectrum::lower_edge() const { return intervals.front().first; }
double Spectrum::upper_edge() const { return intervals.back().second; }

double energy(const Power1D& dsp, double k) { return dsp.sigma * dsp.d * ipow(k, dsp.m); }

double energy(const Isotropic& dsp, double k) { return std::pow(std::fabs(k), dsp.a); }

double energy_derivative(const Power1D& dsp, double k) {
  return dsp.sigma * dsp.d * dsp.m * ipow(k, dsp.m - 1);
}

double radial_energy_derivative(const Isotropic& dsp, double k) {
  return dsp.a * std::pow(k, dsp.a - 1.0);
}

Spectrum continuum(const Power1D& dsp) {
  dsp.validate();
  Spectrum s;
  s.thresholds = {0.0};
  if (dsp.even()) {
    if (dsp.sigma > 0)
      s.intervals = {{0.0, inf}};
    else
      s.intervals = {{-inf, 0.0}};
  } else {
    s.intervals = {{-inf, 0.0}, {0.0, inf}};
  }
  return s;
}

Spectrum continuum(const Isotropic& dsp) {
  dsp.validate();
  Spectrum s;
  s.thresholds = {0.0};
  s.intervals = {{0.0, inf}};
  return s;
}

Spectrum continuum(const Dispersion& dsp) {
  return std::visit([](const auto& d) { return continuum(d); }, dsp);
}

std::vector<double> degenerate_momenta(const Power1D& dsp, double E) {
  dsp.validate();
  if (!continuum(dsp).contains(E))
    fail(Errc::outside_continuum, "E=" + std::to_string(E) + " is outside the continuum");
  double kmag = std::pow(std::fabs(E) / dsp.d, 1.0 / dsp.m);
  if (dsp.even()) return {kmag, -kmag};
  double sign = (E * dsp.sigma > 0.0) ? 1.0 : -1.0;
  return {sign * kmag};
}

double radial_momentum(const Isotropic& dsp, double E) {
  dsp.validate();
  if (!(E > 0.0)) fail(Errc::outside_continuum, "isotropic continuum requires E > 0");
  return std::pow(E, 1.0 / dsp.a);
}

double density_of_states(const Power1D& dsp, double E) {
  dsp.validate();
  if (E == 0.0) {
    if (dsp.m >= 2) fail(Errc::threshold_divergence, "density of states diverges at E=0");
    fail(Errc::outside_continuum, "E=0 is not in the continuum");
  }
  if (!continuum(dsp).contains(E))
    fail(Errc::outside_continuum, "E=" + std::to_string(E) + " is outside the continuum");
  double mm = static_cast<double>(dsp.m);
  return (2.0 / (mm * std::pow(dsp.d, 1.0 / mm))) * std::pow(std::fabs(E), -1.0 + 1.0 / mm);
}

double density_of_states(const Isotropic& dsp, double E) {
  dsp.validate();
  if (E == 0.0) {
    if (dsp.zeta() > 1.0) fail(Errc::threshold_divergence, "density of states diverges at E=0");
    fail(Errc::outside_continuum, "E=0 is not in the continuum");
  }
  if (!(E > 0.0)) fail(Errc::outside_continuum, "isotropic continuum requires E > 0");
  return (dsp.solid_angle() / dsp.a) * std::pow(E, -1.0 + static_cast<double>(dsp.D) / dsp.a);
}

double density_of_states(const Dispersion& dsp, double E) {
  return std::visit([E](const auto& d) { return density_of_states(d, E); }, dsp);
}

double velocity_product_rho_limit(const Power1D& dsp, double E) {
  auto ks = degenerate_momenta(dsp, E);
  double ka = ks.front(), kb = ks.back();
  double prod = std::sqrt(std::fabs(energy_derivative(dsp, ka) * energy_derivative(dsp, kb)));
  // Per-branch density of states: the full rho counts both momentum branches.
  return prod * 0.5 * density_of_states(dsp, E);
}

}  // namespace dscatter::disp
