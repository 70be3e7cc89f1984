// Dispersion relations: 1D power laws eps(k) = sigma*|d|*k^m and isotropic
// D-dimensional eps(k) = |k|^a, plus their spectra, degenerate momenta and
// densities of states.
#pragma once

#include <variant>
#include <vector>

#include "dscatter/common.hpp"

namespace dscatter::disp {

struct Power1D {
  int sigma = +1;  // band orientation, +1 or -1
  double d = 1.0;  // positive scale
  int m = 2;       // power, >= 1

  void validate() const;
  bool even() const { return m % 2 == 0; }
  // m = 1 has no universal zero-energy limit; flagged, not rejected.
  bool universal_candidate() const { return m >= 2; }
};

struct Isotropic {
  double a = 2.0;  // radial power, > 0
  int D = 3;       // spatial dimension, 1..3

  void validate() const;
  double zeta() const { return a / static_cast<double>(D); }
  double solid_angle() const;  // surface of the unit sphere, b(D)
};

using Dispersion = std::variant<Power1D, Isotropic>;

struct Spectrum {
  // Open intervals; the band edge 0 never belongs to the continuum.
  std::vector<std::pair<double, double>> intervals;
  std::vector<double> thresholds;

  bool contains(double E) const;
  double lower_edge() const;
  double upper_edge() const;
};

double energy(const Power1D& dsp, double k);
double energy(const Isotropic& dsp, double k);  // radial |k|^a
double energy_derivative(const Power1D& dsp, double k);
double radial_energy_derivative(const Isotropic& dsp, double k);

Spectrum continuum(const Power1D& dsp);
Spectrum continuum(const Isotropic& dsp);
Spectrum continuum(const Dispersion& dsp);

// Real momenta with eps(k) = E, E strictly inside the continuum.
// Even m: {+|E/d|^{1/m}, -|E/d|^{1/m}}; odd m: one sign-matched momentum.
std::vector<double> degenerate_momenta(const Power1D& dsp, double E);
double radial_momentum(const Isotropic& dsp, double E);  // E^{1/a}

double density_of_states(const Power1D& dsp, double E);
double density_of_states(const Isotropic& dsp, double E);
double density_of_states(const Dispersion& dsp, double E);

// |eps'(k_a) eps'(k_b)|^{1/2} times the per-branch density of states; equals
// 1 identically inside the continuum and is exposed as a self-test quantity.
double velocity_product_rho_limit(const Power1D& dsp, double E);

}  // namespace dscatter::disp
