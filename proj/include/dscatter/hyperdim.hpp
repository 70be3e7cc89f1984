#pragma once

#include <dscatter/common.hpp>
#include <dscatter/dispersion.hpp>
#include <dscatter/models.hpp>
#include <dscatter/numerics.hpp>

// Radial reduction for isotropic dispersions in D spatial dimensions.
// After projecting onto the s-wave channel everything collapses to
// half-line integrals over the radial momentum.

namespace dscatter::hyperdim {

enum class Regime {
  below_marginal,    // a < D: integrated coupling stays finite at threshold
  log_marginal,      // a = D: logarithmic divergence, limits approach like 1/log
  swave_universal,   // a > D: power-law divergence, nontrivial universal phase
};

struct RegimeInfo {
  Regime kind = Regime::below_marginal;
  // Zero-energy limit of the s-wave S-matrix eigenvalue: exp(2*pi*i*D/a)
  // in the universal regime, exactly 1 otherwise.
  cdouble swave_limit{1.0, 0.0};
};

RegimeInfo regime(const disp::Isotropic& dsp);

// |v(k_E)|^2 evaluated at the on-shell radial momentum k_E = E^{1/a}.
// This is the squared s-wave channel coupling per unit energy up to the
// density of states factor.
double swave_coupling_abs2(const models::CouplingSpec& v,
                           const disp::Isotropic& dsp, double energy);

// b_D * int_0^inf dk k^{D-1} w(k) / (omega - k^a) with w = |v(k)|^2,
// for omega off the continuum [0, inf).
cdouble k_radial(const models::CouplingSpec& v, const disp::Isotropic& dsp,
                 cdouble omega, const num::QuadratureSpec& spec = {});

// Boundary value at E +- i0 for E inside the continuum: principal value
// plus the half-residue term -+ i*pi*rho(E)*|v(k_E)|^2.
struct BoundaryParts {
  cdouble principal{0.0, 0.0};
  double half_residue = 0.0;  // pi * rho(E) * |v(k_E)|^2, always >= 0

  cdouble side_value(Side s) const {
    return principal + cdouble{0.0, s == Side::above ? -half_residue : half_residue};
  }
};

BoundaryParts k_radial_boundary_parts(const models::CouplingSpec& v,
                                      const disp::Isotropic& dsp, double energy,
                                      const num::QuadratureSpec& spec = {});
cdouble k_radial_boundary(const models::CouplingSpec& v,
                          const disp::Isotropic& dsp, double energy, Side side,
                          const num::QuadratureSpec& spec = {});

// Same integral with unit weight. Only converges for zeta = a/D > 1.
cdouble l_radial(const disp::Isotropic& dsp, cdouble omega,
                 const num::QuadratureSpec& spec = {});

}  // namespace dscatter::hyperdim
