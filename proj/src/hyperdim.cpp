#include <dscatter/hyperdim.hpp>

#include <algorithm>
#include <cmath>

namespace dscatter::hyperdim {

namespace {

// Shared geometry for the half-line integrals: everything interesting lives
// below k_cut, the tail is handled by the double-exponential map.
double split_point(double pole_mag, double weight_scale) {
  return std::max({4.0 * pole_mag, 8.0 * weight_scale, 8.0});
}

void reject_on_continuum(const disp::Isotropic& dsp, cdouble omega) {
  dsp.validate();
  if (omega.imag() == 0.0) {
    if (omega.real() == 0.0) fail(Errc::zero_frequency, "omega = 0 sits on the threshold");
    if (omega.real() > 0.0) {
      fail(Errc::on_continuum, "omega on the continuum, use the boundary-value routine");
    }
  }
}

// Guarded evaluation of b_D k^{D-1} w(k) / (omega - k^a). The exp-sinh tail
// probes k far beyond double overflow of k^a; switch to the asymptotic ratio
// there instead of dividing inf by inf.
cdouble radial_point(double k, double w, double bd, double a, int dm1, cdouble omega) {
  if (w == 0.0 || k == 0.0) {
    return (dm1 == 0 && k == 0.0 && w != 0.0) ? cdouble{bd * w, 0.0} / omega : cdouble{};
  }
  const double q = std::pow(k, a);
  if (q > 1e300) return cdouble{-bd * w * std::pow(k, dm1 - a), 0.0};
  return bd * ipow(k, dm1) * w / (omega - q);
}

cdouble radial_integral(const std::function<double(double)>& weight, double weight_scale,
                        const disp::Isotropic& dsp, cdouble omega,
                        const num::QuadratureSpec& spec) {
  const double bd = dsp.solid_angle();
  const double a = dsp.a;
  const int dm1 = dsp.D - 1;
  auto f = [&](double k) -> cdouble { return radial_point(k, weight(k), bd, a, dm1, omega); };
  const double pole_mag = std::pow(std::abs(omega), 1.0 / a);
  const double kc = split_point(pole_mag, weight_scale);
  num::QuadResult head = num::integrate_segment(f, 0.0, kc, spec);
  num::QuadResult tail = num::integrate_half_line(f, kc, spec);
  return head.value + tail.value;
}

}  // namespace

RegimeInfo regime(const disp::Isotropic& dsp) {
  dsp.validate();
  RegimeInfo info;
  const double d = static_cast<double>(dsp.D);
  if (dsp.a > d) {
    info.kind = Regime::swave_universal;
    info.swave_limit = std::exp(cdouble{0.0, 2.0 * pi * d / dsp.a});
  } else if (dsp.a == d) {
    info.kind = Regime::log_marginal;
    info.swave_limit = cdouble{1.0, 0.0};
  } else {
    info.kind = Regime::below_marginal;
    info.swave_limit = cdouble{1.0, 0.0};
  }
  return info;
}

double swave_coupling_abs2(const models::CouplingSpec& v, const disp::Isotropic& dsp,
                           double energy) {
  if (!(energy > 0.0)) fail(Errc::outside_continuum, "on-shell momentum needs E > 0");
  return v.abs2(disp::radial_momentum(dsp, energy));
}

cdouble k_radial(const models::CouplingSpec& v, const disp::Isotropic& dsp, cdouble omega,
                 const num::QuadratureSpec& spec) {
  v.validate();
  reject_on_continuum(dsp, omega);
  auto w = [&v](double k) { return v.abs2(k); };
  return radial_integral(w, v.support_scale(), dsp, omega, spec);
}

BoundaryParts k_radial_boundary_parts(const models::CouplingSpec& v, const disp::Isotropic& dsp,
                                      double energy, const num::QuadratureSpec& spec) {
  v.validate();
  dsp.validate();
  if (!(energy > 0.0)) fail(Errc::outside_continuum, "boundary value needs E > 0");
  const double bd = dsp.solid_angle();
  const double a = dsp.a;
  const int dm1 = dsp.D - 1;
  const double ke = disp::radial_momentum(dsp, energy);
  auto f = [&](double k) -> cdouble {
    return radial_point(k, v.abs2(k), bd, a, dm1, cdouble{energy, 0.0});
  };
  BoundaryParts parts;
  parts.principal = num::principal_value(f, {ke}, spec, 0.0, inf);
  parts.half_residue = pi * disp::density_of_states(dsp, energy) * v.abs2(ke);
  return parts;
}

cdouble k_radial_boundary(const models::CouplingSpec& v, const disp::Isotropic& dsp,
                          double energy, Side side, const num::QuadratureSpec& spec) {
  return k_radial_boundary_parts(v, dsp, energy, spec).side_value(side);
}

cdouble l_radial(const disp::Isotropic& dsp, cdouble omega, const num::QuadratureSpec& spec) {
  dsp.validate();
  if (!(dsp.zeta() > 1.0)) {
    fail(Errc::zeta_not_divergent, "unit-weight integral diverges unless a/D > 1");
  }
  reject_on_continuum(dsp, omega);
  auto w = [](double) { return 1.0; };
  return radial_integral(w, 1.0, dsp, omega, spec);
}

}  // namespace dscatter::hyperdim
