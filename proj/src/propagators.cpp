#include <dscatter/propagators.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace dscatter::prop {

namespace {

using WeightFn = std::function<double(double)>;

void reject_on_continuum_1d(const disp::Power1D& dsp, cdouble omega) {
  dsp.validate();
  if (omega.imag() != 0.0) return;
  if (omega.real() == 0.0) fail(Errc::zero_frequency, "omega = 0 sits on the band edge");
  if (dsp.even()) {
    if (dsp.sigma * omega.real() > 0.0) {
      fail(Errc::on_continuum, "omega on the continuum, use the boundary-value routine");
    }
    return;
  }
  fail(Errc::on_continuum, "odd power dispersions cover the whole real axis");
}

// w(k) / (omega - eps(k)) with an asymptotic branch once |k|^m overflows
// (the double-exponential tails sample k up to ~1e307).
cdouble weighted_point_1d(const disp::Power1D& dsp, cdouble omega, double k, double wk) {
  if (wk == 0.0) return {};
  const double t = std::pow(std::fabs(k), dsp.m);
  const bool neg = (dsp.sigma < 0) != (dsp.m % 2 == 1 && k < 0.0);
  const double sgn = neg ? -1.0 : 1.0;
  if (t > 1e300) {
    return cdouble{-sgn * wk * std::pow(std::fabs(k), -dsp.m) / dsp.d, 0.0};
  }
  return wk / (omega - sgn * dsp.d * t);
}

// int dk w(k) / (omega - eps(k)) over the whole line, omega off the
// continuum. Poles sit at r e^{i(theta + 2 pi j)/m}; when one of them hugs
// the real axis the direct double-exponential rule would need absurd node
// counts, so switch to a split with adaptive panels over the pole region.
cdouble line_integral_1d(const WeightFn& w, double w_scale, const disp::Power1D& dsp,
                         cdouble omega, const num::QuadratureSpec& spec) {
  const PolarFrequency pf = PolarFrequency::decompose(omega, dsp.sigma);
  const double r = std::pow(pf.magnitude / dsp.d, 1.0 / dsp.m);
  double min_im = inf;
  for (int j = 0; j < dsp.m; ++j) {
    const double ang = (pf.theta + 2.0 * pi * j) / dsp.m;
    min_im = std::min(min_im, std::fabs(r * std::sin(ang)));
  }
  auto f = [&](double k) -> cdouble { return weighted_point_1d(dsp, omega, k, w(k)); };
  if (min_im > 0.5 * std::max({r, w_scale, 1.0})) {
    return num::integrate_infinite(f, spec).value;
  }
  const double kc = std::max({4.0 * r, 8.0 * w_scale, 8.0});
  const cdouble mid = num::integrate_segment(f, -kc, kc, spec).value;
  const cdouble hi = num::integrate_half_line(f, kc, spec).value;
  const cdouble lo =
      num::integrate_half_line([&f](double k) { return f(-k); }, kc, spec).value;
  return mid + hi + lo;
}

struct BoundaryParts1D {
  cdouble principal{0.0, 0.0};
  double half_residue = 0.0;
};

BoundaryParts1D boundary_parts_1d(const WeightFn& w, const disp::Power1D& dsp, double energy,
                                  const num::QuadratureSpec& spec) {
  dsp.validate();
  if (!disp::continuum(dsp).contains(energy)) {
    fail(Errc::outside_continuum, "boundary value needs E inside the continuum");
  }
  const std::vector<double> roots = disp::degenerate_momenta(dsp, energy);
  auto f = [&](double k) -> cdouble {
    return weighted_point_1d(dsp, cdouble{energy, 0.0}, k, w(k));
  };
  const cdouble pv = num::principal_value(f, roots, spec);
  double res = 0.0;
  for (double ka : roots) res += w(ka) / std::fabs(disp::energy_derivative(dsp, ka));
  return {pv, pi * res};
}

double rho_mag_1d(const disp::Power1D& dsp, double x) {
  const double mm = static_cast<double>(dsp.m);
  return (2.0 / (mm * std::pow(dsp.d, 1.0 / mm))) * std::pow(x, -1.0 + 1.0 / mm);
}

double operator_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

Eigen::MatrixXcd resolvent_from(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 1e-13 * std::max(smax, 1e-300))) {
    fail(Errc::singular_resolvent, "emitter-sector operator is numerically singular");
  }
  Eigen::VectorXcd inv = sv.cast<cdouble>().cwiseInverse();
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Eigen::MatrixXcd shifted_operator(const models::EmitterModel& model, cdouble omega,
                                  cdouble kval) {
  Eigen::MatrixXcd m = -model.KR;
  m.diagonal().array() += omega;
  m.noalias() -= kval * (model.u * model.u.adjoint());
  return m;
}

}  // namespace

PolarFrequency PolarFrequency::decompose(cdouble omega, int sigma) {
  if (omega == cdouble{0.0, 0.0}) fail(Errc::zero_frequency, "omega = 0 has no polar form");
  if (sigma != 1 && sigma != -1) fail(Errc::bad_argument, "sigma must be +1 or -1");
  const double a = principal_arg(static_cast<double>(sigma) * omega);
  if (a == 0.0) {
    fail(Errc::on_continuum, "sigma*omega on the positive real axis is the continuum ray");
  }
  PolarFrequency pf;
  pf.magnitude = std::abs(omega);
  pf.theta = (a > 0.0) ? a : a + 2.0 * pi;
  pf.sigma = sigma;
  return pf;
}

cdouble PolarFrequency::reconstruct() const {
  return static_cast<double>(sigma) * magnitude * std::exp(cdouble{0.0, theta});
}

KappaEntry KappaEntry::make(int m, double theta) {
  if (m < 2) fail(Errc::bad_argument, "root half-plane sums are defined for m >= 2");
  if (!(theta > 0.0) || !(theta < 2.0 * pi)) {
    fail(Errc::bad_argument, "theta must lie strictly inside (0, 2*pi)");
  }
  KappaEntry e;
  e.m = m;
  e.mu = std::exp(cdouble{0.0, pi / static_cast<double>(m)});
  const cdouble mu2 = e.mu * e.mu;
  if (m % 2 == 0) {
    e.kappa = 2.0 / (1.0 - mu2);
  } else if (theta < pi) {
    e.kappa = -1.0 / (e.mu - 1.0);
  } else if (theta > pi) {
    e.kappa = -1.0 / ((e.mu - 1.0) * e.mu);
  } else {
    fail(Errc::on_continuum, "theta = pi is the continuum ray for odd powers");
  }
  // walk the roots and re-derive the same sum from the upper half-plane set
  cdouble brute{0.0, 0.0};
  int count = 0;
  for (int j = 0; j < m; ++j) {
    const double ang = (theta + 2.0 * pi * j) / static_cast<double>(m);
    if (std::sin(ang) > 0.0) {
      brute += ipow(mu2, j);
      ++count;
    }
  }
  e.index_count = count;
  if (std::abs(e.kappa - brute) > 1e-9 * std::max(1.0, std::abs(e.kappa))) {
    fail(Errc::on_continuum,
         "frequency too close to the continuum to resolve the root half-planes");
  }
  return e;
}

cdouble l_closed(const disp::Dispersion& dsp, cdouble omega) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    const disp::Power1D& d = *d1;
    d.validate();
    if (d.m < 2) fail(Errc::not_applicable, "unit-weight level integral needs m >= 2");
    reject_on_continuum_1d(d, omega);
    const PolarFrequency pf = PolarFrequency::decompose(omega, d.sigma);
    const KappaEntry ke = KappaEntry::make(d.m, pf.theta);
    const double mm = static_cast<double>(d.m);
    const cdouble phase = std::exp(cdouble{0.0, -pf.theta * (mm - 1.0) / mm});
    return -pi * iunit * static_cast<double>(d.sigma) * ke.kappa *
           rho_mag_1d(d, pf.magnitude) * phase;
  }
  const disp::Isotropic& d = std::get<disp::Isotropic>(dsp);
  d.validate();
  if (!(d.zeta() > 1.0)) {
    fail(Errc::zeta_not_divergent, "unit-weight integral diverges unless a/D > 1");
  }
  if (omega.imag() == 0.0) {
    if (omega.real() == 0.0) fail(Errc::zero_frequency, "omega = 0 sits on the threshold");
    if (omega.real() > 0.0) {
      fail(Errc::on_continuum, "omega on the continuum, use the boundary-value routine");
    }
  }
  const double ap = principal_arg(omega);
  const double theta = (ap > 0.0) ? ap : ap + 2.0 * pi;
  const double zeta = d.zeta();
  const double rho = (d.solid_angle() / d.a) *
                     std::pow(std::abs(omega), -1.0 + static_cast<double>(d.D) / d.a);
  const cdouble kappa =
      2.0 / (1.0 - std::exp(cdouble{0.0, 2.0 * pi * static_cast<double>(d.D) / d.a}));
  const cdouble phase = std::exp(cdouble{0.0, -theta * (zeta - 1.0) / zeta});
  return -pi * iunit * rho * kappa * phase;
}

cdouble l_quadrature(const disp::Dispersion& dsp, cdouble omega,
                     const num::QuadratureSpec& spec) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    const disp::Power1D& d = *d1;
    d.validate();
    if (d.m < 2) fail(Errc::not_applicable, "unit-weight level integral needs m >= 2");
    reject_on_continuum_1d(d, omega);
    auto w = [](double) { return 1.0; };
    return line_integral_1d(w, 1.0, d, omega, spec);
  }
  return hyperdim::l_radial(std::get<disp::Isotropic>(dsp), omega, spec);
}

cdouble k_scalar(const models::CouplingSpec& v, const disp::Dispersion& dsp, cdouble omega,
                 const num::QuadratureSpec& spec) {
  v.validate();
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    reject_on_continuum_1d(*d1, omega);
    auto w = [&v](double k) { return v.abs2(k); };
    return line_integral_1d(w, v.support_scale(), *d1, omega, spec);
  }
  return hyperdim::k_radial(v, std::get<disp::Isotropic>(dsp), omega, spec);
}

cdouble k_boundary(const models::CouplingSpec& v, const disp::Dispersion& dsp, double energy,
                   Side side, const num::QuadratureSpec& spec) {
  v.validate();
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    auto w = [&v](double k) { return v.abs2(k); };
    const BoundaryParts1D parts = boundary_parts_1d(w, *d1, energy, spec);
    const double sgn = (side == Side::above) ? -1.0 : 1.0;
    return parts.principal + cdouble{0.0, sgn * parts.half_residue};
  }
  return hyperdim::k_radial_boundary(v, std::get<disp::Isotropic>(dsp), energy, side, spec);
}

Eigen::MatrixXcd green_matrix(const models::EmitterModel& model, const disp::Dispersion& dsp,
                              cdouble omega, const num::QuadratureSpec& spec) {
  model.validate_shape();
  return resolvent_from(shifted_operator(model, omega, k_scalar(model.coupling, dsp, omega, spec)));
}

Eigen::MatrixXcd green_matrix_boundary(const models::EmitterModel& model,
                                       const disp::Dispersion& dsp, double energy, Side side,
                                       const num::QuadratureSpec& spec) {
  model.validate_shape();
  const cdouble kv = k_boundary(model.coupling, dsp, energy, side, spec);
  return resolvent_from(shifted_operator(model, cdouble{energy, 0.0}, kv));
}

cdouble j_function(const models::EmitterModel& model, const disp::Dispersion& dsp,
                   cdouble omega, const num::QuadratureSpec& spec) {
  return EmitterOperator(model, dsp, spec).j(omega);
}

cdouble j_boundary(const models::EmitterModel& model, const disp::Dispersion& dsp,
                   double energy, Side side, const num::QuadratureSpec& spec) {
  return EmitterOperator(model, dsp, spec).j_boundary(energy, side);
}

EmitterOperator::EmitterOperator(models::EmitterModel model, disp::Dispersion dsp,
                                 num::QuadratureSpec spec)
    : model_(std::move(model)), dsp_(std::move(dsp)), spec_(spec) {
  model_.validate_shape();
  model_.coupling.validate();
  std::visit([](const auto& d) { d.validate(); }, dsp_);
  spec_.validate();
  hermitian_ = model_.hermitian();
  const int n = model_.N();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> full(model_.KR, false);
  if (full.info() != Eigen::Success) {
    fail(Errc::non_convergence, "eigenvalue iteration failed on the emitter operator");
  }
  eig_full_ = full.eigenvalues();
  if (n > 1) {
    const Eigen::MatrixXcd basis = models::u_basis(model_.u);
    const Eigen::MatrixXcd rotated = basis.adjoint() * model_.KR * basis;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> defl(
        rotated.bottomRightCorner(n - 1, n - 1), false);
    if (defl.info() != Eigen::Success) {
      fail(Errc::non_convergence, "eigenvalue iteration failed on the deflated block");
    }
    eig_deflated_ = defl.eigenvalues();
  } else {
    eig_deflated_.resize(0);
  }
  scale_ = std::max({1e-9, operator_norm(model_.KR), std::abs(k(cdouble{0.0, 1.0}))});
}

cdouble EmitterOperator::k(cdouble omega) const {
  return k_scalar(model_.coupling, dsp_, omega, spec_);
}

std::pair<cdouble, cdouble> EmitterOperator::k_boundary_pair(double energy) const {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp_)) {
    auto w = [this](double k) { return model_.coupling.abs2(k); };
    const BoundaryParts1D parts = boundary_parts_1d(w, *d1, energy, spec_);
    return {parts.principal - cdouble{0.0, parts.half_residue},
            parts.principal + cdouble{0.0, parts.half_residue}};
  }
  const hyperdim::BoundaryParts parts = hyperdim::k_radial_boundary_parts(
      model_.coupling, std::get<disp::Isotropic>(dsp_), energy, spec_);
  return {parts.side_value(Side::above), parts.side_value(Side::below)};
}

cdouble EmitterOperator::char_full(cdouble omega) const {
  cdouble p{1.0, 0.0};
  for (Eigen::Index i = 0; i < eig_full_.size(); ++i) p *= omega - eig_full_(i);
  return p;
}

cdouble EmitterOperator::char_deflated(cdouble omega) const {
  cdouble p{1.0, 0.0};
  for (Eigen::Index i = 0; i < eig_deflated_.size(); ++i) p *= omega - eig_deflated_(i);
  return p;
}

cdouble EmitterOperator::j(cdouble omega) const {
  return char_full(omega) - k(omega) * char_deflated(omega);
}

cdouble EmitterOperator::j_boundary(double energy, Side side) const {
  const auto pair = j_boundary_pair(energy);
  return side == Side::above ? pair.first : pair.second;
}

std::pair<cdouble, cdouble> EmitterOperator::j_boundary_pair(double energy) const {
  const auto kb = k_boundary_pair(energy);
  const cdouble pn = char_full(cdouble{energy, 0.0});
  const cdouble pd = char_deflated(cdouble{energy, 0.0});
  return {pn - kb.first * pd, pn - kb.second * pd};
}

cdouble EmitterOperator::u_green_u(cdouble omega) const {
  const cdouble jj = j(omega);
  if (jj == cdouble{0.0, 0.0}) {
    fail(Errc::singular_resolvent, "resolvent pole: omega is a bound state energy");
  }
  return char_deflated(omega) / jj;
}

cdouble EmitterOperator::u_green_u_boundary(double energy, Side side) const {
  const cdouble jj = j_boundary(energy, side);
  if (jj == cdouble{0.0, 0.0}) {
    fail(Errc::singular_resolvent, "boundary resolvent is singular at this energy");
  }
  return char_deflated(cdouble{energy, 0.0}) / jj;
}

cdouble EmitterOperator::t(cdouble omega, double k_out, double k_in) const {
  return std::conj(model_.coupling.value(k_in)) * model_.coupling.value(k_out) *
         u_green_u(omega);
}

cdouble EmitterOperator::t_boundary(double energy, Side side, double k_out, double k_in) const {
  return std::conj(model_.coupling.value(k_in)) * model_.coupling.value(k_out) *
         u_green_u_boundary(energy, side);
}

SeparableOperator::SeparableOperator(models::SeparableModel model, disp::Dispersion dsp,
                                     num::QuadratureSpec spec)
    : model_(std::move(model)), dsp_(std::move(dsp)), spec_(spec) {
  model_.validate_shape();
  std::visit([](const auto& d) { d.validate(); }, dsp_);
  spec_.validate();
  const double kmag =
      std::abs(k_scalar(model_.form_factor, dsp_, cdouble{0.0, 1.0}, spec_));
  scale_ = std::max({1e-9, std::fabs(1.0 / model_.g), kmag});
}

cdouble SeparableOperator::j(cdouble omega) const {
  return 1.0 / model_.g - k_scalar(model_.form_factor, dsp_, omega, spec_);
}

cdouble SeparableOperator::j_boundary(double energy, Side side) const {
  return 1.0 / model_.g - k_boundary(model_.form_factor, dsp_, energy, side, spec_);
}

std::pair<cdouble, cdouble> SeparableOperator::j_boundary_pair(double energy) const {
  const cdouble ginv{1.0 / model_.g, 0.0};
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp_)) {
    auto w = [this](double k) { return model_.form_factor.abs2(k); };
    const BoundaryParts1D parts = boundary_parts_1d(w, *d1, energy, spec_);
    return {ginv - (parts.principal - cdouble{0.0, parts.half_residue}),
            ginv - (parts.principal + cdouble{0.0, parts.half_residue})};
  }
  const hyperdim::BoundaryParts parts = hyperdim::k_radial_boundary_parts(
      model_.form_factor, std::get<disp::Isotropic>(dsp_), energy, spec_);
  return {ginv - parts.side_value(Side::above), ginv - parts.side_value(Side::below)};
}

cdouble SeparableOperator::t(cdouble omega, double k_out, double k_in) const {
  const cdouble jj = j(omega);
  if (jj == cdouble{0.0, 0.0}) {
    fail(Errc::singular_resolvent, "resolvent pole: omega is a bound state energy");
  }
  return model_.form_factor.value(k_out) * model_.form_factor.value(k_in) / jj;
}

cdouble SeparableOperator::t_boundary(double energy, Side side, double k_out,
                                      double k_in) const {
  const cdouble jj = j_boundary(energy, side);
  if (jj == cdouble{0.0, 0.0}) {
    fail(Errc::singular_resolvent, "boundary resolvent is singular at this energy");
  }
  return model_.form_factor.value(k_out) * model_.form_factor.value(k_in) / jj;
}

std::unique_ptr<ScatterOperator> make_operator(models::EmitterModel model, disp::Dispersion dsp,
                                               num::QuadratureSpec spec) {
  return std::make_unique<EmitterOperator>(std::move(model), std::move(dsp), spec);
}

std::unique_ptr<ScatterOperator> make_operator(models::SeparableModel model,
                                               disp::Dispersion dsp, num::QuadratureSpec spec) {
  return std::make_unique<SeparableOperator>(std::move(model), std::move(dsp), spec);
}

}  // namespace dscatter::prop
