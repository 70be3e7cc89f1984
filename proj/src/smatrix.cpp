#include <dscatter/smatrix.hpp>

#include <cmath>
#include <vector>

namespace dscatter::smat {

namespace {

Eigen::MatrixXcd s_matrix_1d(const prop::ScatterOperator& op, const disp::Power1D& dsp,
                             double energy) {
  const std::vector<double> roots = disp::degenerate_momenta(dsp, energy);
  const int n = static_cast<int>(roots.size());
  std::vector<double> vel(roots.size());
  for (int a = 0; a < n; ++a) vel[a] = std::fabs(disp::energy_derivative(dsp, roots[a]));
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const cdouble t = op.t_boundary(energy, Side::above, roots[a], roots[b]);
      s(a, b) -= 2.0 * pi * iunit * t / std::sqrt(vel[a] * vel[b]);
    }
  }
  return s;
}

}  // namespace

Eigen::MatrixXcd s_matrix(const prop::ScatterOperator& op, double energy) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&op.dispersion())) {
    return s_matrix_1d(op, *d1, energy);
  }
  Eigen::MatrixXcd s(1, 1);
  s(0, 0) = swave_channel_s11(op, energy);
  return s;
}

cdouble det_s_via_j(const prop::ScatterOperator& op, double energy) {
  const auto [above, below] = op.j_boundary_pair(energy);
  if (above == cdouble{0.0, 0.0}) {
    fail(Errc::bound_state_in_continuum, "J(E + i0) = 0: embedded eigenvalue at this energy");
  }
  return below / above;
}

Eigen::MatrixXcd universal_limit(const disp::Dispersion& dsp, int edge_sign) {
  if (edge_sign != 1 && edge_sign != -1) {
    fail(Errc::bad_argument, "edge_sign selects E -> 0+ or E -> 0-, must be +1 or -1");
  }
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    const disp::Power1D& d = *d1;
    d.validate();
    if (d.m == 1) {
      fail(Errc::non_universal,
           "linear dispersion has no universal zero-energy limit: S(0) depends on the model");
    }
    if (d.even()) {
      if (edge_sign != d.sigma) {
        fail(Errc::outside_continuum, "requested edge is outside the continuum");
      }
      const double x = pi / static_cast<double>(d.m);
      const cdouble ph = std::exp(cdouble{0.0, static_cast<double>(d.sigma) * x});
      const cdouble c{std::cos(x), 0.0};
      const cdouble s = static_cast<double>(d.sigma) * iunit * std::sin(x);
      Eigen::MatrixXcd m(2, 2);
      m << ph * c, ph * s, ph * s, ph * c;
      return m;
    }
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::exp(cdouble{0.0, static_cast<double>(edge_sign) * pi /
                                        static_cast<double>(d.m)});
    return m;
  }
  const disp::Isotropic& d = std::get<disp::Isotropic>(dsp);
  d.validate();
  if (edge_sign != 1) fail(Errc::outside_continuum, "isotropic continuum starts at E = 0+");
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = hyperdim::regime(d).swave_limit;
  return m;
}

cdouble t_matrix(const models::EmitterModel& model, const disp::Dispersion& dsp, cdouble omega,
                 double k_out, double k_in, const num::QuadratureSpec& spec) {
  return prop::EmitterOperator(model, dsp, spec).t(omega, k_out, k_in);
}

cdouble t_separable(const models::SeparableModel& model, const disp::Dispersion& dsp,
                    cdouble omega, double k_out, double k_in,
                    const num::QuadratureSpec& spec) {
  return prop::SeparableOperator(model, dsp, spec).t(omega, k_out, k_in);
}

cdouble swave_channel_s11(const prop::ScatterOperator& op, double energy) {
  const auto* d = std::get_if<disp::Isotropic>(&op.dispersion());
  if (d == nullptr) {
    fail(Errc::not_applicable, "s-wave channel element is an isotropic-dispersion quantity");
  }
  const double ke = disp::radial_momentum(*d, energy);
  const double rho = disp::density_of_states(*d, energy);
  return 1.0 - 2.0 * pi * iunit * rho * op.t_boundary(energy, Side::above, ke, ke);
}

double unitarity_defect(const Eigen::MatrixXcd& s) {
  const Eigen::MatrixXcd dev =
      s * s.adjoint() - Eigen::MatrixXcd::Identity(s.rows(), s.cols());
  if (dev.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dev);
  return svd.singularValues()(0);
}

}  // namespace dscatter::smat
