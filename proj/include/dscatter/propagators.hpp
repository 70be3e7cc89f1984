#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include <dscatter/common.hpp>
#include <dscatter/dispersion.hpp>
#include <dscatter/hyperdim.hpp>
#include <dscatter/models.hpp>
#include <dscatter/numerics.hpp>

// Level-shift integrals, emitter-sector resolvent, and the scalar function
// J(omega) whose boundary ratio carries the full S-matrix determinant and
// whose zeros are the bound states.

namespace dscatter::prop {

// omega = sigma * |omega| * e^{i theta} with theta in (0, 2*pi); theta = 2*pi
// is never produced because that ray is the continuum (or its edge).
struct PolarFrequency {
  double magnitude = 0.0;
  double theta = 0.0;
  int sigma = 1;

  static PolarFrequency decompose(cdouble omega, int sigma);
  cdouble reconstruct() const;
};

// Sum of mu^{2j} over the root indices j whose pole lies in the upper
// half-plane, mu = e^{i pi / m}. Closed forms per parity and half-plane,
// cross-checked at construction against the explicit root walk.
struct KappaEntry {
  int m = 2;
  cdouble mu{0.0, 0.0};
  cdouble kappa{0.0, 0.0};
  int index_count = 0;

  static KappaEntry make(int m, double theta);
};

// Unit-weight level integral int dk / (omega - eps(k)), closed form.
cdouble l_closed(const disp::Dispersion& dsp, cdouble omega);

// Same object by direct quadrature (validation path). Needs m >= 2 in one
// dimension, zeta > 1 for the isotropic case.
cdouble l_quadrature(const disp::Dispersion& dsp, cdouble omega,
                     const num::QuadratureSpec& spec = {});

// K(omega) = int |V(k)|^2 / (omega - eps(k)), off the continuum.
cdouble k_scalar(const models::CouplingSpec& v, const disp::Dispersion& dsp, cdouble omega,
                 const num::QuadratureSpec& spec = {});

// Boundary values K(E +- i0) on the continuum: principal value -+ i*pi times
// the on-shell weight per branch.
cdouble k_boundary(const models::CouplingSpec& v, const disp::Dispersion& dsp, double energy,
                   Side side, const num::QuadratureSpec& spec = {});

// Emitter-sector resolvent (omega - KR - K(omega) |u><u|)^{-1}.
Eigen::MatrixXcd green_matrix(const models::EmitterModel& model, const disp::Dispersion& dsp,
                              cdouble omega, const num::QuadratureSpec& spec = {});
Eigen::MatrixXcd green_matrix_boundary(const models::EmitterModel& model,
                                       const disp::Dispersion& dsp, double energy, Side side,
                                       const num::QuadratureSpec& spec = {});

// J(omega) = -K(omega) P_{N-1}(omega) + P_N(omega) with P_N = det(omega - KR)
// and P_{N-1} the same determinant with the coupling row and column removed
// in the basis whose first vector is u.
cdouble j_function(const models::EmitterModel& model, const disp::Dispersion& dsp,
                   cdouble omega, const num::QuadratureSpec& spec = {});
cdouble j_boundary(const models::EmitterModel& model, const disp::Dispersion& dsp,
                   double energy, Side side, const num::QuadratureSpec& spec = {});

// Shared facade for the sweep, bound-state, and winding machinery. The
// separable potential is the emitterless case: J = 1/g - K.
class ScatterOperator {
 public:
  virtual ~ScatterOperator() = default;

  virtual const disp::Dispersion& dispersion() const = 0;
  virtual int emitter_count() const = 0;
  virtual cdouble j(cdouble omega) const = 0;
  virtual cdouble j_boundary(double energy, Side side) const = 0;
  // Both boundary values from one principal-value evaluation.
  virtual std::pair<cdouble, cdouble> j_boundary_pair(double energy) const = 0;
  virtual cdouble t(cdouble omega, double k, double kp) const = 0;
  virtual cdouble t_boundary(double energy, Side side, double k, double kp) const = 0;
  virtual double energy_scale() const = 0;
  virtual bool hermitian_model() const = 0;
  // J restricted to the real axis off the continuum is real-valued.
  virtual bool j_real_off_continuum() const = 0;
  virtual const num::QuadratureSpec& quadrature() const = 0;
};

class EmitterOperator final : public ScatterOperator {
 public:
  EmitterOperator(models::EmitterModel model, disp::Dispersion dsp,
                  num::QuadratureSpec spec = {});

  const disp::Dispersion& dispersion() const override { return dsp_; }
  int emitter_count() const override { return model_.N(); }
  cdouble j(cdouble omega) const override;
  cdouble j_boundary(double energy, Side side) const override;
  std::pair<cdouble, cdouble> j_boundary_pair(double energy) const override;
  cdouble t(cdouble omega, double k, double kp) const override;
  cdouble t_boundary(double energy, Side side, double k, double kp) const override;
  double energy_scale() const override { return scale_; }
  bool hermitian_model() const override { return hermitian_; }
  bool j_real_off_continuum() const override { return hermitian_; }
  const num::QuadratureSpec& quadrature() const override { return spec_; }

  const models::EmitterModel& model() const { return model_; }
  cdouble k(cdouble omega) const;
  std::pair<cdouble, cdouble> k_boundary_pair(double energy) const;
  // det(omega - KR) and the coupling-deflated determinant as eigenvalue
  // products; uGu = P_{N-1} / J.
  cdouble char_full(cdouble omega) const;
  cdouble char_deflated(cdouble omega) const;
  cdouble u_green_u(cdouble omega) const;
  cdouble u_green_u_boundary(double energy, Side side) const;

 private:
  models::EmitterModel model_;
  disp::Dispersion dsp_;
  num::QuadratureSpec spec_;
  Eigen::VectorXcd eig_full_;       // eigenvalues of KR
  Eigen::VectorXcd eig_deflated_;   // eigenvalues of the u-complement block
  double scale_ = 1.0;
  bool hermitian_ = false;
};

class SeparableOperator final : public ScatterOperator {
 public:
  SeparableOperator(models::SeparableModel model, disp::Dispersion dsp,
                    num::QuadratureSpec spec = {});

  const disp::Dispersion& dispersion() const override { return dsp_; }
  int emitter_count() const override { return 0; }
  cdouble j(cdouble omega) const override;
  cdouble j_boundary(double energy, Side side) const override;
  std::pair<cdouble, cdouble> j_boundary_pair(double energy) const override;
  cdouble t(cdouble omega, double k, double kp) const override;
  cdouble t_boundary(double energy, Side side, double k, double kp) const override;
  double energy_scale() const override { return scale_; }
  bool hermitian_model() const override { return true; }
  bool j_real_off_continuum() const override { return true; }
  const num::QuadratureSpec& quadrature() const override { return spec_; }

  const models::SeparableModel& model() const { return model_; }

 private:
  models::SeparableModel model_;
  disp::Dispersion dsp_;
  num::QuadratureSpec spec_;
  double scale_ = 1.0;
};

std::unique_ptr<ScatterOperator> make_operator(models::EmitterModel model, disp::Dispersion dsp,
                                               num::QuadratureSpec spec = {});
std::unique_ptr<ScatterOperator> make_operator(models::SeparableModel model,
                                               disp::Dispersion dsp,
                                               num::QuadratureSpec spec = {});

}  // namespace dscatter::prop
