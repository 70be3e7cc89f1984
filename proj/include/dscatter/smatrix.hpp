#pragma once

#include <Eigen/Dense>

#include <dscatter/common.hpp>
#include <dscatter/dispersion.hpp>
#include <dscatter/models.hpp>
#include <dscatter/propagators.hpp>

// On-shell S-matrix in the energy-normalized channel basis, its determinant
// through the boundary ratio of J, and the universal zero-energy limits.

namespace dscatter::smat {

// Channel-resolved S(E). One dimension: channels are the degenerate momenta
// (+k then -k for even powers, a single signed momentum for odd powers).
// Isotropic: the 1x1 s-wave block.
Eigen::MatrixXcd s_matrix(const prop::ScatterOperator& op, double energy);

// det S(E) = J(E - i0) / J(E + i0).
cdouble det_s_via_j(const prop::ScatterOperator& op, double energy);

// Zero-energy limit of S on the continuum edge reached from energies of sign
// edge_sign. Fails NonUniversal for the linear dispersion m = 1, and
// OutsideContinuum when the requested edge is not a continuum edge.
Eigen::MatrixXcd universal_limit(const disp::Dispersion& dsp, int edge_sign);

// T(omega; k_out, k_in) for the emitter model: V*(k_in) V(k_out) <u|G|u>.
cdouble t_matrix(const models::EmitterModel& model, const disp::Dispersion& dsp, cdouble omega,
                 double k_out, double k_in, const num::QuadratureSpec& spec = {});

// Separable potential: v(k_out) v(k_in) / (1/g - K(omega)).
cdouble t_separable(const models::SeparableModel& model, const disp::Dispersion& dsp,
                    cdouble omega, double k_out, double k_in,
                    const num::QuadratureSpec& spec = {});

// Isotropic s-wave S-matrix element at energy E > 0.
cdouble swave_channel_s11(const prop::ScatterOperator& op, double energy);

// || S S^dag - 1 ||_2; zero for unitary S, positive when flux is absorbed.
double unitarity_defect(const Eigen::MatrixXcd& s);

}  // namespace dscatter::smat
