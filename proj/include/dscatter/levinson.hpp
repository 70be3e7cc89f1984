#pragma once

#include <vector>

#include <dscatter/common.hpp>
#include <dscatter/propagators.hpp>
#include <dscatter/spectral.hpp>

// Winding of det S across the continuum against the bound-state count.
// The measured quantity is the accumulated argument of det S(E) along each
// continuum branch traversed with increasing energy, far ends anchored to
// det S -> 1; half that total is the phase shift delta_total. The prediction
// is pi*(N - N_B) plus a threshold anomaly set by how the level integral
// diverges at zero energy.

namespace dscatter::lev {

struct SweepOptions {
  double e_min_frac = 1e-10;  // |E| range endpoints as fractions of the scale
  double e_max_frac = 1e4;
  int points = 200;           // initial samples per branch, log spaced
  double tol = 0.05;          // verdict tolerance on delta_total, radians
  int max_refine_rounds = 24;
  double max_step = 0.25 * pi;  // refine until adjacent arg steps fit this
};

struct BranchTrace {
  int edge_sign = 1;              // sign of energies in this branch
  std::vector<double> energies;   // sorted by |E| descending (far to near)
  std::vector<cdouble> det_values;
  double winding = 0.0;           // arg change along increasing E, anchored
  double tail_phase = 0.0;        // principal arg of det S at the far end
  cdouble det_near{1.0, 0.0};     // det S at the smallest |E|
  cdouble universal_det{1.0, 0.0};
  double universal_gap = 0.0;     // |det_near - universal_det|, 0 if no limit
  bool has_universal = false;
};

struct WindingReport {
  double measured = 0.0;     // sum of branch windings = 2 * delta_total
  double delta_total = 0.0;  // phase shift, measured / 2
  double predicted = 0.0;    // pi * (N - N_B) + anomaly
  double residual = 0.0;     // delta_total - predicted
  double tail_bound = 0.0;   // sum of |tail_phase|, anchor uncertainty
  double anomaly = 0.0;      // threshold term in the prediction
  int n_emitters = 0;
  int n_bound = 0;
  std::vector<BranchTrace> branches;
  std::vector<spect::BoundState> bound_states;
  bool pass = false;
};

// Threshold anomaly of delta_total: pi*(m-1)/m in one dimension,
// pi*(a-D)/a isotropic above the marginal power, zero otherwise.
double winding_anomaly(const disp::Dispersion& dsp);

// Sweep one branch and return its anchored winding.
BranchTrace trace_branch(const prop::ScatterOperator& op, int edge_sign,
                         const SweepOptions& opt);

WindingReport levinson_check(const prop::ScatterOperator& op, const SweepOptions& opt = {});

}  // namespace dscatter::lev
