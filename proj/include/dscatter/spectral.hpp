#pragma once

#include <vector>

#include <dscatter/common.hpp>
#include <dscatter/numerics.hpp>
#include <dscatter/propagators.hpp>

// Bound states are the zeros of J(omega) off the continuum. Located by the
// argument principle on rectangles that hug but never touch the cut, then
// polished by Newton iteration.

namespace dscatter::spect {

struct BoundState {
  cdouble energy{0.0, 0.0};
  double residue_scale = 0.0;  // |J'(E_B)|, zero when the zero is multiple
  int multiplicity = 1;
};

struct BoundStateReport {
  std::vector<BoundState> states;
  int total_count = 0;  // zeros counted with multiplicity
  std::vector<num::RectContour> searched;
};

// Search regions scale with op.energy_scale(): the real interval
// [-10 S, 10 S] minus a thin exclusion strip along the continuum.
BoundStateReport find_bound_states(const prop::ScatterOperator& op);

// Independent count for models whose J is real on the real axis off the
// continuum: sign changes on a refined grid plus bisection. Fails
// GridTooCoarse when a near-tangency cannot be resolved, NotApplicable when
// J is not real there (or there is no off-continuum real axis at all).
int count_bound_states_real_axis(const prop::ScatterOperator& op, int grid_points = 2000);

// Bisection refinement of a bracketed real zero of a real-valued function.
double bisect_real_root(const std::function<double(double)>& f, double lo, double hi,
                        int max_iter = 200);

}  // namespace dscatter::spect
