// Quadrature and complex-analysis kernels: double-exponential rules for
// infinite domains, adaptive Gauss-Kronrod for segments, principal values by
// symmetric pole excision, phase unwrapping, and argument-principle zero
// counting on rectangles.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dscatter/common.hpp"

namespace dscatter::num {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Budget knob: refinement levels for the double-exponential rules and the
  // interval budget for adaptive bisection share it (levels ~ log2 of it).
  int max_subdivisions = 4000;
  // Asserted power-law falloff exponent p with |f(k)| <~ |k|^{-p} at large
  // |k|; only used to pick safe truncation ranges, never for accuracy claims.
  double domain_decay_hint = 2.0;

  void validate() const;
};

struct QuadResult {
  cdouble value{0.0, 0.0};
  double err_est = 0.0;
  long evaluations = 0;
};

using RealFn = std::function<cdouble(double)>;

// Whole real line, integrand smooth with |f| = o(|k|^{-1}).
QuadResult integrate_infinite(const RealFn& f, const QuadratureSpec& spec = {});

// (a, +inf); integrand may be merely bounded at the finite endpoint.
QuadResult integrate_half_line(const RealFn& f, double a, const QuadratureSpec& spec = {});

// Finite segment, adaptive Gauss-Kronrod 15(7); endpoints never evaluated by
// the base rule, and bisection zooms logarithmically onto interior spikes.
QuadResult integrate_segment(const RealFn& f, double a, double b,
                             const QuadratureSpec& spec = {});

// Cauchy principal value of f over (lo, hi) with simple poles at `poles`
// (strictly inside the domain, pairwise separated). Each pole gets a
// symmetric window [p-h, p+h]; on the window the pole term cancels exactly in
// the paired integrand f(p+t)+f(p-t), and the remainder of the domain is
// regular quadrature.
cdouble principal_value(const RealFn& f, std::vector<double> poles,
                        const QuadratureSpec& spec = {}, double lo = -inf,
                        double hi = inf);

// Cumulative continuous argument along a sample path; out[0] in (-pi, pi].
std::vector<double> unwrap_phase(std::span<const cdouble> samples,
                                 double jump_margin = 1e-3);

struct RectContour {
  double re_min, re_max, im_min, im_max;

  bool contains(cdouble z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min &&
           z.imag() < im_max;
  }
  cdouble center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
};

using ComplexFn = std::function<cdouble(cdouble)>;

// Number of zeros (with multiplicity) of an analytic h inside the rectangle,
// via the boundary winding of h: the contour integral of h'/h equals the
// total continuous change of log h, whose imaginary part is tracked by
// adaptive refinement until adjacent argument steps are small.
int count_zeros(const ComplexFn& h, const RectContour& rect,
                const QuadratureSpec& spec = {});

}  // namespace dscatter::num
