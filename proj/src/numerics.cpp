#include "dscatter/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dscatter::num {

namespace {

bool finite(cdouble v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// ---------------------------------------------------------------------------
// Double-exponential trapezoid driver.
//
// Substitutions (c = pi/2):
//   whole line:  k = sinh(c sinh t),      dk = c cosh(t) cosh(c sinh t) dt
//   half line:   k = a + exp(c sinh t),   dk = c cosh(t) exp(c sinh t) dt
// Both squash polynomially decaying integrands into double-exponentially
// decaying ones in t, so the trapezoid sum converges geometrically in the
// level index (step halving). Each level recomputes its own truncation range.
// ---------------------------------------------------------------------------

constexpr double kDEC = pi / 2.0;
// c*sinh(t) stays below ~708 so exp/sinh never overflow.
const double kTMax = std::asinh(708.0 / kDEC);
// Always scan at least to |t| = 3 before trusting the small-term cutoff, so
// structure away from the map center cannot be silently skipped.
constexpr double kTScanMin = 3.0;

struct DESample {
  double k;
  double w;  // dk/dt
  bool ok;
};

DESample de_node_line(double t) {
  double s = kDEC * std::sinh(t);
  if (std::fabs(s) > 708.0) return {0.0, 0.0, false};
  return {std::sinh(s), kDEC * std::cosh(t) * std::cosh(s), true};
}

DESample de_node_half(double t, double a) {
  double s = kDEC * std::sinh(t);
  if (std::fabs(s) > 708.0) return {0.0, 0.0, false};
  double e = std::exp(s);
  return {a + e, kDEC * std::cosh(t) * e, true};
}

QuadResult de_integrate(const RealFn& f, bool half_line, double a,
                        const QuadratureSpec& spec) {
  spec.validate();
  const int max_level =
      std::clamp(static_cast<int>(std::log2(std::max(2, spec.max_subdivisions))), 4, 13);

  auto node = [&](double t) -> DESample {
    return half_line ? de_node_half(t, a) : de_node_line(t);
  };

  long evals = 0;
  auto term = [&](double t) -> cdouble {
    DESample n = node(t);
    if (!n.ok) return {0.0, 0.0};
    cdouble v = f(n.k);
    ++evals;
    if (!finite(v))
      fail(Errc::singular_integrand, "integrand not finite at k=" + std::to_string(n.k));
    return v * n.w;
  };

  cdouble prev{0.0, 0.0};
  double err = inf;
  cdouble total{0.0, 0.0};
  for (int level = 0; level <= max_level; ++level) {
    const double h = 1.0 / static_cast<double>(1 << level);
    cdouble sum = term(0.0);
    double peak = std::abs(sum);
    for (int dir = -1; dir <= 1; dir += 2) {
      int small_run = 0;
      for (long n = 1;; ++n) {
        double t = dir * n * h;
        if (std::fabs(t) > kTMax) break;
        cdouble g = term(t);
        sum += g;
        double mag = std::abs(g);
        peak = std::max(peak, mag);
        if (std::fabs(t) >= kTScanMin) {
          double thresh =
              0.01 * std::max(spec.abs_tol / h, spec.rel_tol * std::max(peak, std::abs(sum)));
          small_run = (mag <= thresh) ? small_run + 1 : 0;
          if (small_run >= 4) break;
        }
      }
    }
    total = h * sum;
    if (level > 0) {
      err = std::abs(total - prev);
      double tol_eff = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
      if (err <= 0.5 * tol_eff && level >= 2) return {total, err, evals};
    }
    prev = total;
  }
  double tol_eff = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  if (err <= tol_eff) return {total, err, evals};
  fail(Errc::non_convergence,
       "double-exponential levels exhausted, err=" + std::to_string(err));
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15(7) adaptive bisection on a finite segment.
// ---------------------------------------------------------------------------

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GKOut {
  cdouble value;
  double err;
};

GKOut gk15(const RealFn& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  cdouble fc = f(c);
  evals += 15;
  if (!finite(fc)) fail(Errc::singular_integrand, "integrand not finite at k=" + std::to_string(c));
  cdouble i15 = kWgk[7] * fc;
  cdouble i7 = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    cdouble fp = f(c + hw * kXgk[j]);
    cdouble fm = f(c - hw * kXgk[j]);
    if (!finite(fp) || !finite(fm))
      fail(Errc::singular_integrand, "integrand not finite inside segment");
    i15 += kWgk[j] * (fp + fm);
    if (j % 2 == 1) i7 += kWg[(j - 1) / 2] * (fp + fm);
  }
  i15 *= hw;
  i7 *= hw;
  return {i15, std::abs(i15 - i7)};
}

struct Interval {
  double a, b;
  cdouble value;
  double err;
  long id;
};

struct WorseErr {
  bool operator()(const Interval& x, const Interval& y) const {
    if (x.err != y.err) return x.err < y.err;
    return x.id > y.id;
  }
};

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    fail(Errc::bad_argument, "quadrature tolerances must be positive");
  if (max_subdivisions < 1) fail(Errc::bad_argument, "max_subdivisions must be >= 1");
}

QuadResult integrate_infinite(const RealFn& f, const QuadratureSpec& spec) {
  if (!(spec.domain_decay_hint > 1.0))
    fail(Errc::bad_argument, "whole-line integrand must decay faster than 1/|k|");
  return de_integrate(f, false, 0.0, spec);
}

QuadResult integrate_half_line(const RealFn& f, double a, const QuadratureSpec& spec) {
  if (!std::isfinite(a)) fail(Errc::bad_argument, "half-line endpoint must be finite");
  return de_integrate(f, true, a, spec);
}

QuadResult integrate_segment(const RealFn& f, double a, double b,
                             const QuadratureSpec& spec) {
  spec.validate();
  if (!(std::isfinite(a) && std::isfinite(b) && a < b))
    fail(Errc::bad_argument, "segment endpoints must be finite and ordered");

  long evals = 0;
  long next_id = 0;
  std::priority_queue<Interval, std::vector<Interval>, WorseErr> queue;
  std::vector<Interval> stuck;

  GKOut first = gk15(f, a, b, evals);
  queue.push({a, b, first.value, first.err, next_id++});
  cdouble total = first.value;
  double total_err = first.err;
  int count = 1;

  const double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    double tol_eff = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (total_err <= tol_eff || queue.empty()) break;
    if (count >= spec.max_subdivisions)
      fail(Errc::non_convergence, "segment interval budget exhausted");
    Interval worst = queue.top();
    queue.pop();
    double width = worst.b - worst.a;
    double floor_w = 50.0 * eps * std::max({std::fabs(worst.a), std::fabs(worst.b), 1.0});
    if (width < floor_w) {
      stuck.push_back(worst);
      continue;
    }
    double mid = 0.5 * (worst.a + worst.b);
    GKOut left = gk15(f, worst.a, mid, evals);
    GKOut right = gk15(f, mid, worst.b, evals);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    queue.push({worst.a, mid, left.value, left.err, next_id++});
    queue.push({mid, worst.b, right.value, right.err, next_id++});
    ++count;
  }

  double tol_eff = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  if (total_err > 64.0 * tol_eff)
    fail(Errc::non_convergence, "segment quadrature stalled, err=" + std::to_string(total_err));
  return {total, total_err, evals};
}

cdouble principal_value(const RealFn& f, std::vector<double> poles,
                        const QuadratureSpec& spec, double lo, double hi) {
  spec.validate();
  if (!(lo < hi)) fail(Errc::bad_argument, "empty principal-value domain");

  auto piece = [&](double a, double b) -> cdouble {
    if (a >= b) return {0.0, 0.0};
    if (std::isinf(a) && std::isinf(b)) return integrate_infinite(f, spec).value;
    if (std::isinf(b)) return integrate_half_line(f, a, spec).value;
    if (std::isinf(a)) {
      RealFn mirrored = [&f](double k) { return f(-k); };
      return integrate_half_line(mirrored, -b, spec).value;
    }
    return integrate_segment(f, a, b, spec).value;
  };

  if (poles.empty()) return piece(lo, hi);

  std::sort(poles.begin(), poles.end());
  const std::size_t n = poles.size();
  double scale = 1.0;
  for (double p : poles) {
    scale = std::max(scale, std::fabs(p));
    if (!std::isfinite(p) || p <= lo || p >= hi)
      fail(Errc::bad_argument, "pole outside the open integration domain");
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (poles[i + 1] - poles[i] < 1e-10 * scale)
      fail(Errc::pole_collision, "poles too close for disjoint excision windows");

  std::vector<double> half(n);
  for (std::size_t i = 0; i < n; ++i) {
    double room = 1.0 + 0.05 * std::fabs(poles[i]);
    if (i > 0) room = std::min(room, poles[i] - poles[i - 1]);
    if (i + 1 < n) room = std::min(room, poles[i + 1] - poles[i]);
    if (std::isfinite(lo)) room = std::min(room, poles[i] - lo);
    if (std::isfinite(hi)) room = std::min(room, hi - poles[i]);
    half[i] = 0.45 * room;
    if (!(half[i] > 0.0)) fail(Errc::pole_collision, "no room for excision window");
  }

  cdouble total{0.0, 0.0};
  // Windows: the symmetric pair f(p+t)+f(p-t) has the simple pole cancelled
  // identically, leaving a smooth even remainder on (0, h].
  for (std::size_t i = 0; i < n; ++i) {
    const double p = poles[i];
    RealFn paired = [&f, p](double t) { return f(p + t) + f(p - t); };
    total += integrate_segment(paired, 0.0, half[i], spec).value;
  }
  // Regular remainder.
  total += piece(lo, poles[0] - half[0]);
  for (std::size_t i = 0; i + 1 < n; ++i)
    total += piece(poles[i] + half[i], poles[i + 1] - half[i + 1]);
  total += piece(poles[n - 1] + half[n - 1], hi);
  return total;
}

std::vector<double> unwrap_phase(std::span<const cdouble> samples, double jump_margin) {
  if (samples.empty()) fail(Errc::bad_argument, "no samples to unwrap");
  if (!(jump_margin > 0.0 && jump_margin < pi))
    fail(Errc::bad_argument, "jump margin must lie in (0, pi)");
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!finite(samples[i]) || std::abs(samples[i]) < 1e-300)
      fail(Errc::zero_sample, "sample " + std::to_string(i) + " is zero or not finite");
    if (i == 0) {
      out[0] = principal_arg(samples[0]);
      continue;
    }
    double step = principal_arg(samples[i] / samples[i - 1]);
    if (std::fabs(step) >= pi - jump_margin)
      fail(Errc::jump_too_large,
           "argument gap " + std::to_string(step) + " at sample " + std::to_string(i));
    out[i] = out[i - 1] + step;
  }
  return out;
}

namespace {

struct WindingState {
  const ComplexFn* h;
  double floor_abs;
  long evals;
  long budget;
  double min_sep;
  double max_len;
};

cdouble winding_eval(WindingState& st, cdouble z) {
  if (st.evals >= st.budget)
    fail(Errc::non_convergence, "zero-count boundary refinement budget exhausted");
  ++st.evals;
  cdouble v = (*st.h)(z);
  if (!finite(v)) fail(Errc::singular_integrand, "contour function not finite");
  if (std::abs(v) < st.floor_abs)
    fail(Errc::zero_on_contour, "|h| collapsed on the contour");
  return v;
}

// A segment is trusted only when the argument step is small, the magnitude is
// smooth, and the segment is short relative to the contour. The magnitude and
// length tests guard against aliasing: two zeros just inside the contour can
// rotate the phase by a full turn between samples while the endpoint
// arguments barely move. Near the origin the cap tightens to a fraction of
// |z|: the functions counted here have branch points with power-law spikes at
// zero, and a spike next to a shallow zero can cancel a full turn inside one
// segment unless the sampling is kept uniform in log |z|.
double winding_refine(WindingState& st, cdouble z1, cdouble v1, cdouble z2, cdouble v2,
                      int depth) {
  const double d = principal_arg(v2 / v1);
  const double len = std::abs(z2 - z1);
  const bool arg_ok = std::fabs(d) <= pi / 2.0;
  const bool mag_ok = std::fabs(std::log(std::abs(v2) / std::abs(v1))) <= 1.0;
  const double cap =
      std::min(st.max_len, std::max(0.5 * std::min(std::abs(z1), std::abs(z2)),
                                    4.0 * st.min_sep));
  if (arg_ok && mag_ok && len <= cap) return d;
  if (depth > 60 || len < st.min_sep) {
    if (arg_ok) return d;  // magnitude roughness at floor scale is harmless
    fail(Errc::non_integer_winding,
         "argument jump persists under refinement (branch cut or contour zero)");
  }
  cdouble zm = 0.5 * (z1 + z2);
  cdouble vm = winding_eval(st, zm);
  return winding_refine(st, z1, v1, zm, vm, depth + 1) +
         winding_refine(st, zm, vm, z2, v2, depth + 1);
}

}  // namespace

int count_zeros(const ComplexFn& h, const RectContour& rect, const QuadratureSpec& spec) {
  spec.validate();
  if (!(rect.re_min < rect.re_max && rect.im_min < rect.im_max))
    fail(Errc::bad_argument, "degenerate rectangle");
  const cdouble corners[4] = {{rect.re_min, rect.im_min},
                              {rect.re_max, rect.im_min},
                              {rect.re_max, rect.im_max},
                              {rect.re_min, rect.im_max}};

  const double geom = std::max({std::fabs(rect.re_min), std::fabs(rect.re_max),
                                std::fabs(rect.im_min), std::fabs(rect.im_max), 1.0});
  const double diag = std::hypot(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
  WindingState st{&h, 1e-290, 0, std::max<long>(32768, 8L * spec.max_subdivisions),
                  64.0 * std::numeric_limits<double>::epsilon() * geom, 0.04 * diag};

  // Initial ring: 16 intervals per edge.
  std::vector<cdouble> zs, vs;
  for (int e = 0; e < 4; ++e) {
    cdouble za = corners[e], zb = corners[(e + 1) % 4];
    for (int j = 0; j < 16; ++j) {
      cdouble z = za + (zb - za) * (static_cast<double>(j) / 16.0);
      zs.push_back(z);
      vs.push_back(winding_eval(st, z));
    }
  }
  // Relative floor from the median boundary magnitude; rechecked post hoc so
  // a contour passing through a zero is reported rather than miscounted.
  std::vector<double> mags(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) mags[i] = std::abs(vs[i]);
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  st.floor_abs = std::max(1e-290, 1e-15 * mags[mags.size() / 2]);
  for (double m : mags)
    if (m < st.floor_abs) fail(Errc::zero_on_contour, "|h| collapsed on the contour");

  double total = 0.0;
  const std::size_t n = zs.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    total += winding_refine(st, zs[i], vs[i], zs[j], vs[j], 0);
  }
  double w_raw = total / (2.0 * pi);
  long w = std::lround(w_raw);
  if (std::fabs(w_raw - static_cast<double>(w)) > 0.05)
    fail(Errc::non_integer_winding,
         "winding " + std::to_string(w_raw) + " is not close to an integer");
  if (w < 0)
    fail(Errc::non_integer_winding, "negative winding for a function declared analytic");
  return static_cast<int>(w);
}

}  // namespace dscatter::num
