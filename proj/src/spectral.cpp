#include <dscatter/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace dscatter::spect {

namespace {

struct SearchPlan {
  std::vector<num::RectContour> regions;
  double band = 0.0;      // half-height of the near-axis layer owned by the 1D scans
  double probe_im = 0.0;  // depth of the dip-scan line below the real axis
};

// Zeros split into two populations. Anything within `band` of the real axis
// (real bound states, shallow complex zeros of lossy models) is found by
// dense one-dimensional scans along the axis: a winding contour hugging the
// axis aliases whenever two zeros fall between neighbouring boundary samples,
// so no contour edge is allowed near the axis at all. Deeper zeros are
// counted by the argument principle over a single rectangle whose top edge
// stays a full band below the axis. The band is kept thin: the dip scan only
// has contrast against zeros within about a band of its probe line, while the
// rectangle handles any isolated zero below it through argument refinement,
// so a thin band hands the mid-depth zeros to the contour where they are
// safe. Zeros under the continuum closer to it than ~1e-8 S are unreachable
// and surface through sweep diagnostics instead.
SearchPlan make_plan(const prop::ScatterOperator& op, double factor) {
  const double s = op.energy_scale();
  const double wide = 10.0 * s;
  SearchPlan plan;
  plan.band = 5e-3 * s * factor;
  plan.probe_im = 0.5 * plan.band;
  plan.regions.push_back({-wide, wide, -wide, -plan.band});
  return plan;
}

// Sign of the real half-axis outside the continuum; 0 when the continuum
// covers the whole axis.
int off_cut_sign(const disp::Dispersion& dsp) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    if (!d1->even()) return 0;
    return -d1->sigma;
  }
  return -1;
}

std::optional<cdouble> newton_free(const num::ComplexFn& j, cdouble z0, double scale,
                                   double wide, double band) {
  cdouble z = z0;
  try {
    for (int it = 0; it < 64; ++it) {
      const double h = std::max(1e-7 * scale, 1e-9 * std::abs(z));
      const cdouble jz = j(z);
      const cdouble deriv = (j(z + h) - j(z - h)) / (2.0 * h);
      if (deriv == cdouble{0.0, 0.0}) break;
      const cdouble step = jz / deriv;
      z -= step;
      if (std::abs(z.real()) > 1.2 * wide || z.imag() < -1.2 * wide ||
          z.imag() > 4.0 * band || !std::isfinite(std::abs(z))) {
        return std::nullopt;
      }
      if (std::abs(step) <= 1e-13 * std::max(scale, std::abs(z))) return z;
    }
  } catch (const ScatterError&) {
    return std::nullopt;
  }
  return z;  // iteration cap; the tiny-contour check decides
}

// Multiplicity of a polished near-axis candidate via a tiny contour.
// Returns 0 when the candidate does not verify. For candidates under the
// continuum the contour is shrunk to stay strictly below the cut.
int confirm_candidate(const num::ComplexFn& j, cdouble z, double scale,
                      const num::QuadratureSpec& spec, bool cut_side, double* dj_out) {
  double rad = std::max({1e-9 * scale, 2e-8 * std::abs(z), 1e-14});
  if (cut_side && z.imag() > -4.0 * rad) {
    rad = -z.imag() / 4.0;
    if (rad < 1e-14) return 0;  // hugging the cut: unreachable
  }
  num::RectContour tiny{z.real() - rad, z.real() + rad, z.imag() - rad, z.imag() + rad};
  int c = 0;
  try {
    c = num::count_zeros(j, tiny, spec);
  } catch (const ScatterError&) {
    return 0;
  }
  if (c == 1 && dj_out != nullptr) {
    const double h = std::max(1e-7 * scale, 1e-9 * std::abs(z));
    *dj_out = std::abs((j(z + h) - j(z - h)) / (2.0 * h));
  }
  return c;
}

bool near_duplicate(const std::vector<BoundState>& states, cdouble z, double scale) {
  for (const BoundState& b : states) {
    if (std::abs(b.energy - z) < std::max(1e-6 * scale, 1e-6 * std::abs(z))) return true;
  }
  return false;
}

void scan_axis(const prop::ScatterOperator& op, const num::ComplexFn& j,
               const SearchPlan& plan, std::vector<BoundState>& out) {
  const double s = op.energy_scale();
  const double wide = 10.0 * s;
  const int side = off_cut_sign(op.dispersion());
  const int n_mag = 900;
  const double lo = 1e-9 * s;
  const double lratio = std::log(wide / lo);

  auto push_candidate = [&](cdouble z, bool cut_side) {
    if (std::fabs(z.real()) > wide) return;
    if (z.imag() <= -plan.band || z.imag() >= plan.band) return;  // bulk contour's job
    if (cut_side && z.imag() >= 0.0) return;  // embedded zeros are diagnosed elsewhere
    if (near_duplicate(out, z, s)) return;
    double dj = 0.0;
    const int mult = confirm_candidate(j, z, s, op.quadrature(), cut_side, &dj);
    if (mult <= 0) return;
    BoundState b;
    b.energy = z;
    b.multiplicity = mult;
    b.residue_scale = (mult == 1) ? dj : 0.0;
    out.push_back(b);
  };

  // exact real roots by sign scan where J is real off the continuum
  if (side != 0 && op.j_real_off_continuum()) {
    auto jr = [&op](double e) { return op.j(cdouble{e, 0.0}).real(); };
    double prev_e = 0.0;
    double prev_v = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n_mag; ++i) {
      const double mag = lo * std::exp(lratio * static_cast<double>(i) / (n_mag - 1));
      const double e = static_cast<double>(side) * mag;
      const double v = jr(e);
      if (v == 0.0) {
        push_candidate(cdouble{e, 0.0}, false);
        have_prev = false;
        continue;
      }
      if (have_prev && (v > 0.0) != (prev_v > 0.0)) {
        const double r =
            bisect_real_root(jr, std::min(prev_e, e), std::max(prev_e, e), 200);
        push_candidate(cdouble{r, 0.0}, false);
      }
      prev_e = e;
      prev_v = v;
      have_prev = true;
    }
  }

  // |J| dip scan just below the axis; Newton polishes each dip into a zero
  for (int sgn : {-1, 1}) {
    std::vector<double> xs(n_mag), vv(n_mag);
    for (int i = 0; i < n_mag; ++i) {
      xs[i] = sgn * lo * std::exp(lratio * static_cast<double>(i) / (n_mag - 1));
      vv[i] = std::abs(j(cdouble{xs[i], -plan.probe_im}));
    }
    for (int i = 1; i + 1 < n_mag; ++i) {
      if (!(vv[i] < vv[i - 1] && vv[i] <= vv[i + 1])) continue;
      const auto z = newton_free(j, cdouble{xs[i], -plan.probe_im}, s, wide, plan.band);
      if (!z.has_value()) continue;
      const bool cut_side = (side == 0) || (sgn != side);
      push_candidate(*z, cut_side);
    }
  }
}

cdouble newton_polish(const num::ComplexFn& j, cdouble z0, double scale,
                      const num::RectContour& box, double* dj_out) {
  cdouble z = z0;
  const double h = std::max(1e-7 * scale, 1e-9 * std::abs(z0));
  cdouble deriv{0.0, 0.0};
  for (int it = 0; it < 48; ++it) {
    const cdouble jz = j(z);
    deriv = (j(z + h) - j(z - h)) / (2.0 * h);
    if (deriv == cdouble{0.0, 0.0}) break;
    const cdouble step = jz / deriv;
    const cdouble znew = z - step;
    const double slack = 0.1 * scale;
    if (znew.real() < box.re_min - slack || znew.real() > box.re_max + slack ||
        znew.imag() < box.im_min - slack || znew.imag() > box.im_max + slack) {
      break;
    }
    z = znew;
    if (std::abs(step) <= 1e-13 * std::max(scale, std::abs(z))) break;
  }
  if (dj_out != nullptr) *dj_out = std::abs(deriv);
  return z;
}

// Count zeros of j in rect, retrying with slightly different split fractions
// when a zero sits on the proposed boundary.
int robust_count(const num::ComplexFn& j, const num::RectContour& rect,
                 const num::QuadratureSpec& spec) {
  return num::count_zeros(j, rect, spec);
}

void locate(const num::ComplexFn& j, const num::RectContour& rect, int count, double scale,
            const num::QuadratureSpec& spec, std::vector<BoundState>& out, int depth) {
  const double w = rect.re_max - rect.re_min;
  const double h = rect.im_max - rect.im_min;
  const double diag = std::hypot(w, h);
  const double seed_size = 0.02 * scale;
  const double floor_size = std::max(1e-7 * scale, 1e-13);

  if (count == 1 || diag <= seed_size) {
    if (count == 1 || diag <= floor_size || depth > 60) {
      double dj = 0.0;
      const cdouble z = newton_polish(j, rect.center(), scale, rect, &dj);
      // accept the polished point if a tiny contour around it recovers the
      // full count, otherwise keep hunting
      const double rad = std::max({1e-9 * scale, 2e-8 * std::abs(z), 1e-14});
      num::RectContour tiny{z.real() - rad, z.real() + rad, z.imag() - rad, z.imag() + rad};
      // strict containment: a Newton run that drifts into a neighboring
      // region must not be credited to this one
      bool ok = rect.contains(z);
      int tiny_count = 0;
      if (ok) {
        try {
          tiny_count = robust_count(j, tiny, spec);
        } catch (const ScatterError&) {
          tiny_count = -1;
        }
      }
      if (ok && tiny_count == count) {
        BoundState b;
        b.energy = z;
        b.multiplicity = count;
        b.residue_scale = (count == 1) ? dj : 0.0;
        out.push_back(b);
        return;
      }
      if (diag <= floor_size || depth > 60) {
        // unresolvable cluster: report the box center
        BoundState b;
        b.energy = rect.center();
        b.multiplicity = count;
        b.residue_scale = 0.0;
        out.push_back(b);
        return;
      }
    }
  }

  // split along the longer edge; nudge the split line off any zero
  const bool split_re = w >= h;
  const double fractions[] = {0.5, 0.513, 0.4737, 0.545, 0.4191};
  for (double f : fractions) {
    num::RectContour a = rect;
    num::RectContour b = rect;
    if (split_re) {
      const double mid = rect.re_min + f * w;
      a.re_max = mid;
      b.re_min = mid;
    } else {
      const double mid = rect.im_min + f * h;
      a.im_max = mid;
      b.im_min = mid;
    }
    int ca = 0;
    int cb = 0;
    try {
      ca = robust_count(j, a, spec);
      cb = robust_count(j, b, spec);
    } catch (const ScatterError& e) {
      if (e.code() == Errc::zero_on_contour || e.code() == Errc::non_integer_winding) {
        continue;
      }
      throw;
    }
    if (ca + cb != count) continue;  // a zero slipped through the split line
    if (ca > 0) locate(j, a, ca, scale, spec, out, depth + 1);
    if (cb > 0) locate(j, b, cb, scale, spec, out, depth + 1);
    return;
  }
  fail(Errc::zero_on_contour,
       "could not separate zeros from every candidate split line");
}

}  // namespace

BoundStateReport find_bound_states(const prop::ScatterOperator& op) {
  const double scale = op.energy_scale();
  auto j = [&op](cdouble z) { return op.j(z); };
  const double factors[] = {1.0, 1.37, 0.71, 1.93};
  ScatterError last{Errc::zero_on_contour, "bound state search never ran"};
  for (double f : factors) {
    const SearchPlan plan = make_plan(op, f);
    BoundStateReport report;
    report.searched = plan.regions;
    try {
      scan_axis(op, j, plan, report.states);
      for (const num::RectContour& rect : plan.regions) {
        const int count = robust_count(j, rect, op.quadrature());
        if (count > 0) locate(j, rect, count, scale, op.quadrature(), report.states, 0);
      }
    } catch (const ScatterError& e) {
      if (e.code() == Errc::zero_on_contour || e.code() == Errc::non_integer_winding) {
        last = e;
        continue;
      }
      throw;
    }
    std::sort(report.states.begin(), report.states.end(),
              [](const BoundState& a, const BoundState& b) {
                if (a.energy.real() != b.energy.real()) {
                  return a.energy.real() < b.energy.real();
                }
                return a.energy.imag() < b.energy.imag();
              });
    report.total_count = 0;
    for (const BoundState& b : report.states) report.total_count += b.multiplicity;
    return report;
  }
  throw last;
}

double bisect_real_root(const std::function<double(double)>& f, double lo, double hi,
                        int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    fail(Errc::bad_argument, "bisection needs a sign change on the bracket");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

int count_bound_states_real_axis(const prop::ScatterOperator& op, int grid_points) {
  if (!op.j_real_off_continuum()) {
    fail(Errc::not_applicable, "real-axis counting needs J real off the continuum");
  }
  if (grid_points < 16) fail(Errc::bad_argument, "grid too small to mean anything");
  const disp::Dispersion& dsp = op.dispersion();
  const auto* d1 = std::get_if<disp::Power1D>(&dsp);
  if (d1 != nullptr && !d1->even()) {
    fail(Errc::not_applicable,
         "odd power dispersions leave no real axis off the continuum");
  }
  const int side = (d1 != nullptr) ? -d1->sigma : -1;  // sign of the off-cut axis
  const double s = op.energy_scale();
  const double lo_mag = 1e-9 * s;
  const double hi_mag = 10.0 * s;
  auto jr = [&op](double e) { return op.j(cdouble{e, 0.0}).real(); };

  std::vector<double> es(grid_points);
  const double ratio = std::log(hi_mag / lo_mag);
  for (int i = 0; i < grid_points; ++i) {
    const double mag =
        lo_mag * std::exp(ratio * static_cast<double>(i) / (grid_points - 1));
    es[i] = static_cast<double>(side) * mag;
  }
  if (side < 0) std::reverse(es.begin(), es.end());  // increasing energies

  std::vector<double> vs(grid_points);
  double run_max = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    vs[i] = jr(es[i]);
    run_max = std::max(run_max, std::fabs(vs[i]));
  }

  int count = 0;
  int last_sign = 0;
  double last_e = es[0];
  for (int i = 0; i < grid_points; ++i) {
    if (vs[i] == 0.0) {
      ++count;  // root exactly on a node
      last_sign = 0;
      continue;
    }
    const int sgn = (vs[i] > 0.0) ? 1 : -1;
    if (last_sign != 0 && sgn != last_sign) {
      bisect_real_root(jr, last_e, es[i]);  // verifies the bracket is genuine
      ++count;
    }
    last_sign = sgn;
    last_e = es[i];
  }

  // tangency guard: a deep dip without a sign change cannot be classified
  for (int i = 1; i + 1 < grid_points; ++i) {
    const double vm = std::fabs(vs[i]);
    if (vm < std::fabs(vs[i - 1]) && vm < std::fabs(vs[i + 1]) && vm < 1e-9 * run_max &&
        vs[i] != 0.0 && (vs[i - 1] > 0.0) == (vs[i + 1] > 0.0)) {
      fail(Errc::grid_too_coarse,
           "near-tangent dip of J on the real axis: refine the grid to classify it");
    }
  }
  return count;
}

}  // namespace dscatter::spect
