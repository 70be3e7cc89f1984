#include <dscatter/levinson.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include <dscatter/smatrix.hpp>

namespace dscatter::lev {

namespace {

std::vector<int> branch_edges(const disp::Dispersion& dsp) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    if (d1->even()) return {d1->sigma};
    return {1, -1};
  }
  return {1};
}

bool has_universal_limit(const disp::Dispersion& dsp) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) return d1->m >= 2;
  return true;
}

cdouble universal_det(const disp::Dispersion& dsp, int edge) {
  const Eigen::MatrixXcd s = smat::universal_limit(dsp, edge);
  return s.determinant();
}

}  // namespace

double winding_anomaly(const disp::Dispersion& dsp) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    const double mm = static_cast<double>(d1->m);
    return pi * (mm - 1.0) / mm;
  }
  const disp::Isotropic& d = std::get<disp::Isotropic>(dsp);
  const double dd = static_cast<double>(d.D);
  if (d.a > dd) return pi * (d.a - dd) / d.a;
  return 0.0;
}

BranchTrace trace_branch(const prop::ScatterOperator& op, int edge_sign,
                         const SweepOptions& opt) {
  if (opt.points < 8) fail(Errc::bad_argument, "sweep needs at least 8 points");
  if (!(opt.e_min_frac > 0.0) || !(opt.e_max_frac > opt.e_min_frac)) {
    fail(Errc::bad_argument, "sweep range must satisfy 0 < e_min < e_max");
  }
  const double s = op.energy_scale();
  const double lo = opt.e_min_frac * s;
  const double hi = opt.e_max_frac * s;
  if (lo < 1e-300) fail(Errc::bad_argument, "sweep floor underflows doubles");

  // magnitude -> boundary data, kept sorted descending (far to near)
  struct Sample {
    cdouble det, above, below;
  };
  std::map<double, Sample, std::greater<double>> samples;
  auto eval = [&](double mag) {
    const double e = static_cast<double>(edge_sign) * mag;
    const auto [above, below] = op.j_boundary_pair(e);
    if (above == cdouble{0.0, 0.0}) {
      fail(Errc::bound_state_in_continuum, "J(E + i0) = 0: embedded eigenvalue at this energy");
    }
    const cdouble det = below / above;
    if (std::abs(det) < 1e-300) {
      fail(Errc::zero_det_s, "det S vanished on the sweep grid; winding undefined");
    }
    samples.emplace(mag, Sample{det, above, below});
  };

  const double lr = std::log(hi / lo);
  for (int i = 0; i < opt.points; ++i) {
    eval(hi * std::exp(-lr * static_cast<double>(i) / (opt.points - 1)));
  }

  // |det S| = 1, so a full 2pi swing can hide inside one interval with the
  // endpoints giving no sign of it. J can't pull that off: the swing comes
  // from J passing close to a zero just off the axis, which makes J itself
  // move by order one. Splitting until J is slowly varying ties the local
  // spacing to the distance from that zero and the swing gets resolved.
  auto rough = [](const cdouble& a, const cdouble& b) {
    return std::abs(b - a) > std::min(std::abs(a), std::abs(b));
  };

  for (int round = 0;; ++round) {
    std::vector<double> want;
    auto it = samples.begin();
    auto prev = it++;
    for (; it != samples.end(); ++it, ++prev) {
      const double step = principal_arg(it->second.det / prev->second.det);
      if (std::fabs(step) >= opt.max_step ||
          rough(prev->second.above, it->second.above) ||
          rough(prev->second.below, it->second.below)) {
        want.push_back(std::sqrt(it->first * prev->first));
      }
    }
    if (want.empty()) break;
    if (round >= opt.max_refine_rounds) {
      fail(Errc::grid_too_coarse,
           "argument steps of det S stay too large after refinement");
    }
    for (double mag : want) {
      if (samples.count(mag) != 0) {
        fail(Errc::grid_too_coarse, "refinement hit the resolution floor");
      }
      eval(mag);
    }
  }

  BranchTrace tr;
  tr.edge_sign = edge_sign;
  tr.energies.reserve(samples.size());
  tr.det_values.reserve(samples.size());
  for (const auto& [mag, smp] : samples) {
    tr.energies.push_back(static_cast<double>(edge_sign) * mag);
    tr.det_values.push_back(smp.det);
  }

  // unwrap far to near; the far seed is the anchor to det S(infinity) = 1
  double phi = principal_arg(tr.det_values.front());
  tr.tail_phase = phi;
  const double phi_far = phi;
  for (std::size_t i = 1; i < tr.det_values.size(); ++i) {
    phi += principal_arg(tr.det_values[i] / tr.det_values[i - 1]);
  }
  const double phi_near = phi;
  tr.winding = (edge_sign > 0) ? (phi_far - phi_near) : (phi_near - phi_far);

  tr.det_near = tr.det_values.back();
  tr.has_universal = has_universal_limit(op.dispersion());
  if (tr.has_universal) {
    tr.universal_det = universal_det(op.dispersion(), edge_sign);
    tr.universal_gap = std::abs(tr.det_near - tr.universal_det);
  }
  return tr;
}

WindingReport levinson_check(const prop::ScatterOperator& op, const SweepOptions& opt) {
  // free theory: det S = 1 identically and the phase-shift count is vacuous
  if (const auto* em = dynamic_cast<const prop::EmitterOperator*>(&op)) {
    if (std::abs(em->model().coupling.V0) == 0.0) {
      fail(Errc::not_applicable, "zero coupling: det S = 1 identically, nothing to verify");
    }
  } else if (const auto* sep = dynamic_cast<const prop::SeparableOperator*>(&op)) {
    if (std::abs(sep->model().form_factor.V0) == 0.0) {
      fail(Errc::not_applicable, "zero form factor: det S = 1 identically, nothing to verify");
    }
  }
  WindingReport report;
  report.n_emitters = op.emitter_count();
  report.anomaly = winding_anomaly(op.dispersion());

  const spect::BoundStateReport bs = spect::find_bound_states(op);
  report.bound_states = bs.states;
  report.n_bound = bs.total_count;

  for (int edge : branch_edges(op.dispersion())) {
    report.branches.push_back(trace_branch(op, edge, opt));
  }
  for (const BranchTrace& tr : report.branches) {
    report.measured += tr.winding;
    report.tail_bound += std::fabs(tr.tail_phase);
  }
  report.delta_total = 0.5 * report.measured;
  report.predicted =
      pi * static_cast<double>(report.n_emitters - report.n_bound) + report.anomaly;
  report.residual = report.delta_total - report.predicted;
  report.pass = std::fabs(report.residual) <= opt.tol;
  return report;
}

}  // namespace dscatter::lev
