#include <dscatter/runner.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include <dscatter/levinson.hpp>
#include <dscatter/smatrix.hpp>
#include <dscatter/spectral.hpp>

namespace dscatter::run {

namespace {

using nlohmann::json;

int env_threads() {
  const char* s = std::getenv("DSCATTER_THREADS");
  if (s == nullptr) return 1;
  const int n = std::atoi(s);
  return (n >= 1) ? n : 1;
}

// index-addressed parallel map; output slots keep results deterministic
void parallel_for(int n, const std::function<void(int)>& fn) {
  const int threads = std::min(env_threads(), n > 0 ? n : 1);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) fail(Errc::validation_error, "cannot open output file: " + path.string());
    write_row_strings(header);
  }

  void write_row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i != 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void write_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double c : cells) s.push_back(fmt(c));
    write_row_strings(s);
  }

 private:
  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::validation_error, "cannot open output file: " + path.string());
  out << j.dump(2) << '\n';
}

std::unique_ptr<prop::ScatterOperator> build_operator(const cfg::RunConfig& config) {
  return std::visit(
      [&](const auto& m) {
        return prop::make_operator(m, config.dispersion, config.quadrature);
      },
      config.model);
}

lev::SweepOptions effective_sweep(const cfg::RunConfig& config, const CliOverrides& ov,
                                  double scale) {
  lev::SweepOptions s = config.sweep;
  if (ov.e_min) s.e_min_frac = *ov.e_min / scale;
  if (ov.e_max) s.e_max_frac = *ov.e_max / scale;
  if (ov.points) s.points = *ov.points;
  if (ov.tol_lev) s.tol = *ov.tol_lev;
  if (!(s.e_min_frac > 0.0) || !(s.e_max_frac > s.e_min_frac)) {
    fail(Errc::bad_argument, "sweep range must satisfy 0 < e_min < e_max");
  }
  if (s.points < 8) fail(Errc::bad_argument, "sweep needs at least 8 points");
  if (!(s.tol > 0.0)) fail(Errc::bad_argument, "tolerance must be positive");
  return s;
}

std::vector<int> continuum_edges(const disp::Dispersion& dsp) {
  if (const auto* d1 = std::get_if<disp::Power1D>(&dsp)) {
    if (d1->even()) return {d1->sigma};
    return {1, -1};
  }
  return {1};
}

json base_summary(const std::string& task, const cfg::RunConfig& config) {
  json j;
  j["task"] = task;
  j["tool_version"] = "dscatter 1.0.0";
  j["config_hash"] = hash_hex(config.hash);
  return j;
}

struct SweepRow {
  double energy = 0.0;
  cdouble j_above, j_below, det;
  int channels = 0;
  cdouble s[2][2];
  double defect = 0.0;       // || S S^dag - 1 ||
  double route_defect = 0.0; // |det(S matrix) - J ratio|
  double phase = 0.0;        // unwrapped arg det S, continuous per branch
};

int task_sweep(const cfg::RunConfig& config, const std::filesystem::path& out,
               const CliOverrides& ov) {
  auto op = build_operator(config);
  const lev::SweepOptions sw = effective_sweep(config, ov, op->energy_scale());

  std::vector<double> grid = config.energies;
  if (grid.empty()) {
    const double lo = sw.e_min_frac * op->energy_scale();
    const double hi = sw.e_max_frac * op->energy_scale();
    const double lr = std::log(hi / lo);
    for (int edge : continuum_edges(op->dispersion())) {
      for (int i = 0; i < sw.points; ++i) {
        const double mag = lo * std::exp(lr * static_cast<double>(i) / (sw.points - 1));
        grid.push_back(static_cast<double>(edge) * mag);
      }
    }
    std::sort(grid.begin(), grid.end());
  }

  std::vector<SweepRow> rows(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    SweepRow& r = rows[i];
    r.energy = grid[i];
    const auto [above, below] = op->j_boundary_pair(r.energy);
    r.j_above = above;
    r.j_below = below;
    if (above == cdouble{0.0, 0.0}) {
      fail(Errc::bound_state_in_continuum, "J(E + i0) = 0 on the sweep grid");
    }
    r.det = below / above;
    const Eigen::MatrixXcd s = smat::s_matrix(*op, r.energy);
    r.channels = static_cast<int>(s.rows());
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        r.s[a][b] = (a < s.rows() && b < s.cols()) ? s(a, b) : cdouble{0.0, 0.0};
      }
    }
    r.defect = smat::unitarity_defect(s);
    r.route_defect = std::abs(s.determinant() - r.det);
  });

  // continuous phase per branch, traversed with increasing E (rows are sorted)
  std::size_t lo_row = 0;
  while (lo_row < rows.size()) {
    std::size_t hi_row = lo_row + 1;
    while (hi_row < rows.size() &&
           std::signbit(rows[hi_row].energy) == std::signbit(rows[lo_row].energy)) {
      ++hi_row;
    }
    double phi = principal_arg(rows[lo_row].det);
    rows[lo_row].phase = phi;
    for (std::size_t i = lo_row + 1; i < hi_row; ++i) {
      phi += principal_arg(rows[i].det / rows[i - 1].det);
      rows[i].phase = phi;
    }
    lo_row = hi_row;
  }

  CsvWriter csv(out / "sweep.csv",
                {"energy", "det_re", "det_im", "det_abs", "phase_unwrapped", "route_defect",
                 "unitarity_defect", "channels", "s11_re", "s11_im", "s12_re", "s12_im",
                 "s21_re", "s21_im", "s22_re", "s22_im", "j_above_re", "j_above_im",
                 "j_below_re", "j_below_im"});
  double max_defect = 0.0, max_route = 0.0;
  for (const SweepRow& r : rows) {
    max_defect = std::max(max_defect, r.defect);
    max_route = std::max(max_route, r.route_defect);
    csv.write_row({r.energy, r.det.real(), r.det.imag(), std::abs(r.det), r.phase,
                   r.route_defect, r.defect, static_cast<double>(r.channels),
                   r.s[0][0].real(), r.s[0][0].imag(), r.s[0][1].real(), r.s[0][1].imag(),
                   r.s[1][0].real(), r.s[1][0].imag(), r.s[1][1].real(), r.s[1][1].imag(),
                   r.j_above.real(), r.j_above.imag(), r.j_below.real(), r.j_below.imag()});
  }

  json j = base_summary("sweep", config);
  j["rows"] = rows.size();
  j["max_unitarity_defect"] = max_defect;
  j["max_route_defect"] = max_route;
  write_json(out / "summary.json", j);
  std::printf("sweep: %zu rows, max unitarity defect %.3e, max route defect %.3e\n",
              rows.size(), max_defect, max_route);
  return 0;
}

int task_universal(const cfg::RunConfig& config, const std::filesystem::path& out,
                   const CliOverrides& ov) {
  auto op = build_operator(config);
  const lev::SweepOptions sw = effective_sweep(config, ov, op->energy_scale());
  const double tol = ov.tol_lev ? *ov.tol_lev : 0.05;

  // linear 1D bands carry no universal limit; that is a result, not an error
  if (const auto* d1 = std::get_if<disp::Power1D>(&op->dispersion());
      d1 != nullptr && !d1->universal_candidate()) {
    json summary = base_summary("universal", config);
    summary["universal"] = false;
    summary["code"] = errc_name(Errc::non_universal);
    summary["note"] = "linear dispersion: the zero-energy S-matrix depends on the coupling";
    write_json(out / "summary.json", summary);
    std::printf("universal: NonUniversal (linear dispersion has no universal limit)\n");
    return 0;
  }

  CsvWriter csv(out / "universal.csv",
                {"edge", "row", "col", "predicted_re", "predicted_im", "measured_re",
                 "measured_im", "abs_gap"});
  json summary = base_summary("universal", config);
  json edges = json::array();
  double worst = 0.0;
  for (int edge : continuum_edges(op->dispersion())) {
    const Eigen::MatrixXcd pred = smat::universal_limit(op->dispersion(), edge);
    const double e = static_cast<double>(edge) * sw.e_min_frac * op->energy_scale();
    const Eigen::MatrixXcd meas = smat::s_matrix(*op, e);
    if (meas.rows() != pred.rows()) {
      fail(Errc::validation_error, "channel count mismatch against the zero-energy limit");
    }
    double gap = 0.0;
    for (int r = 0; r < pred.rows(); ++r) {
      for (int c = 0; c < pred.cols(); ++c) {
        const double g = std::abs(meas(r, c) - pred(r, c));
        gap = std::max(gap, g);
        csv.write_row_strings({std::to_string(edge), std::to_string(r), std::to_string(c),
                               fmt(pred(r, c).real()), fmt(pred(r, c).imag()),
                               fmt(meas(r, c).real()), fmt(meas(r, c).imag()), fmt(g)});
      }
    }
    json je;
    je["edge"] = edge;
    je["probe_energy"] = e;
    je["max_entry_gap"] = gap;
    edges.push_back(je);
    worst = std::max(worst, gap);
  }
  summary["universal"] = true;
  summary["edges"] = edges;
  summary["tolerance"] = tol;
  summary["max_gap"] = worst;
  const bool pass = worst <= tol;
  summary["pass"] = pass;
  write_json(out / "summary.json", summary);
  std::printf("universal: max gap %.3e against tolerance %.3e -> %s\n", worst, tol,
              pass ? "pass" : "FAIL");
  return pass ? 0 : 2;
}

int task_bound_states(const cfg::RunConfig& config, const std::filesystem::path& out) {
  auto op = build_operator(config);
  const spect::BoundStateReport report = spect::find_bound_states(*op);

  CsvWriter csv(out / "bound_states.csv",
                {"energy_re", "energy_im", "multiplicity", "residue_scale"});
  for (const spect::BoundState& b : report.states) {
    csv.write_row({b.energy.real(), b.energy.imag(),
                   static_cast<double>(b.multiplicity), b.residue_scale});
  }

  json summary = base_summary("bound-states", config);
  summary["count"] = report.total_count;
  bool consistent = true;
  if (op->j_real_off_continuum()) {
    try {
      const int axis_count = spect::count_bound_states_real_axis(*op);
      summary["real_axis_count"] = axis_count;
      consistent = (axis_count == report.total_count);
    } catch (const ScatterError& e) {
      if (e.code() != Errc::not_applicable) throw;
      summary["real_axis_count"] = nullptr;
    }
  } else {
    summary["real_axis_count"] = nullptr;
  }
  summary["consistent"] = consistent;
  write_json(out / "summary.json", summary);
  std::printf("bound states: %d found%s\n", report.total_count,
              consistent ? "" : ", real-axis cross-check DISAGREES");
  return consistent ? 0 : 2;
}

int task_levinson(const cfg::RunConfig& config, const std::filesystem::path& out,
                  const CliOverrides& ov) {
  auto op = build_operator(config);
  const lev::SweepOptions sw = effective_sweep(config, ov, op->energy_scale());
  const lev::WindingReport report = lev::levinson_check(*op, sw);

  CsvWriter csv(out / "levinson.csv", {"edge", "energy", "det_re", "det_im"});
  for (const lev::BranchTrace& tr : report.branches) {
    for (std::size_t i = 0; i < tr.energies.size(); ++i) {
      csv.write_row({static_cast<double>(tr.edge_sign), tr.energies[i],
                     tr.det_values[i].real(), tr.det_values[i].imag()});
    }
  }

  json summary = base_summary("levinson", config);
  summary["measured_winding"] = report.measured;
  summary["delta_total"] = report.delta_total;
  summary["predicted_delta"] = report.predicted;
  summary["residual"] = report.residual;
  summary["tail_bound"] = report.tail_bound;
  summary["threshold_anomaly"] = report.anomaly;
  summary["emitters"] = report.n_emitters;
  summary["bound_states"] = report.n_bound;
  summary["tolerance"] = sw.tol;
  json branches = json::array();
  for (const lev::BranchTrace& tr : report.branches) {
    json jb;
    jb["edge"] = tr.edge_sign;
    jb["winding"] = tr.winding;
    jb["tail_phase"] = tr.tail_phase;
    jb["det_near"] = {tr.det_near.real(), tr.det_near.imag()};
    if (tr.has_universal) {
      jb["universal_det"] = {tr.universal_det.real(), tr.universal_det.imag()};
      jb["universal_gap"] = tr.universal_gap;
    }
    branches.push_back(jb);
  }
  summary["branches"] = branches;
  summary["pass"] = report.pass;
  write_json(out / "summary.json", summary);
  std::printf("levinson: delta %.6f predicted %.6f residual %.2e -> %s\n",
              report.delta_total, report.predicted, report.residual,
              report.pass ? "pass" : "FAIL");
  return report.pass ? 0 : 2;
}

int task_validate(const cfg::RunConfig& config, const std::filesystem::path& out) {
  const models::ValidationReport report = std::visit(
      [&](const auto& m) { return models::validate_model(m, config.dispersion); },
      config.model);

  json summary = base_summary("validate", config);
  summary["u_normalized"] = report.u_normalized;
  summary["v0_nonzero"] = report.v0_nonzero;
  summary["decay_ok"] = report.decay_ok;
  summary["decay_verified"] = report.decay_verified;
  summary["model_class"] = report.model_class;
  summary["kr_sub_min_sv"] = report.kr_sub_min_sv;
  summary["dark_emitter_states"] = report.dark_emitter_states;
  summary["failures"] = report.failures;
  summary["bright_zero_state"] = nullptr;
  if (report.bright_state) {
    const auto* em = std::get_if<models::EmitterModel>(&config.model);
    std::optional<models::BrightStateCertificate> cert;
    if (em != nullptr) cert = models::detect_bright_zero_state(*em);
    if (cert) {
      json jb;
      jb["psi0_constant"] = {cert->psi0_constant.real(), cert->psi0_constant.imag()};
      jb["nullspace_gap"] = cert->nullspace_gap;
      json e0 = json::array();
      for (Eigen::Index i = 0; i < cert->e0.size(); ++i) {
        e0.push_back({cert->e0(i).real(), cert->e0(i).imag()});
      }
      jb["e0"] = e0;
      summary["bright_zero_state"] = jb;
    }
  }
  const bool pass = report.pass();
  summary["pass"] = pass;
  write_json(out / "summary.json", summary);
  std::printf("validate: %s\n", pass ? "pass" : "FAIL");
  return pass ? 0 : 2;
}

}  // namespace

int run_task(const std::string& task, const cfg::RunConfig& config,
             const std::string& out_dir, const CliOverrides& overrides) {
  const std::filesystem::path out(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) fail(Errc::validation_error, "cannot create output directory: " + out.string());

  if (task == "sweep") return task_sweep(config, out, overrides);
  if (task == "universal") return task_universal(config, out, overrides);
  if (task == "bound-states") return task_bound_states(config, out);
  if (task == "levinson") return task_levinson(config, out, overrides);
  if (task == "validate") return task_validate(config, out);
  fail(Errc::bad_argument, "unknown task: " + task);
}

}  // namespace dscatter::run
