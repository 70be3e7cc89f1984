#include "dscatter/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dscatter::models {

const char* family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::lorentzian_power: return "lorentzian_power";
    case Family::polynomial_gaussian: return "polynomial_gaussian";
    case Family::tabulated: return "tabulated";
  }
  return "unknown";
}

Family family_from_name(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "lorentzian_power") return Family::lorentzian_power;
  if (s == "polynomial_gaussian") return Family::polynomial_gaussian;
  if (s == "tabulated") return Family::tabulated;
  fail(Errc::parse_error, "unknown coupling family '" + s + "'");
}

void CouplingSpec::validate() const {
  if (!(width > 0.0) || !std::isfinite(width))
    fail(Errc::bad_argument, "coupling width must be positive");
  if (family == Family::lorentzian_power && !(power > 0.0))
    fail(Errc::bad_argument, "lorentzian exponent must be positive");
  if (family == Family::tabulated) {
    if (tab_k.size() != tab_v.size() || tab_k.size() < 2)
      fail(Errc::bad_argument, "tabulated coupling needs matching k/value samples");
    if (!std::is_sorted(tab_k.begin(), tab_k.end()) || tab_k.front() != 0.0)
      fail(Errc::bad_argument, "tabulated grid must be sorted and start at k=0");
  }
}

namespace {

double shape(const CouplingSpec& s, double k) {
  switch (s.family) {
    case Family::gaussian:
      return std::exp(-k * k / (2.0 * s.width * s.width));
    case Family::lorentzian_power: {
      double q = k / s.width;
      return std::pow(1.0 + q * q, -s.power);
    }
    case Family::polynomial_gaussian: {
      double p = 1.0, kn = 1.0;
      for (double c : s.poly) {
        kn *= k;
        p += c * kn;
      }
      return p * std::exp(-k * k / (2.0 * s.width * s.width));
    }
    case Family::tabulated: {
      double q = std::fabs(k);
      if (q >= s.tab_k.back()) {
        double tail = s.tab_k.back() > 0.0 && std::isfinite(s.declared_decay2)
                          ? std::pow(q / s.tab_k.back(), 0.5 * s.declared_decay2)
                          : (std::isfinite(s.declared_decay2) ? 1.0 : 0.0);
        return s.tab_v.back() * tail;
      }
      auto it = std::upper_bound(s.tab_k.begin(), s.tab_k.end(), q);
      std::size_t j = static_cast<std::size_t>(it - s.tab_k.begin());
      double t = (q - s.tab_k[j - 1]) / (s.tab_k[j] - s.tab_k[j - 1]);
      return s.tab_v[j - 1] + t * (s.tab_v[j] - s.tab_v[j - 1]);
    }
  }
  return 0.0;
}

}  // namespace

cdouble CouplingSpec::value(double k) const { return V0 * shape(*this, k); }

double CouplingSpec::abs2(double k) const {
  double s = shape(*this, k);
  return std::norm(V0) * s * s;
}

double CouplingSpec::decay_exponent2() const {
  switch (family) {
    case Family::gaussian:
    case Family::polynomial_gaussian:
      return -inf;
    case Family::lorentzian_power:
      return -4.0 * power;
    case Family::tabulated:
      return declared_decay2;
  }
  return 0.0;
}

double CouplingSpec::support_scale() const {
  if (family == Family::tabulated && !tab_k.empty()) {
    return std::max(tab_k.back(), 1e-3);
  }
  double s = std::max(width, 1e-3);
  if (family == Family::polynomial_gaussian && !poly.empty()) {
    // high-degree prefactors push the bulk of the shape outward
    s *= 1.0 + 0.5 * static_cast<double>(poly.size());
  }
  return s;
}

cdouble coupling_value(const CouplingSpec& spec, double k) { return spec.value(k); }

void EmitterModel::validate_shape() const {
  if (u.size() < 1) fail(Errc::bad_argument, "emitter model needs at least one emitter");
  if (KR.rows() != u.size() || KR.cols() != u.size())
    fail(Errc::bad_argument, "KR must be square with the same dimension as u");
}

bool EmitterModel::hermitian(double tol) const {
  double scale = std::max(1.0, KR.norm());
  return (KR - KR.adjoint()).norm() <= tol * scale;
}

bool EmitterModel::dissipative(double tol) const {
  Eigen::MatrixXcd B = (KR - KR.adjoint()) / cdouble(0.0, 2.0);
  double scale = std::max(1.0, KR.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  return hi <= tol * scale && lo < -tol * scale;
}

void SeparableModel::validate_shape() const {
  if (g == 0.0 || !std::isfinite(g)) fail(Errc::bad_argument, "separable strength g must be nonzero");
}

Eigen::MatrixXcd u_basis(const Eigen::VectorXcd& u) {
  const int n = static_cast<int>(u.size());
  if (n < 1) fail(Errc::bad_argument, "empty vector");
  double norm = u.norm();
  if (norm < 1e-14) fail(Errc::bad_argument, "u has zero norm");
  Eigen::VectorXcd un = u / norm;
  if (n == 1) {
    Eigen::MatrixXcd out(1, 1);
    out(0, 0) = un(0);
    return out;
  }
  cdouble u0 = un(0);
  cdouble beta = (std::abs(u0) > 0.0) ? -u0 / std::abs(u0) : cdouble(-1.0, 0.0);
  Eigen::VectorXcd v = un;
  v(0) -= beta;
  double v2 = v.squaredNorm();
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(n, n) - (2.0 / v2) * (v * v.adjoint());
  // Q*un = beta*e1 and Q is a Hermitian unitary, so Q*(beta e1) = un.
  Eigen::MatrixXcd U = Q;
  U.col(0) *= beta;
  return U;
}

namespace {

void check_decay(const CouplingSpec& c, const disp::Dispersion& dsp, ValidationReport& rep) {
  double e2 = c.decay_exponent2();
  double bound;
  if (std::holds_alternative<disp::Power1D>(dsp))
    bound = static_cast<double>(std::get<disp::Power1D>(dsp).m) - 1.0;
  else {
    const auto& iso = std::get<disp::Isotropic>(dsp);
    bound = iso.a - static_cast<double>(iso.D);
  }
  rep.decay_ok = (e2 < bound) && (e2 < 0.0);
  rep.decay_verified = c.decay_verified();
  if (!rep.decay_ok)
    rep.failures.push_back("coupling tail |V|^2 ~ k^" + std::to_string(e2) +
                           " violates the ultraviolet decay condition");
}

int dark_state_count(const EmitterModel& model, double tol) {
  // dim of null(KR) intersected with the orthogonal complement of u: these
  // emitter states sit at zero energy but never couple to the waveguide.
  const int n = model.N();
  Eigen::MatrixXcd stacked(n + 1, n);
  stacked.topRows(n) = model.KR;
  stacked.bottomRows(1) = model.u.adjoint();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int count = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= tol * std::max(smax, 1.0)) ++count;
  return count;
}

}  // namespace

ValidationReport validate_model(const EmitterModel& model, const disp::Dispersion& dsp) {
  model.validate_shape();
  model.coupling.validate();
  ValidationReport rep;
  rep.u_normalized = std::fabs(model.u.norm() - 1.0) <= 1e-12;
  if (!rep.u_normalized) rep.failures.push_back("u is not normalized");
  rep.v0_nonzero = std::abs(model.coupling.value(0.0)) > 0.0;
  if (!rep.v0_nonzero) rep.failures.push_back("coupling vanishes at k=0");
  check_decay(model.coupling, dsp, rep);
  rep.model_class = model.hermitian() ? "hermitian"
                    : model.dissipative() ? "dissipative"
                                          : "neither";
  rep.dark_emitter_states = dark_state_count(model, 1e-12);
  if (model.N() > 1) {
    Eigen::MatrixXcd U = u_basis(model.u);
    Eigen::MatrixXcd M = U.adjoint() * model.KR * U;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M.block(1, 1, model.N() - 1, model.N() - 1));
    rep.kr_sub_min_sv = svd.singularValues()(svd.singularValues().size() - 1);
  }
  if (rep.v0_nonzero) {
    auto cert = detect_bright_zero_state(model);
    rep.bright_state = cert.has_value();
  }
  return rep;
}

ValidationReport validate_model(const SeparableModel& model, const disp::Dispersion& dsp) {
  model.validate_shape();
  model.form_factor.validate();
  ValidationReport rep;
  rep.u_normalized = true;
  cdouble v0 = model.form_factor.value(0.0);
  rep.v0_nonzero = std::abs(v0) > 0.0;
  if (std::abs(v0 - cdouble(1.0, 0.0)) > 1e-12)
    rep.failures.push_back("form factor must satisfy v(0) = 1");
  check_decay(model.form_factor, dsp, rep);
  rep.model_class = "hermitian";
  return rep;
}

std::optional<BrightStateCertificate> detect_bright_zero_state(const EmitterModel& model,
                                                               double rank_tol) {
  model.validate_shape();
  const int n = model.N();
  cdouble v0 = model.coupling.value(0.0);
  if (std::abs(v0) == 0.0)
    fail(Errc::zero_coupling, "bright-state certificate needs V(0) != 0");
  if (n == 1) return std::nullopt;

  Eigen::MatrixXcd U = u_basis(model.u);
  Eigen::MatrixXcd M = U.adjoint() * model.KR * U;
  Eigen::MatrixXcd sub = M.block(1, 1, n - 1, n - 1);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  // scale against the whole operator: a complement block that is pure
  // rounding noise (smax ~ eps * |KR|) must still read as rank deficient
  double thr = rank_tol * std::max({smax, model.KR.norm(), 1e-300});

  std::vector<int> null_idx;
  double kept_min = inf;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= thr)
      null_idx.push_back(i);
    else
      kept_min = std::min(kept_min, sv(i));
  }
  if (null_idx.empty()) return std::nullopt;

  // Candidates e0 = U*[0; q] for q in the null space; bright means KR*e0 != 0,
  // and by the null property KR*e0 is then parallel to u. Pick the direction
  // maximizing |<u|KR|e0>|.
  Eigen::MatrixXcd cand(n, static_cast<int>(null_idx.size()));
  for (std::size_t j = 0; j < null_idx.size(); ++j) {
    Eigen::VectorXcd emb = Eigen::VectorXcd::Zero(n);
    emb.tail(n - 1) = svd.matrixV().col(null_idx[j]);
    cand.col(static_cast<int>(j)) = U * emb;
  }
  Eigen::RowVectorXcd overlap = model.u.adjoint() * (model.KR * cand);
  int best = 0;
  for (int j = 1; j < overlap.size(); ++j)
    if (std::abs(overlap(j)) > std::abs(overlap(best))) best = j;
  double strength = std::abs(overlap(best));
  if (strength <= 1e-8 * std::max(1.0, model.KR.norm())) return std::nullopt;

  BrightStateCertificate cert;
  cert.e0 = cand.col(best);
  cert.psi0_constant = -overlap(best) / v0;
  cert.nullspace_gap = std::isfinite(kept_min) ? kept_min : 0.0;
  return cert;
}

EmitterModel construct_bright_tuned_model(int N, std::uint64_t seed) {
  if (N < 2) fail(Errc::bad_argument, "bright tuning needs at least two emitters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto cnorm = [&]() { return cdouble(gauss(rng), gauss(rng)); };

  Eigen::VectorXcd u(N);
  for (int i = 0; i < N; ++i) u(i) = cnorm();
  u.normalize();

  Eigen::MatrixXcd R(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) R(i, j) = 0.7 * cnorm();
  Eigen::MatrixXcd A = 0.5 * (R + R.adjoint());

  Eigen::MatrixXcd U = u_basis(u);
  Eigen::MatrixXcd M = U.adjoint() * A * U;

  Eigen::VectorXcd nvec(N - 1);
  for (int i = 0; i < N - 1; ++i) nvec(i) = cnorm();
  nvec.normalize();

  // Two-sided projection keeps the block Hermitian and plants the null vector.
  Eigen::MatrixXcd P =
      Eigen::MatrixXcd::Identity(N - 1, N - 1) - nvec * nvec.adjoint();
  M.block(1, 1, N - 1, N - 1) = P * M.block(1, 1, N - 1, N - 1) * P;

  cdouble c = (M.row(0).segment(1, N - 1) * nvec)(0);
  if (std::abs(c) < 0.25) {
    for (int j = 0; j < N - 1; ++j) {
      M(0, 1 + j) += 0.5 * std::conj(nvec(j));
      M(1 + j, 0) += 0.5 * nvec(j);
    }
  }

  EmitterModel model;
  model.KR = U * M * U.adjoint();
  model.u = u;
  model.coupling = CouplingSpec{};
  return model;
}

}  // namespace dscatter::models
