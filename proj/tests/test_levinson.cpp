#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>

#include <dscatter/levinson.hpp>
#include <dscatter/propagators.hpp>

#include "helpers.hpp"

using namespace dscatter;
using testutil::code_of;

namespace {

models::EmitterModel one_level(cdouble kr, cdouble v0 = {1.0, 0.0}, double width = 1.0) {
  models::EmitterModel m;
  m.KR.resize(1, 1);
  m.KR(0, 0) = kr;
  m.u.resize(1);
  m.u(0) = 1.0;
  m.coupling.V0 = v0;
  m.coupling.width = width;
  return m;
}

disp::Dispersion line(int m, double d = 1.0, int sigma = 1) {
  disp::Power1D dsp;
  dsp.m = m;
  dsp.d = d;
  dsp.sigma = sigma;
  return dsp;
}

disp::Dispersion iso(double a, int D) {
  disp::Isotropic dsp;
  dsp.a = a;
  dsp.D = D;
  return dsp;
}

}  // namespace

TEST_CASE("threshold anomaly per dispersion class") {
  CHECK(lev::winding_anomaly(line(2)) == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(lev::winding_anomaly(line(3)) == doctest::Approx(2.0 * pi / 3).epsilon(1e-14));
  CHECK(lev::winding_anomaly(line(6)) == doctest::Approx(5.0 * pi / 6).epsilon(1e-14));
  CHECK(lev::winding_anomaly(line(1)) == 0.0);
  CHECK(lev::winding_anomaly(iso(4.0, 3)) == doctest::Approx(pi / 4).epsilon(1e-14));
  CHECK(lev::winding_anomaly(iso(2.0, 1)) == doctest::Approx(pi / 2).epsilon(1e-14));
  // at or below the marginal power the level integral stays finite: no anomaly
  CHECK(lev::winding_anomaly(iso(2.0, 3)) == 0.0);
  CHECK(lev::winding_anomaly(iso(3.0, 3)) == 0.0);
}

TEST_CASE("quadratic band worked example: one emitter, one bound state") {
  auto op = prop::make_operator(one_level(0.0), line(2));
  const lev::WindingReport r = lev::levinson_check(*op);

  CHECK(r.pass);
  CHECK(r.n_emitters == 1);
  CHECK(r.n_bound == 1);
  CHECK(r.bound_states.size() == 1);
  CHECK(r.predicted == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(r.anomaly == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(std::abs(r.residual) < 0.01);
  CHECK(r.delta_total == doctest::Approx(pi / 2).epsilon(0.01));
  CHECK(r.measured == 2.0 * r.delta_total);
  CHECK(r.tail_bound < 0.05);

  REQUIRE(r.branches.size() == 1);
  const lev::BranchTrace& tr = r.branches[0];
  CHECK(tr.edge_sign == 1);
  CHECK(tr.has_universal);
  CHECK(tr.universal_gap < 0.02);
  // swap limit: det of the zero-energy S-matrix is -1
  CHECK(std::abs(tr.universal_det - cdouble(-1.0, 0.0)) < 1e-12);
  REQUIRE(tr.energies.size() == tr.det_values.size());
  REQUIRE(tr.energies.size() >= 2);
  // far to near ordering
  CHECK(std::abs(tr.energies.front()) > std::abs(tr.energies.back()));
  CHECK(tr.det_near == tr.det_values.back());
  // hermitian model: the determinant stays on the unit circle
  for (const cdouble& z : tr.det_values) CHECK(std::abs(std::abs(z) - 1.0) < 1e-8);

  // same sweep against an unreachable tolerance must fail the verdict
  lev::SweepOptions tight;
  tight.tol = 1e-12;
  CHECK_FALSE(lev::levinson_check(*op, tight).pass);
}

TEST_CASE("free theory has no phase to count") {
  CHECK(code_of([&] {
          auto op = prop::make_operator(one_level(-1.0, 0.0), line(2));
          lev::levinson_check(*op);
        }) == Errc::not_applicable);
}

TEST_CASE("dissipative pair on a sextic band") {
  models::EmitterModel m;
  m.KR.resize(2, 2);
  m.KR << 0.5, 0.2, 0.2, -0.3;
  Eigen::VectorXcd w(2);
  w << 0.6, 0.8;
  m.KR += cdouble(0.0, -0.4) * (w * w.adjoint());
  m.u.resize(2);
  m.u << std::sqrt(0.5), std::sqrt(0.5);
  REQUIRE(m.dissipative());

  auto op = prop::make_operator(m, line(6));
  const lev::WindingReport r = lev::levinson_check(*op);

  CHECK(r.pass);
  CHECK(std::abs(r.residual) < 0.05);
  CHECK(r.anomaly == doctest::Approx(5.0 * pi / 6).epsilon(1e-14));
  CHECK(r.predicted == doctest::Approx(pi * (2 - r.n_bound) + 5.0 * pi / 6).epsilon(1e-12));
  REQUIRE(r.branches.size() == 1);
  // no gain: |det S| <= 1 along the whole branch
  for (const cdouble& z : r.branches[0].det_values) CHECK(std::abs(z) <= 1.0 + 1e-8);
}

TEST_CASE("decoupled level shifts N and N_B together") {
  auto base = prop::make_operator(one_level(0.3), line(2));
  const lev::WindingReport r1 = lev::levinson_check(*base);

  models::EmitterModel ext;
  ext.KR = Eigen::MatrixXcd::Zero(2, 2);
  ext.KR(0, 0) = 0.3;
  ext.KR(1, 1) = -2.5;
  ext.u.resize(2);
  ext.u << 1.0, 0.0;
  auto extended = prop::make_operator(ext, line(2));
  const lev::WindingReport r2 = lev::levinson_check(*extended);

  CHECK(r1.pass);
  CHECK(r2.pass);
  CHECK(r1.n_bound == 1);
  CHECK(r2.n_bound == 2);
  CHECK(r1.predicted == r2.predicted);
  // det S is identical, the real factor (E + 2.5) cancels in the boundary ratio
  CHECK(std::abs(r1.delta_total - r2.delta_total) < 5e-3);
}

TEST_CASE("odd band walks both continuum edges") {
  auto op = prop::make_operator(one_level(0.0), line(3));
  const lev::WindingReport r = lev::levinson_check(*op);

  REQUIRE(r.branches.size() == 2);
  std::set<int> edges;
  for (const auto& tr : r.branches) {
    edges.insert(tr.edge_sign);
    CHECK(tr.has_universal);
    CHECK(tr.universal_gap < 0.05);
  }
  CHECK(edges == std::set<int>{-1, 1});

  CHECK(r.pass);
  CHECK(r.n_bound == 0);
  CHECK(r.anomaly == doctest::Approx(2.0 * pi / 3).epsilon(1e-14));
  CHECK(r.delta_total == doctest::Approx(pi + 2.0 * pi / 3).epsilon(0.03));
}

TEST_CASE("separable attraction counts its own bound state") {
  models::SeparableModel m;
  m.g = -2.0;
  auto op = prop::make_operator(m, line(2));
  const lev::WindingReport r = lev::levinson_check(*op);

  CHECK(r.pass);
  CHECK(r.n_emitters == 0);
  CHECK(r.n_bound == 1);
  CHECK(r.predicted == doctest::Approx(-pi / 2).epsilon(1e-12));
  CHECK(r.delta_total == doctest::Approx(-pi / 2).epsilon(0.02));
}
