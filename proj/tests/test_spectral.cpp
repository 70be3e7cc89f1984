#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <dscatter/propagators.hpp>
#include <dscatter/smatrix.hpp>
#include <dscatter/spectral.hpp>

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

disp::Dispersion quad_line() {
  disp::Power1D d;
  d.m = 2;
  return d;
}

std::vector<double> sorted_real_energies(const spect::BoundStateReport& rep) {
  std::vector<double> es;
  for (const auto& b : rep.states) es.push_back(b.energy.real());
  std::sort(es.begin(), es.end());
  return es;
}

}  // namespace

TEST_CASE("quadratic band, bare level binds exactly one state") {
  auto op = prop::make_operator(one_level(0.0), quad_line());
  const spect::BoundStateReport rep = spect::find_bound_states(*op);

  REQUIRE(rep.total_count == 1);
  REQUIRE(rep.states.size() == 1);
  const spect::BoundState& b = rep.states[0];
  CHECK(b.multiplicity == 1);
  CHECK(b.residue_scale > 0.0);
  CHECK(std::abs(b.energy.imag()) < 1e-10);
  CHECK(b.energy.real() < 0.0);
  CHECK_FALSE(rep.searched.empty());

  // the polished zero really is a zero
  CHECK(std::abs(op->j(b.energy)) < 1e-9);

  // independent location: bisection on J along the real axis
  auto f = [&](double e) { return op->j(cdouble(e, 0.0)).real(); };
  const double root = spect::bisect_real_root(f, -3.0, -0.5);
  CHECK(std::abs(b.energy.real() - root) < 1e-9);

  // gaussian coupling closed form: E = -pi e^{|E|} erfc(sqrt|E|) / sqrt|E|
  const double eb = -b.energy.real();
  CHECK(std::abs(b.energy.real() + pi * std::exp(eb) * std::erfc(std::sqrt(eb)) / std::sqrt(eb)) <
        1e-8);
  CHECK(b.energy.real() == doctest::Approx(-1.1754153274225208).epsilon(1e-10));

  CHECK(spect::count_bound_states_real_axis(*op) == 1);
}

TEST_CASE("zero coupling leaves the bare poles") {
  models::EmitterModel m;
  m.KR = Eigen::MatrixXcd::Zero(2, 2);
  m.KR(0, 0) = -1.0;
  m.KR(1, 1) = -2.0;
  m.u.resize(2);
  m.u << 1.0, 0.0;
  m.coupling.V0 = 0.0;

  auto op = prop::make_operator(m, quad_line());
  const spect::BoundStateReport rep = spect::find_bound_states(*op);

  REQUIRE(rep.total_count == 2);
  const std::vector<double> es = sorted_real_energies(rep);
  CHECK(es[0] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(es[1] == doctest::Approx(-1.0).epsilon(1e-9));
  // J = (w+1)(w+2), so |J'| = 1 at both zeros
  for (const auto& b : rep.states) {
    CHECK(b.multiplicity == 1);
    CHECK(b.residue_scale == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(spect::count_bound_states_real_axis(*op) == 2);
}

TEST_CASE("level embedded in the band blocks the determinant route") {
  // decoupled level at +0.8 sits on the continuum: J(0.8 + i0) = 0 exactly
  models::EmitterModel m;
  m.KR = Eigen::MatrixXcd::Zero(2, 2);
  m.KR(0, 0) = -2.0;
  m.KR(1, 1) = 0.8;
  m.u.resize(2);
  m.u << 1.0, 0.0;

  auto op = prop::make_operator(m, quad_line());
  CHECK(code_of([&] { smat::det_s_via_j(*op, 0.8); }) == Errc::bound_state_in_continuum);

  // away from the embedded level everything works
  const Eigen::MatrixXcd s = smat::s_matrix(*op, 2.0);
  CHECK(smat::unitarity_defect(s) < 1e-8);

  // the search regions exclude the continuum, so only the true bound state counts
  const spect::BoundStateReport rep = spect::find_bound_states(*op);
  REQUIRE(rep.total_count == 1);
  CHECK(rep.states[0].energy.real() < -2.0);
  CHECK(rep.states[0].energy.real() > -10.0);
  CHECK(spect::count_bound_states_real_axis(*op) == 1);
}

TEST_CASE("coupled pair, contour count agrees with the axis count") {
  models::EmitterModel m;
  m.KR = Eigen::MatrixXcd::Zero(2, 2);
  m.KR(0, 0) = -0.5;
  m.KR(1, 1) = -4.0;
  m.u.resize(2);
  m.u << std::sqrt(0.5), std::sqrt(0.5);

  auto op = prop::make_operator(m, quad_line());
  REQUIRE(op->j_real_off_continuum());
  const spect::BoundStateReport rep = spect::find_bound_states(*op);
  const int axis = spect::count_bound_states_real_axis(*op);
  CHECK(rep.total_count == axis);
  CHECK(rep.total_count == 2);
  for (const auto& b : rep.states) CHECK(std::abs(b.energy.imag()) < 1e-9);
}

TEST_CASE("finite band edge, binding needs enough attraction") {
  disp::Isotropic iso;
  iso.a = 2.0;
  iso.D = 3;

  // K(0^-) is finite here, so a strong enough repulsive shift empties the point spectrum
  auto repulsive = prop::make_operator(one_level(20.0), iso);
  CHECK(spect::find_bound_states(*repulsive).total_count == 0);
  CHECK(spect::count_bound_states_real_axis(*repulsive) == 0);

  // at zero detuning the attraction from the band always wins
  auto bare = prop::make_operator(one_level(0.0), iso);
  const spect::BoundStateReport rep = spect::find_bound_states(*bare);
  REQUIRE(rep.total_count == 1);
  auto f = [&](double e) { return bare->j(cdouble(e, 0.0)).real(); };
  const double root = spect::bisect_real_root(f, -6.0, -0.05);
  CHECK(std::abs(rep.states[0].energy.real() - root) < 1e-8);
  CHECK(spect::count_bound_states_real_axis(*bare) == 1);
}

TEST_CASE("axis counter applicability") {
  // odd power: the continuum covers the whole real axis
  disp::Power1D cubic;
  cubic.m = 3;
  cubic.d = 1.3;
  auto odd_op = prop::make_operator(one_level(-0.5), cubic);
  CHECK(code_of([&] { spect::count_bound_states_real_axis(*odd_op); }) == Errc::not_applicable);
  CHECK(spect::find_bound_states(*odd_op).total_count == 0);

  // dissipative model: J is not real off the continuum
  auto diss = prop::make_operator(one_level(cdouble(0.2, -0.3)), quad_line());
  CHECK_FALSE(diss->j_real_off_continuum());
  CHECK(code_of([&] { spect::count_bound_states_real_axis(*diss); }) == Errc::not_applicable);

  // too few grid points
  auto op = prop::make_operator(one_level(0.0), quad_line());
  CHECK(code_of([&] { spect::count_bound_states_real_axis(*op, 8); }) == Errc::bad_argument);
}

TEST_CASE("bisection refinement") {
  auto f = [](double x) { return x * x - 2.0; };
  CHECK(spect::bisect_real_root(f, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // exact zero on an endpoint is returned as-is
  auto g = [](double x) { return x; };
  CHECK(spect::bisect_real_root(g, 0.0, 1.0) == 0.0);
  // no sign change
  CHECK(code_of([&] { spect::bisect_real_root(f, 3.0, 4.0); }) == Errc::bad_argument);
}
