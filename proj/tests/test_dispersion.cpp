#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include <dscatter/dispersion.hpp>

#include "helpers.hpp"

using namespace dscatter;
using testutil::code_of;

namespace {

// Invert a monotone function on [lo, hi] by bisection; used to build a
// density-of-states oracle that only ever calls energy().
double invert(const std::function<double(double)>& f, double target, double lo, double hi) {
  double flo = f(lo) - target;
  REQUIRE(((flo <= 0.0) != (f(hi) - target <= 0.0)));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if ((f(mid) - target <= 0.0) == (flo <= 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("band energies and derivatives") {
  CHECK(disp::energy(disp::Power1D{1, 1.0, 2}, -2.0) == 4.0);
  CHECK(disp::energy(disp::Power1D{-1, 1.0, 3}, 2.0) == -8.0);
  CHECK(disp::energy(disp::Power1D{1, 2.5, 2}, 2.0) == 10.0);
  CHECK(disp::energy(disp::Isotropic{4.0, 3}, 1.0) == 1.0);
  CHECK(disp::energy(disp::Isotropic{4.0, 3}, -2.0) == 16.0);

  CHECK(disp::energy_derivative(disp::Power1D{1, 1.0, 2}, 3.0) == 6.0);
  CHECK(disp::energy_derivative(disp::Power1D{-1, 1.0, 3}, 2.0) == -12.0);
  CHECK(disp::radial_energy_derivative(disp::Isotropic{3.0, 2}, 2.0) ==
        doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("continuum intervals per dispersion class") {
  auto even_up = disp::continuum(disp::Power1D{1, 1.0, 2});
  REQUIRE(even_up.intervals.size() == 1);
  CHECK(even_up.contains(1.0));
  CHECK(!even_up.contains(-1.0));
  CHECK(!even_up.contains(0.0));  // band edge excluded

  auto even_down = disp::continuum(disp::Power1D{-1, 1.0, 4});
  CHECK(even_down.contains(-3.0));
  CHECK(!even_down.contains(3.0));

  auto odd = disp::continuum(disp::Power1D{1, 1.0, 3});
  REQUIRE(odd.intervals.size() == 2);
  CHECK(odd.contains(-1.0));
  CHECK(odd.contains(1.0));
  CHECK(!odd.contains(0.0));

  auto iso = disp::continuum(disp::Isotropic{2.0, 3});
  CHECK(iso.contains(0.5));
  CHECK(!iso.contains(-0.5));
}

TEST_CASE("degenerate momenta") {
  auto even = disp::degenerate_momenta(disp::Power1D{1, 1.0, 2}, 4.0);
  REQUIRE(even.size() == 2);
  CHECK(even[0] == doctest::Approx(2.0));
  CHECK(even[1] == doctest::Approx(-2.0));

  auto odd = disp::degenerate_momenta(disp::Power1D{1, 1.0, 3}, -8.0);
  REQUIRE(odd.size() == 1);
  CHECK(odd[0] == doctest::Approx(-2.0));

  // sigma = -1 flips which momentum sign carries the energy sign
  auto odd_flip = disp::degenerate_momenta(disp::Power1D{-1, 1.0, 3}, -8.0);
  REQUIRE(odd_flip.size() == 1);
  CHECK(odd_flip[0] == doctest::Approx(2.0));

  CHECK(code_of([] { disp::degenerate_momenta(disp::Power1D{1, 1.0, 2}, -1.0); }) ==
        Errc::outside_continuum);

  CHECK(disp::radial_momentum(disp::Isotropic{2.0, 3}, 4.0) == doctest::Approx(2.0));
  CHECK(code_of([] { disp::radial_momentum(disp::Isotropic{2.0, 3}, -1.0); }) ==
        Errc::outside_continuum);
}

TEST_CASE("energy of each degenerate momentum returns the input energy") {
  for (int m = 2; m <= 6; ++m) {
    for (int sigma : {1, -1}) {
      const disp::Power1D dsp{sigma, 1.7, m};
      const auto spec = disp::continuum(dsp);
      for (double mag : {1e-3, 0.3, 5.0, 2e3}) {
        for (double E : {mag, -mag}) {
          if (!spec.contains(E)) continue;
          for (double k : disp::degenerate_momenta(dsp, E)) {
            CHECK(disp::energy(dsp, k) == doctest::Approx(E).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("density of states closed forms") {
  CHECK(disp::density_of_states(disp::Power1D{1, 1.0, 2}, 4.0) == doctest::Approx(0.5));
  CHECK(disp::density_of_states(disp::Power1D{1, 1.0, 3}, -8.0) ==
        doctest::Approx(1.0 / 6.0));
  CHECK(disp::density_of_states(disp::Isotropic{2.0, 3}, 1.0) ==
        doctest::Approx(2.0 * pi));
  CHECK(disp::density_of_states(disp::Isotropic{4.0, 3}, 16.0) ==
        doctest::Approx(0.5 * pi));

  // divergent threshold vs plain out-of-band
  CHECK(code_of([] { disp::density_of_states(disp::Power1D{1, 1.0, 2}, 0.0); }) ==
        Errc::threshold_divergence);
  CHECK(code_of([] { disp::density_of_states(disp::Power1D{1, 1.0, 1}, 0.0); }) ==
        Errc::outside_continuum);
  CHECK(code_of([] { disp::density_of_states(disp::Power1D{1, 1.0, 2}, -1.0); }) ==
        Errc::outside_continuum);
  CHECK(code_of([] { disp::density_of_states(disp::Isotropic{4.0, 3}, 0.0); }) ==
        Errc::threshold_divergence);
  CHECK(code_of([] { disp::density_of_states(disp::Isotropic{2.0, 3}, 0.0); }) ==
        Errc::outside_continuum);
}

TEST_CASE("density of states against a bisection oracle") {
  // rho from first principles: invert energy() by bisection, differentiate
  // the inverse numerically, count momentum branches. Never touches the
  // closed-form expression under test.
  const double h = 1e-5;
  for (int m : {2, 3, 4}) {
    const disp::Power1D dsp{1, 1.3, m};
    auto e_of_k = [&dsp](double k) { return disp::energy(dsp, k); };
    for (double E : {0.1, 1.0, 10.0}) {
      const double kp = invert(e_of_k, E + h, 0.0, 50.0);
      const double km = invert(e_of_k, E - h, 0.0, 50.0);
      const double oracle = 2.0 * (kp - km) / (2.0 * h);  // both branches
      CHECK(disp::density_of_states(dsp, E) == doctest::Approx(oracle).epsilon(1e-4));
    }
  }
  for (double a : {2.0, 4.0}) {
    const disp::Isotropic dsp{a, 3};
    auto e_of_k = [&dsp](double k) { return disp::energy(dsp, k); };
    for (double E : {0.1, 1.0, 10.0}) {
      const double kp = invert(e_of_k, E + h, 0.0, 50.0);
      const double km = invert(e_of_k, E - h, 0.0, 50.0);
      const double k0 = 0.5 * (kp + km);
      const double oracle = 4.0 * pi * k0 * k0 * (kp - km) / (2.0 * h);
      CHECK(disp::density_of_states(dsp, E) == doctest::Approx(oracle).epsilon(1e-4));
    }
  }
}

TEST_CASE("one-dimensional isotropic case matches the power-law line") {
  // D = 1, a = 2 is the same physics as the even m = 2 line with d = 1
  const disp::Isotropic iso{2.0, 1};
  const disp::Power1D line{1, 1.0, 2};
  for (double E : {0.7, 3.0, 40.0}) {
    CHECK(disp::density_of_states(iso, E) ==
          doctest::Approx(disp::density_of_states(line, E)).epsilon(1e-14));
  }
}

TEST_CASE("velocity product times per-branch density equals one") {
  CHECK(disp::velocity_product_rho_limit(disp::Power1D{1, 2.0, 2}, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  for (int m = 2; m <= 6; ++m) {
    for (int sigma : {1, -1}) {
      const disp::Power1D dsp{sigma, 0.8, m};
      const auto spec = disp::continuum(dsp);
      for (double mag : {1e-8, 1e-2, 1.0, 1e4}) {
        for (double E : {mag, -mag}) {
          if (!spec.contains(E)) continue;
          CHECK(disp::velocity_product_rho_limit(dsp, E) ==
                doctest::Approx(1.0).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("dispersion validation") {
  CHECK(code_of([] { disp::Power1D{0, 1.0, 2}.validate(); }) == Errc::bad_argument);
  CHECK(code_of([] { disp::Power1D{1, -1.0, 2}.validate(); }) == Errc::bad_argument);
  CHECK(code_of([] { disp::Power1D{1, 1.0, 0}.validate(); }) == Errc::bad_argument);
  CHECK(code_of([] { disp::Isotropic{-2.0, 3}.validate(); }) == Errc::bad_argument);
  CHECK(code_of([] { disp::Isotropic{2.0, 4}.validate(); }) == Errc::bad_argument);
  CHECK(!code_of([] { disp::Power1D{-1, 0.5, 5}.validate(); }).has_value());
}
