// Shared scalar types, error codes and small utilities.
#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dscatter {

using cdouble = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cdouble iunit{0.0, 1.0};
inline constexpr double inf = std::numeric_limits<double>::infinity();

// Machine-readable failure codes. Every throw carries one so the CLI can put
// it in the JSON report verbatim.
enum class Errc {
  non_convergence,
  singular_integrand,
  pole_collision,
  zero_sample,
  jump_too_large,
  zero_on_contour,
  non_integer_winding,
  outside_continuum,
  threshold_divergence,
  on_continuum,
  zero_frequency,
  zeta_not_divergent,
  singular_resolvent,
  bound_state_in_continuum,
  zero_denominator,
  zero_det_s,
  non_universal,
  zero_coupling,
  grid_too_coarse,
  not_applicable,
  parse_error,
  validation_error,
  bad_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::non_convergence: return "NonConvergence";
    case Errc::singular_integrand: return "SingularIntegrand";
    case Errc::pole_collision: return "PoleCollision";
    case Errc::zero_sample: return "ZeroSample";
    case Errc::jump_too_large: return "JumpTooLarge";
    case Errc::zero_on_contour: return "ZeroOnContour";
    case Errc::non_integer_winding: return "NonIntegerWinding";
    case Errc::outside_continuum: return "OutsideContinuum";
    case Errc::threshold_divergence: return "ThresholdDivergence";
    case Errc::on_continuum: return "OnContinuum";
    case Errc::zero_frequency: return "ZeroFrequency";
    case Errc::zeta_not_divergent: return "ZetaNotDivergent";
    case Errc::singular_resolvent: return "SingularResolvent";
    case Errc::bound_state_in_continuum: return "BoundStateInContinuum";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::zero_det_s: return "ZeroDetS";
    case Errc::non_universal: return "NonUniversal";
    case Errc::zero_coupling: return "ZeroCoupling";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::not_applicable: return "NotApplicable";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::bad_argument: return "BadArgument";
  }
  return "Unknown";
}

class ScatterError : public std::runtime_error {
 public:
  ScatterError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw ScatterError(code, what);
}

// Integer power with exact sign handling for negative bases.
inline double ipow(double x, int n) {
  double r = 1.0, b = x;
  int e = n;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline cdouble ipow(cdouble x, int n) {
  cdouble r = 1.0, b = x;
  int e = n;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// Which side of the continuum a boundary value E +- i0 is taken from.
enum class Side { above, below };

// Principal argument mapped to (-pi, pi].
inline double principal_arg(cdouble z) {
  double a = std::arg(z);
  if (a <= -pi) a += 2.0 * pi;
  return a;
}

}  // namespace dscatter
