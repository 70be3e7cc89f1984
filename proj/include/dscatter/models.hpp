// Emitter and separable potential models: coupling families, validation,
// and detection/construction of fine-tuned bright zero-energy states.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dscatter/common.hpp"
#include "dscatter/dispersion.hpp"

namespace dscatter::models {

enum class Family { gaussian, lorentzian_power, polynomial_gaussian, tabulated };

const char* family_name(Family f);
Family family_from_name(const std::string& s);

struct CouplingSpec {
  Family family = Family::gaussian;
  cdouble V0{1.0, 0.0};
  double width = 1.0;
  double power = 1.0;                 // lorentzian exponent p
  std::vector<double> poly;           // polynomial factor 1 + c1 k + c2 k^2 + ...
  std::vector<double> tab_k, tab_v;   // tabulated |shape| samples on |k| >= 0
  double declared_decay2 = -inf;      // tabulated: asserted |V|^2 tail exponent

  void validate() const;
  cdouble value(double k) const;      // V(k)
  double abs2(double k) const;        // |V(k)|^2
  double decay_exponent2() const;     // power-law exponent of |V(k)|^2 at large |k|
  double support_scale() const;       // momentum scale beyond which V is tail-like
  bool decay_verified() const { return family != Family::tabulated; }
};

struct EmitterModel {
  Eigen::MatrixXcd KR;  // emitter-sector effective operator A + iB
  Eigen::VectorXcd u;   // shared coupling direction, normalized
  CouplingSpec coupling;

  int N() const { return static_cast<int>(u.size()); }
  void validate_shape() const;
  bool hermitian(double tol = 1e-12) const;
  // B = (KR - KR^dag)/(2i) negative semidefinite and nonzero.
  bool dissipative(double tol = 1e-12) const;
};

struct SeparableModel {
  double g = 1.0;           // interaction strength, nonzero real
  CouplingSpec form_factor; // v(k) with v(0) = 1

  void validate_shape() const;
};

struct BrightStateCertificate {
  Eigen::VectorXcd e0;    // emitter part: orthogonal to u, annihilated by the
                          // u-complement block of KR, not annihilated by KR
  cdouble psi0_constant;  // uniform photon amplitude, -<u|KR|e0>/V(0), nonzero
  double nullspace_gap;   // smallest retained singular value of the complement
                          // block (conditioning of the null-space decision)
};

struct ValidationReport {
  bool u_normalized = false;
  bool v0_nonzero = false;
  bool decay_ok = false;
  bool decay_verified = true;
  std::string model_class;  // "hermitian", "dissipative" or "neither"
  double kr_sub_min_sv = 0.0;
  int dark_emitter_states = 0;
  bool bright_state = false;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
};

cdouble coupling_value(const CouplingSpec& spec, double k);

// Unitary whose first column is u (Householder complement for the rest).
Eigen::MatrixXcd u_basis(const Eigen::VectorXcd& u);

ValidationReport validate_model(const EmitterModel& model, const disp::Dispersion& dsp);
ValidationReport validate_model(const SeparableModel& model, const disp::Dispersion& dsp);

std::optional<BrightStateCertificate> detect_bright_zero_state(const EmitterModel& model,
                                                               double rank_tol = 1e-10);

// Random model with a planted null direction in the u-complement block that
// KR still maps onto u: detection is guaranteed a certificate.
EmitterModel construct_bright_tuned_model(int N, std::uint64_t seed);

}  // namespace dscatter::models
