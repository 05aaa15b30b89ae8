#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "bwkb/dispersion.hpp"

namespace bwkb {

// Initial phase g(sigma) with g' and g''.
class InitialPhase {
 public:
  enum class Kind { zero, linear, quadratic, sampled };

  static InitialPhase zero();
  static InitialPhase linear(double slope);
  static InitialPhase quadratic(double c2);  // g = c2 sigma^2
  static InitialPhase sampled(std::vector<double> sigma, std::vector<double> g);
  // "zero", "linear:c", "quad:c2", or a CSV file with columns sigma,g
  static InitialPhase parse(const std::string& spec);

  Kind kind() const { return kind_; }
  Jet operator()(double sigma) const;
  bool curved() const { return kind_ == Kind::quadratic || kind_ == Kind::sampled; }
  double lo() const;
  double hi() const;
  std::string describe() const;
  // max |central difference of g - g'| over the sampled range
  double consistency_error() const;

 private:
  Kind kind_ = Kind::zero;
  double c_ = 0.0;
  CubicSpline spline_;
};

struct PhaseState {
  int sign = +1;  // +1 or -1
  InitialPhase g = InitialPhase::zero();
  double kappa = 0.0;
  std::shared_ptr<const DispersionBranch> branch;
};

void validate_phase_state(const PhaseState& s);

// Position, phase and d x / d sigma of the characteristic launched at sigma.
struct CharacteristicPoint {
  double x = 0.0;
  double phase = 0.0;
  double jacobian = 1.0;  // dx/dsigma
  double xi = 0.0;
};
CharacteristicPoint characteristic_point(const PhaseState& s, double sigma, double t);

struct CharacteristicPath {
  double sigma0 = 0.0;
  double xi = 0.0;
  double step = 0.0;  // accepted RK4 step
  std::vector<double> times, x, phase, phase_slope, amplitude;
  double slope_drift = 0.0;       // max |phi_x(t) - phi_x(0)|
  double velocity_error = 0.0;    // max |dx/dt - (+-Omega_xi)|
  double phase_rate_error = 0.0;  // max |dphi/dt - (+-(phi_x Omega_xi + Omega))|
  double step_change = 0.0;       // endpoint change under step halving
};

// u0_init: sigma -> u0(sigma, 0); an empty function means unit amplitude.
CharacteristicPath trace_characteristic(const PhaseState& s, double sigma0, double t_final, double dt,
                                        const std::function<double(double)>& u0_init = {});

struct PhaseValue {
  double phase = 0.0;
  double phase_x = 0.0;
  double sigma = 0.0;
  double jacobian = 1.0;
};

// Inverse of sigma -> x(t; sigma) on the admissible launch interval.
class CharacteristicMap {
 public:
  CharacteristicMap(const PhaseState& s, double t, int samples = 1025);
  PhaseValue at(double x) const;
  double sigma_lo() const { return lo_; }
  double sigma_hi() const { return hi_; }

 private:
  PhaseState state_;
  double t_, lo_, hi_;
  std::vector<double> sigma_, x_, jac_;
};

// admissible launch interval: kappa - g'(sigma) inside [-pi, pi)
std::pair<double, double> admissible_sigma(const PhaseState& s);

PhaseValue phase_field(const PhaseState& s, double t, double x);

enum class TransportForm { psi, preform };

double amplitude_field(const PhaseState& s, double t, double x, const std::function<double(double)>& u0_init,
                       TransportForm form = TransportForm::psi);

struct SolvabilityReport {
  double xi = 0.0;
  int n = 0;
  double overlap_real = 0.0;  // |Re int U_Omega conj U|
  double g1 = 0.0;            // -i int U_Omega conj U (real part)
  double g1_imag = 0.0;
  double hf = 0.0;            // 2 Im int a (U' + i xi U) conj U
  double fd = 0.0;            // central difference of Omega^2
  double hf_relative = 0.0;
};

SolvabilityReport verify_solvability_constants(const CellCoefficient& coeff, int n, double xi, double delta = 1e-4,
                                               const DiscretizationOptions& opts = {});
SolvabilityReport verify_solvability_constants(const BlochBranch& branch, double xi);

}  // namespace bwkb
