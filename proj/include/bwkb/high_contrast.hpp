#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bwkb/dispersion.hpp"

namespace bwkb {

// Two-phase cell in the infinite-contrast limit: stiff fraction h, soft
// coefficient a2 on [h, 1).
struct HighContrastMedium {
  double h = 0.5;
  double a2 = 1.0;
  void validate() const;
};

// f(W) = cos(W (1-h)/sqrt(a2)) - (W h / (2 sqrt(a2))) sin(W (1-h)/sqrt(a2))
double hc_dispersion_function(double omega, const HighContrastMedium& m);
Jet hc_dispersion_jet(double omega, const HighContrastMedium& m);
double hc_dispersion_residual(double omega, double kappa, const HighContrastMedium& m);

struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
};

BandInterval hc_band_edges(int n, const HighContrastMedium& m);
// all bands 0..n_max in one scan
std::vector<BandInterval> hc_band_edges_upto(int n_max, const HighContrastMedium& m);
// scan step used by the edge search
double hc_scan_step(const HighContrastMedium& m);

struct HCBandPoint {
  int n = 0;
  double kappa = 0.0;
  double omega = 0.0;
  double residual = 0.0;
};

HCBandPoint hc_solve_branch(int n, double kappa, const HighContrastMedium& m);
HCBandPoint hc_solve_in_band(int n, double kappa, const BandInterval& band, const HighContrastMedium& m);

// exact derivatives of the root by implicit differentiation
BranchJet hc_branch_jet(const HCBandPoint& p, const HighContrastMedium& m);

BranchJet hc_band_asymptotics(int n, double kappa, const HighContrastMedium& m);

// sin(W (1-h)/sqrt(a2)) at the root, and its large-n form
double hc_sine_factor(const HCBandPoint& p, const HighContrastMedium& m);
double hc_sine_factor_asymptotic(int n, double kappa, const HighContrastMedium& m);

// normalizer making the limit eigenfunction unit in L2(0,1)
double hc_normalizer(const HCBandPoint& p, const HighContrastMedium& m);
double hc_normalizer_asymptotic(int n, double kappa, const HighContrastMedium& m);

// Limit eigenfunction: constant modulus on the stiff part [0, h), two
// standing sines on the soft part. conjugate=true gives the time-reversed
// partner.
std::complex<double> hc_eigenfunction(double y, const HCBandPoint& p, const HighContrastMedium& m,
                                      bool conjugate = false);
// max over the soft part of the unnormalized two-sine bracket modulus
double hc_soft_bracket_max(const HCBandPoint& p, const HighContrastMedium& m);

struct HCPulseAmplitudes {
  // closed-form large-n predictions
  double stiff = 0.0;
  double soft_prefactor = 0.0;
  double soft_max = 0.0;
  double ratio = 0.0;
  double ratio_formula = 0.0;  // 2(1-h)/(n pi h)
  // evaluated from the normalized limit eigenfunction at the exact root
  double stiff_exact = 0.0;
  double soft_max_exact = 0.0;
  double ratio_exact = 0.0;
  // leading large-n form of ratio_exact
  double ratio_leading = 0.0;
  HCBandPoint point;
  double curvature = 0.0;  // exact Omega'' at the root
};

HCPulseAmplitudes hc_pulse_amplitudes(int n, double kappa_star, const HighContrastMedium& m, double t, double f0);

class HighContrastBranch final : public DispersionBranch {
 public:
  HighContrastBranch(int n, HighContrastMedium m);
  BranchJet jet(double t, double xi) const override;
  void mode_values(double t, double xi, std::span<const double> ys, std::complex<double>* out) const override;
  std::string describe() const override;
  HCBandPoint point(double kappa) const;
  const BandInterval& band() const { return band_; }
  int index() const { return n_; }
  const HighContrastMedium& medium() const { return m_; }

 private:
  int n_;
  HighContrastMedium m_;
  BandInterval band_;
};

}  // namespace bwkb
