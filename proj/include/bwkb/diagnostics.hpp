#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bwkb/eikonal.hpp"
#include "bwkb/reference_solver.hpp"

namespace bwkb {

// Eikonal phase phi(x, t, kappa) for a family of launch quasimomenta.
struct PhaseFamily {
  InitialPhase g;
  int sign = 1;
  std::shared_ptr<const DispersionBranch> branch;
  double kappa_lo = -kPi;  // stationary quasimomenta are sought in this range
  double kappa_hi = kPi;

  double phase(double x, double t, double kappa) const;
  double phase_x(double x, double t, double kappa) const;
  double phase_t(double x, double t, double kappa) const;
  double phase_kappa(double x, double t, double kappa) const;
  double phase_kappa_kappa(double x, double t, double kappa) const;
  // stationary quasimomenta: phase_kappa(x, t, kappa) = x
  std::vector<double> stationary(double x, double t, int scan = 512) const;
  // position where the stationary quasimomentum equals kappa
  double position(double t, double kappa) const;
};

struct LocalWaveData {
  std::vector<double> xs, ts;
  // indexed [it * xs.size() + ix]
  std::vector<double> kappa_hat, k_hat, omega_hat;
  std::vector<bool> valid;
  std::size_t excluded = 0;
  double dispersion_residual = 0.0;  // max |omega_hat -+ Omega(t, k_hat)|
  std::size_t index(std::size_t it, std::size_t ix) const { return it * xs.size() + ix; }
};

LocalWaveData local_fields(const PhaseFamily& family, const std::vector<double>& xs, const std::vector<double>& ts);

struct TransportResiduals {
  double r_kappa = 0.0;
  double r_k = 0.0;
  std::size_t points = 0;
};
// Central differences of order 2 or 4 at interior points with valid neighbours.
TransportResiduals transport_residuals(const LocalWaveData& data, const PhaseFamily& family, int order = 2);

// leading amplitude u0(x, t, kappa) >= 0
using AmplitudeFn = std::function<double(double x, double t, double kappa)>;
// cell average of |U|^2 at the local wavenumber (1 for normalized modes)
using CellAverageFn = std::function<double(double t, double k)>;

double energy_density(const PhaseFamily& family, const AmplitudeFn& amp, double x, double t, double kappa_hat,
                      const CellAverageFn& cell_average = {});

double energy_flux_check(const LocalWaveData& data, const PhaseFamily& family, const AmplitudeFn& amp,
                         int order = 2, const CellAverageFn& cell_average = {});

struct EnergySeries {
  std::vector<double> t, x1, x2, q;
  double max_relative_drift = 0.0;
};

EnergySeries energy_between_characteristics_asymptotic(const PhaseFamily& family, const AmplitudeFn& amp,
                                                       double kappa1, double kappa2, const std::vector<double>& ts,
                                                       const CellAverageFn& cell_average = {});
EnergySeries energy_between_characteristics_fdtd(const PhaseFamily& family, const FineGrid& grid,
                                                 const std::vector<FieldSnapshot>& snapshots, double kappa1,
                                                 double kappa2);

// trapezoid integral of u^2 over [x1, x2] with linear interpolation at the ends
double integrate_square(const std::vector<double>& x, const std::vector<double>& u, double x1, double x2);
// centroid of the discrete energy density (kinetic plus strain)
double energy_centroid(const FineGrid& grid, const std::vector<double>& u, const std::vector<double>& v);

}  // namespace bwkb
