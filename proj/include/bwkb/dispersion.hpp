#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bwkb/cell_spectrum.hpp"
#include "bwkb/numerics.hpp"

namespace bwkb {

struct BranchJet {
  double omega = 0.0;
  double omega_xi = 0.0;
  double omega_xixi = 0.0;
};

// One dispersion branch Omega(t, xi) with its cell eigenfunctions.
class DispersionBranch {
 public:
  virtual ~DispersionBranch() = default;
  virtual BranchJet jet(double t, double xi) const = 0;
  double omega(double t, double xi) const { return jet(t, xi).omega; }
  double omega_xi(double t, double xi) const { return jet(t, xi).omega_xi; }
  double omega_xixi(double t, double xi) const { return jet(t, xi).omega_xixi; }
  virtual double omega_t(double /*t*/, double /*xi*/) const { return 0.0; }
  virtual bool time_dependent() const { return false; }
  // U(y; xi) at time t for each y (cell coordinate, any real value)
  virtual void mode_values(double t, double xi, std::span<const double> ys, std::complex<double>* out) const = 0;
  std::complex<double> mode_value(double t, double xi, double y) const {
    std::complex<double> v;
    mode_values(t, xi, std::span<const double>(&y, 1), &v);
    return v;
  }
  virtual std::string describe() const = 0;
};

struct TimeIntegrals {
  double omega = 0.0;       // int_0^t Omega ds
  double omega_xi = 0.0;    // int_0^t Omega_xi ds
  double omega_xixi = 0.0;  // int_0^t Omega_xixi ds
};

// Exact products for time-independent branches, Simpson otherwise.
TimeIntegrals integrate_in_time(const DispersionBranch& branch, double xi, double t);

// Quintic Hermite interpolation of a sampled cell branch in xi.
class CellBranch final : public DispersionBranch {
 public:
  explicit CellBranch(std::shared_ptr<const BlochBranch> branch);
  CellBranch(const CellCoefficient& coeff, int n, int points, const DiscretizationOptions& opts = {});
  BranchJet jet(double t, double xi) const override;
  void mode_values(double t, double xi, std::span<const double> ys, std::complex<double>* out) const override;
  std::string describe() const override;
  const BlochBranch& bloch() const { return *branch_; }
  // interpolated, renormalized eigenfunction coefficients at xi
  Eigen::VectorXcd mode_coefficients(double xi) const;

 private:
  std::shared_ptr<const BlochBranch> branch_;
  Jet node_jet(int j, bool left_limit) const;
};

// Cell branches at several time stamps, linear in t between them.
class TimeDependentCellBranch final : public DispersionBranch {
 public:
  TimeDependentCellBranch(const CellCoefficient& coeff, int n, int points, const DiscretizationOptions& opts = {});
  BranchJet jet(double t, double xi) const override;
  double omega_t(double t, double xi) const override;
  bool time_dependent() const override { return true; }
  void mode_values(double t, double xi, std::span<const double> ys, std::complex<double>* out) const override;
  std::string describe() const override;

 private:
  std::vector<double> stamps_;
  std::vector<std::shared_ptr<CellBranch>> branches_;
  // bracketing stamp index and weight
  std::pair<std::size_t, double> locate(double t) const;
};

// Dense quintic Hermite table of another time-independent branch; mode
// values are delegated to the wrapped branch.
class TabulatedBranch final : public DispersionBranch {
 public:
  TabulatedBranch(std::shared_ptr<const DispersionBranch> source, double xi_lo, double xi_hi, int points);
  BranchJet jet(double t, double xi) const override;
  void mode_values(double t, double xi, std::span<const double> ys, std::complex<double>* out) const override;
  std::string describe() const override;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::shared_ptr<const DispersionBranch> source_;
  double lo_, hi_, step_;
  std::vector<Jet> nodes_;
};

}  // namespace bwkb
