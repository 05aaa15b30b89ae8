#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bwkb/cell_basis.hpp"
#include "bwkb/coefficient.hpp"
#include "bwkb/numerics.hpp"

namespace bwkb {

enum class GaugeTag { cell_mean, fourier_coefficient };
const char* gauge_name(GaugeTag tag);

struct DiscreteOperator {
  std::shared_ptr<const CellBasis> basis;
  Eigen::MatrixXcd stiffness;
  Eigen::MatrixXcd mass;  // empty for an orthonormal basis
  double xi = 0.0;
  double t = 0.0;
};

DiscreteOperator assemble_shifted_operator(const CellCoefficient& coeff, double xi, double t,
                                           const DiscretizationOptions& opts = {});

struct BlochEigenpair {
  int n = 0;
  double xi = 0.0;
  double t = 0.0;
  double omega = 0.0;
  double eigenvalue = 0.0;
  Eigen::VectorXcd coeffs;
  std::shared_ptr<const CellBasis> basis;
  GaugeTag gauge = GaugeTag::cell_mean;
  double residual = 0.0;  // ||K c - lambda M c|| / (lambda ||M c||)

  std::complex<double> value(double y) const { return basis->value(coeffs, y); }
  // U on the uniform grid y_j = j / ny
  std::vector<std::complex<double>> samples(int ny) const;
  double norm_sq() const { return basis->inner(coeffs, coeffs).real(); }
};

// Rotate the coefficient vector to the fixed gauge; returns the rule used.
GaugeTag apply_gauge(const CellBasis& basis, Eigen::VectorXcd& c);

std::vector<BlochEigenpair> solve_bloch(const CellCoefficient& coeff, double xi, double t, int n_max,
                                        const DiscretizationOptions& opts = {});

struct GroupVelocity {
  double value = 0.0;
  bool fallback = false;  // one-sided difference at the acoustic point
};

// Omega_xi from one eigenpair: d(Omega^2)/dxi = 2 Im int a (U' + i xi U) conj U.
GroupVelocity group_velocity_hf(const BlochEigenpair& pair, const CellCoefficient& coeff,
                                const DiscretizationOptions& opts = {});
// 2 Im int a (U' + i xi U) conj U
double omega_squared_xi(const BlochEigenpair& pair, const CellCoefficient& coeff);

class BlochBranch {
 public:
  BlochBranch() = default;
  // Uniform grid xi_j = -pi + 2 pi j / points, j = 0..points-1.
  BlochBranch(CellCoefficient coeff, int n, int points, double t = 0.0, DiscretizationOptions opts = {});

  int index() const { return n_; }
  int points() const { return static_cast<int>(xi_.size()); }
  double spacing() const { return kTwoPi / points(); }
  double time() const { return t_; }
  const CellCoefficient& coefficient() const { return coeff_; }
  const DiscretizationOptions& options() const { return opts_; }
  const std::vector<double>& xi_grid() const { return xi_; }
  const std::vector<double>& omegas() const { return omega_; }
  const std::vector<double>& group_velocity() const { return vg_; }
  const std::vector<double>& curvature_grid() const { return curv_; }
  const std::vector<bool>& one_sided() const { return one_sided_; }
  const std::vector<bool>& fallback() const { return fallback_; }
  const BlochEigenpair& pair(int j) const { return pairs_.at(j); }
  // index of the grid point equal to xi (within 1e-12), or -1
  int grid_index(double xi) const;

 private:
  CellCoefficient coeff_;
  int n_ = 0;
  double t_ = 0.0;
  DiscretizationOptions opts_;
  std::vector<double> xi_, omega_, vg_, curv_;
  std::vector<bool> one_sided_, fallback_;
  std::vector<BlochEigenpair> pairs_;
};

struct Curvature {
  double value = 0.0;
  bool one_sided = false;
};

// Fourth-order difference of the Hellmann-Feynman group velocities; xi
// must be a grid point.
Curvature curvature(const BlochBranch& branch, double xi);

struct OmegaDerivative {
  Eigen::VectorXcd coeffs;
  std::shared_ptr<const CellBasis> basis;
  std::complex<double> overlap;  // int U_Omega conj(U)
  double delta_omega = 0.0;
};

OmegaDerivative eigenfunction_omega_derivative(const CellCoefficient& coeff, int n, double xi, double delta,
                                               double t = 0.0, const DiscretizationOptions& opts = {});
// Uses the branch spacing as the quasimomentum step.
OmegaDerivative eigenfunction_omega_derivative(const BlochBranch& branch, double xi);

// Rotate v by a unit phase so that int v conj(u) is real and nonnegative.
void align_phase(const CellBasis& basis, const Eigen::VectorXcd& reference, Eigen::VectorXcd& v);

}  // namespace bwkb
