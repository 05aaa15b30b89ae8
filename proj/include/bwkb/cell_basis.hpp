#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bwkb/coefficient.hpp"

namespace bwkb {

struct DiscretizationOptions {
  int fourier_modes = 256;         // Fourier-Galerkin size (power of two >= 64)
  int sem_order = 12;              // polynomial order per spectral element
  int sem_elements_per_unit = 16;  // element density in the softest segment
};

// Finite-dimensional space of cell-periodic functions. Coefficient vectors
// are interpreted by the basis; all integrals are over the unit cell.
class CellBasis {
 public:
  virtual ~CellBasis() = default;
  virtual int size() const = 0;
  virtual bool identity_mass() const = 0;
  virtual std::string name() const = 0;

  // Hermitian stiffness of -(d/dy + i xi) a (d/dy + i xi) and the mass matrix.
  // M is left empty when identity_mass().
  virtual void assemble(const CellProfile& a, double xi, Eigen::MatrixXcd& K, Eigen::MatrixXcd& M) const = 0;
  // dK/dxi for the same profile
  virtual Eigen::MatrixXcd stiffness_xi_derivative(const CellProfile& a, double xi) const = 0;

  virtual std::complex<double> value(const Eigen::VectorXcd& c, double y) const = 0;
  // U'(y) + i xi U(y)
  virtual std::complex<double> shifted_derivative(const Eigen::VectorXcd& c, double xi, double y) const = 0;
  virtual std::complex<double> mean(const Eigen::VectorXcd& c) const = 0;
  // integral of u conj(v)
  virtual std::complex<double> inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const = 0;
  // integral of U exp(-2 pi i m y)
  virtual std::complex<double> fourier_coefficient(const Eigen::VectorXcd& c, int m) const = 0;
  // integral of a (U' + i xi U) conj(U)
  virtual std::complex<double> flux_moment(const Eigen::VectorXcd& c, const CellProfile& a, double xi) const = 0;
  // largest |m| for which fourier_coefficient is meaningful
  virtual int fourier_range() const = 0;
};

class FourierBasis final : public CellBasis {
 public:
  explicit FourierBasis(int modes);
  int size() const override { return modes_; }
  bool identity_mass() const override { return true; }
  std::string name() const override;
  void assemble(const CellProfile& a, double xi, Eigen::MatrixXcd& K, Eigen::MatrixXcd& M) const override;
  Eigen::MatrixXcd stiffness_xi_derivative(const CellProfile& a, double xi) const override;
  std::complex<double> value(const Eigen::VectorXcd& c, double y) const override;
  std::complex<double> shifted_derivative(const Eigen::VectorXcd& c, double xi, double y) const override;
  std::complex<double> mean(const Eigen::VectorXcd& c) const override;
  std::complex<double> inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const override;
  std::complex<double> fourier_coefficient(const Eigen::VectorXcd& c, int m) const override;
  std::complex<double> flux_moment(const Eigen::VectorXcd& c, const CellProfile& a, double xi) const override;
  int fourier_range() const override { return modes_ / 2 - 1; }
  // wavenumber index of coefficient slot i
  int mode(int i) const { return i - modes_ / 2; }

 private:
  int modes_;
};

// Continuous periodic Lagrange elements on Gauss-Lobatto nodes, with element
// boundaries placed on every coefficient discontinuity.
class SpectralElementBasis final : public CellBasis {
 public:
  SpectralElementBasis(const CellProfile& layout, int order, int elements_per_unit);
  int size() const override { return nodes_; }
  bool identity_mass() const override { return false; }
  std::string name() const override;
  void assemble(const CellProfile& a, double xi, Eigen::MatrixXcd& K, Eigen::MatrixXcd& M) const override;
  Eigen::MatrixXcd stiffness_xi_derivative(const CellProfile& a, double xi) const override;
  std::complex<double> value(const Eigen::VectorXcd& c, double y) const override;
  std::complex<double> shifted_derivative(const Eigen::VectorXcd& c, double xi, double y) const override;
  std::complex<double> mean(const Eigen::VectorXcd& c) const override;
  std::complex<double> inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const override;
  std::complex<double> fourier_coefficient(const Eigen::VectorXcd& c, int m) const override;
  std::complex<double> flux_moment(const Eigen::VectorXcd& c, const CellProfile& a, double xi) const override;
  int fourier_range() const override { return 64; }

  int order() const { return order_; }
  int elements() const { return static_cast<int>(edges_.size()) - 1; }
  const std::vector<double>& element_edges() const { return edges_; }

 private:
  int order_;
  int nodes_;
  std::vector<double> edges_;      // element boundaries, edges_.front()=0, back()=1
  std::vector<double> ref_nodes_;  // GLL nodes on [-1, 1]
  std::vector<double> bary_;
  // reference basis values / derivatives at quadrature points [q][i]
  Eigen::MatrixXd B_, D_;
  std::vector<double> qw_;
  std::vector<double> qx_;

  int global_index(int element, int local) const { return (element * order_ + local) % nodes_; }
  int locate(double y) const;
  // local Lagrange values and derivatives at reference coordinate s
  void lagrange(double s, std::vector<double>& v, std::vector<double>& dv) const;
  double element_value(const CellProfile& a, int e) const;
};

std::shared_ptr<const CellBasis> make_basis(const CellProfile& profile, const DiscretizationOptions& opts);

}  // namespace bwkb
