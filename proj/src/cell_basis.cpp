#include "bwkb/cell_basis.hpp"

#include <algorithm>
#include <cmath>

#include "bwkb/error.hpp"
#include "bwkb/numerics.hpp"

namespace bwkb {

using cd = std::complex<double>;
static const cd I(0.0, 1.0);

// ---------------------------------------------------------------- Fourier

FourierBasis::FourierBasis(int modes) : modes_(modes) {
  require(modes >= 64 && (modes & (modes - 1)) == 0, "Fourier basis size must be a power of two >= 64");
}

std::string FourierBasis::name() const { return "fourier:" + std::to_string(modes_); }

void FourierBasis::assemble(const CellProfile& a, double xi, Eigen::MatrixXcd& K, Eigen::MatrixXcd& M) const {
  const int n = modes_;
  std::vector<cd> ahat(2 * n - 1);
  for (int j = -(n - 1); j <= n - 1; ++j) ahat[j + n - 1] = a.fourier_coefficient(j);
  K.resize(n, n);
  for (int p = 0; p < n; ++p) {
    double kp = kTwoPi * mode(p) + xi;
    for (int m = 0; m < n; ++m) {
      double km = kTwoPi * mode(m) + xi;
      K(p, m) = kp * km * ahat[p - m + n - 1];
    }
  }
  M.resize(0, 0);
}

Eigen::MatrixXcd FourierBasis::stiffness_xi_derivative(const CellProfile& a, double xi) const {
  const int n = modes_;
  Eigen::MatrixXcd dK(n, n);
  for (int p = 0; p < n; ++p)
    for (int m = 0; m < n; ++m)
      dK(p, m) = (2.0 * xi + kTwoPi * (mode(p) + mode(m))) * a.fourier_coefficient(mode(p) - mode(m));
  return dK;
}

cd FourierBasis::value(const Eigen::VectorXcd& c, double y) const {
  cd s = 0.0;
  for (int i = 0; i < modes_; ++i) s += c[i] * std::polar(1.0, kTwoPi * mode(i) * y);
  return s;
}

cd FourierBasis::shifted_derivative(const Eigen::VectorXcd& c, double xi, double y) const {
  cd s = 0.0;
  for (int i = 0; i < modes_; ++i) s += I * (kTwoPi * mode(i) + xi) * c[i] * std::polar(1.0, kTwoPi * mode(i) * y);
  return s;
}

cd FourierBasis::mean(const Eigen::VectorXcd& c) const { return c[modes_ / 2]; }

cd FourierBasis::inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const { return v.dot(u); }

cd FourierBasis::fourier_coefficient(const Eigen::VectorXcd& c, int m) const {
  int i = m + modes_ / 2;
  if (i < 0 || i >= modes_) return 0.0;
  return c[i];
}

cd FourierBasis::flux_moment(const Eigen::VectorXcd& c, const CellProfile& a, double xi) const {
  const int n = modes_;
  std::vector<cd> ahat(2 * n - 1);
  for (int j = -(n - 1); j <= n - 1; ++j) ahat[j + n - 1] = a.fourier_coefficient(j);
  cd s = 0.0;
  for (int p = 0; p < n; ++p) {
    cd row = 0.0;
    for (int m = 0; m < n; ++m) row += ahat[p - m + n - 1] * (kTwoPi * mode(m) + xi) * c[m];
    s += std::conj(c[p]) * row;
  }
  return I * s;
}

// ------------------------------------------------------- spectral elements

SpectralElementBasis::SpectralElementBasis(const CellProfile& layout, int order, int elements_per_unit)
    : order_(order) {
  require(layout.kind() == CellProfile::Kind::piecewise, "spectral elements need a piecewise profile");
  require(order >= 2 && order <= 32, "spectral element order must lie in [2, 32]");
  require(elements_per_unit >= 1, "elements per unit must be positive");
  const double amin = layout.min_value();
  edges_.push_back(0.0);
  double start = 0.0;
  for (const auto& s : layout.segments()) {
    int count = std::max(1, static_cast<int>(std::ceil(s.fraction * elements_per_unit * std::sqrt(amin / s.value))));
    for (int e = 1; e <= count; ++e) edges_.push_back(e == count ? start + s.fraction : start + s.fraction * e / count);
    start += s.fraction;
  }
  edges_.back() = 1.0;
  nodes_ = elements() * order_;

  const QuadratureRule gll = gauss_lobatto(order_);
  ref_nodes_ = gll.nodes;
  bary_ = barycentric_weights(ref_nodes_);
  const QuadratureRule g = gauss_legendre(order_ + 2);
  qx_ = g.nodes;
  qw_ = g.weights;
  B_.resize(qx_.size(), order_ + 1);
  D_.resize(qx_.size(), order_ + 1);
  std::vector<double> v, dv;
  for (std::size_t q = 0; q < qx_.size(); ++q) {
    lagrange(qx_[q], v, dv);
    for (int i = 0; i <= order_; ++i) {
      B_(q, i) = v[i];
      D_(q, i) = dv[i];
    }
  }
}

std::string SpectralElementBasis::name() const {
  return "sem:p" + std::to_string(order_) + ":e" + std::to_string(elements());
}

void SpectralElementBasis::lagrange(double s, std::vector<double>& v, std::vector<double>& dv) const {
  const int n = order_ + 1;
  v.assign(n, 0.0);
  dv.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double prod = bary_[j];
    for (int k = 0; k < n; ++k)
      if (k != j) prod *= (s - ref_nodes_[k]);
    v[j] = prod;
    double d = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m == j) continue;
      double p = bary_[j];
      for (int k = 0; k < n; ++k)
        if (k != j && k != m) p *= (s - ref_nodes_[k]);
      d += p;
    }
    dv[j] = d;
  }
}

int SpectralElementBasis::locate(double y) const {
  y -= std::floor(y);
  int e = static_cast<int>(std::upper_bound(edges_.begin(), edges_.end(), y) - edges_.begin()) - 1;
  return std::clamp(e, 0, elements() - 1);
}

double SpectralElementBasis::element_value(const CellProfile& a, int e) const {
  return a(0.5 * (edges_[e] + edges_[e + 1]));
}

void SpectralElementBasis::assemble(const CellProfile& a, double xi, Eigen::MatrixXcd& K, Eigen::MatrixXcd& M) const {
  require(a.kind() == CellProfile::Kind::piecewise, "spectral elements need a piecewise profile");
  K.setZero(nodes_, nodes_);
  M.setZero(nodes_, nodes_);
  const int nl = order_ + 1;
  const int nq = static_cast<int>(qx_.size());
  Eigen::MatrixXcd G(nq, nl);
  for (int e = 0; e < elements(); ++e) {
    const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
    const double ae = element_value(a, e);
    for (int q = 0; q < nq; ++q)
      for (int i = 0; i < nl; ++i) G(q, i) = D_(q, i) / jac + I * xi * B_(q, i);
    for (int i = 0; i < nl; ++i) {
      const int gi = global_index(e, i);
      for (int j = 0; j < nl; ++j) {
        const int gj = global_index(e, j);
        cd k = 0.0;
        double m = 0.0;
        for (int q = 0; q < nq; ++q) {
          k += qw_[q] * G(q, j) * std::conj(G(q, i));
          m += qw_[q] * B_(q, i) * B_(q, j);
        }
        K(gi, gj) += ae * jac * k;
        M(gi, gj) += jac * m;
      }
    }
  }
}

Eigen::MatrixXcd SpectralElementBasis::stiffness_xi_derivative(const CellProfile& a, double xi) const {
  Eigen::MatrixXcd dK = Eigen::MatrixXcd::Zero(nodes_, nodes_);
  const int nl = order_ + 1;
  const int nq = static_cast<int>(qx_.size());
  for (int e = 0; e < elements(); ++e) {
    const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
    const double ae = element_value(a, e);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) {
        cd s = 0.0;
        for (int q = 0; q < nq; ++q)
          s += qw_[q] * (I * (B_(q, j) * D_(q, i) - D_(q, j) * B_(q, i)) / jac + 2.0 * xi * B_(q, i) * B_(q, j));
        dK(global_index(e, i), global_index(e, j)) += ae * jac * s;
      }
  }
  return dK;
}

cd SpectralElementBasis::value(const Eigen::VectorXcd& c, double y) const {
  const int e = locate(y);
  y -= std::floor(y);
  const double s = 2.0 * (y - edges_[e]) / (edges_[e + 1] - edges_[e]) - 1.0;
  std::vector<double> v, dv;
  lagrange(s, v, dv);
  cd u = 0.0;
  for (int i = 0; i <= order_; ++i) u += v[i] * c[global_index(e, i)];
  return u;
}

cd SpectralElementBasis::shifted_derivative(const Eigen::VectorXcd& c, double xi, double y) const {
  const int e = locate(y);
  y -= std::floor(y);
  const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
  const double s = (y - edges_[e]) / jac - 1.0;
  std::vector<double> v, dv;
  lagrange(s, v, dv);
  cd u = 0.0, du = 0.0;
  for (int i = 0; i <= order_; ++i) {
    u += v[i] * c[global_index(e, i)];
    du += dv[i] * c[global_index(e, i)];
  }
  return du / jac + I * xi * u;
}

cd SpectralElementBasis::mean(const Eigen::VectorXcd& c) const {
  cd s = 0.0;
  for (int e = 0; e < elements(); ++e) {
    const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
    for (std::size_t q = 0; q < qx_.size(); ++q) {
      cd u = 0.0;
      for (int i = 0; i <= order_; ++i) u += B_(q, i) * c[global_index(e, i)];
      s += qw_[q] * jac * u;
    }
  }
  return s;
}

cd SpectralElementBasis::inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
  cd s = 0.0;
  for (int e = 0; e < elements(); ++e) {
    const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
    for (std::size_t q = 0; q < qx_.size(); ++q) {
      cd uq = 0.0, vq = 0.0;
      for (int i = 0; i <= order_; ++i) {
        uq += B_(q, i) * u[global_index(e, i)];
        vq += B_(q, i) * v[global_index(e, i)];
      }
      s += qw_[q] * jac * uq * std::conj(vq);
    }
  }
  return s;
}

cd SpectralElementBasis::fourier_coefficient(const Eigen::VectorXcd& c, int m) const {
  // exponential integrand: use a finer rule than the polynomial one
  static thread_local QuadratureRule fine;
  if (static_cast<int>(fine.nodes.size()) != 2 * order_ + 8) fine = gauss_legendre(2 * order_ + 8);
  std::vector<double> v, dv;
  cd s = 0.0;
  for (int e = 0; e < elements(); ++e) {
    const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
    for (std::size_t q = 0; q < fine.nodes.size(); ++q) {
      lagrange(fine.nodes[q], v, dv);
      cd u = 0.0;
      for (int i = 0; i <= order_; ++i) u += v[i] * c[global_index(e, i)];
      const double y = edges_[e] + jac * (fine.nodes[q] + 1.0);
      s += fine.weights[q] * jac * u * std::polar(1.0, -kTwoPi * m * y);
    }
  }
  return s;
}

cd SpectralElementBasis::flux_moment(const Eigen::VectorXcd& c, const CellProfile& a, double xi) const {
  cd s = 0.0;
  for (int e = 0; e < elements(); ++e) {
    const double jac = 0.5 * (edges_[e + 1] - edges_[e]);
    const double ae = element_value(a, e);
    for (std::size_t q = 0; q < qx_.size(); ++q) {
      cd u = 0.0, du = 0.0;
      for (int i = 0; i <= order_; ++i) {
        u += B_(q, i) * c[global_index(e, i)];
        du += (D_(q, i) / jac + I * xi * B_(q, i)) * c[global_index(e, i)];
      }
      s += qw_[q] * jac * ae * du * std::conj(u);
    }
  }
  return s;
}

std::shared_ptr<const CellBasis> make_basis(const CellProfile& profile, const DiscretizationOptions& opts) {
  if (profile.kind() == CellProfile::Kind::piecewise && !profile.is_constant())
    return std::make_shared<SpectralElementBasis>(profile, opts.sem_order, opts.sem_elements_per_unit);
  return std::make_shared<FourierBasis>(opts.fourier_modes);
}

}  // namespace bwkb
