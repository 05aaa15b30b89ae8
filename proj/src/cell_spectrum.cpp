#include "bwkb/cell_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bwkb/error.hpp"
#include "bwkb/numerics.hpp"

namespace bwkb {

using cd = std::complex<double>;

const char* gauge_name(GaugeTag tag) {
  return tag == GaugeTag::cell_mean ? "cell_mean_real_positive" : "largest_fourier_coefficient_real_positive";
}

namespace {

void check_xi(double xi) {
  if (!(xi >= -kPi && xi < kPi)) {
    std::ostringstream os;
    os << "quasimomentum " << xi << " outside [-pi, pi)";
    fail(ErrorCode::out_of_range, os.str());
  }
}

// rotate so that z becomes real positive; no-op when already within rounding
void rotate_to_real(Eigen::VectorXcd& c, cd z) {
  double arg = std::arg(z);
  if (std::abs(arg) < 1e-13) return;
  c *= std::polar(1.0, -arg);
}

}  // namespace

GaugeTag apply_gauge(const CellBasis& basis, Eigen::VectorXcd& c) {
  cd m = basis.mean(c);
  if (std::abs(m) >= 1e-10) {
    rotate_to_real(c, m);
    return GaugeTag::cell_mean;
  }
  int best = 0;
  double best_abs = -1.0;
  cd best_val = 0.0;
  const int range = basis.fourier_range();
  // scan 0, 1, -1, 2, -2, ... so ties resolve deterministically
  for (int k = 0; k <= 2 * range; ++k) {
    int mode = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
    cd v = basis.fourier_coefficient(c, mode);
    if (std::abs(v) > best_abs * (1.0 + 1e-12)) {
      best_abs = std::abs(v);
      best = mode;
      best_val = v;
    }
  }
  (void)best;
  rotate_to_real(c, best_val);
  return GaugeTag::fourier_coefficient;
}

std::vector<std::complex<double>> BlochEigenpair::samples(int ny) const {
  std::vector<cd> out(ny);
  for (int j = 0; j < ny; ++j) out[j] = value(static_cast<double>(j) / ny);
  return out;
}

DiscreteOperator assemble_shifted_operator(const CellCoefficient& coeff, double xi, double t,
                                           const DiscretizationOptions& opts) {
  check_xi(xi);
  DiscreteOperator op;
  const CellProfile profile = coeff.at(t);
  op.basis = make_basis(profile, opts);
  op.basis->assemble(profile, xi, op.stiffness, op.mass);
  op.xi = xi;
  op.t = t;
  return op;
}

std::vector<BlochEigenpair> solve_bloch(const CellCoefficient& coeff, double xi, double t, int n_max,
                                        const DiscretizationOptions& opts) {
  require(n_max >= 1, "solve_bloch: n_max must be at least 1");
  DiscreteOperator op = assemble_shifted_operator(coeff, xi, t, opts);
  const int size = op.basis->size();
  require(n_max <= size, "solve_bloch: n_max exceeds the discretization size");

  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  const bool identity = op.basis->identity_mass();
  if (identity) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.stiffness);
    if (es.info() != Eigen::Success) fail(ErrorCode::non_convergence, "cell eigensolver did not converge");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.stiffness, op.mass);
    if (es.info() != Eigen::Success) fail(ErrorCode::non_convergence, "cell eigensolver did not converge");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }

  const double knorm = op.stiffness.cwiseAbs().colwise().sum().maxCoeff();
  const double mnorm = identity ? 1.0 : op.mass.cwiseAbs().colwise().sum().maxCoeff();
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<BlochEigenpair> out;
  std::ostringstream bad;
  for (int n = 0; n < n_max; ++n) {
    BlochEigenpair p;
    p.n = n;
    p.xi = xi;
    p.t = t;
    p.eigenvalue = std::max(evals[n], 0.0);
    p.omega = std::sqrt(p.eigenvalue);
    p.basis = op.basis;
    p.coeffs = evecs.col(n);
    // normalize in the L2 cell norm
    p.coeffs /= std::sqrt(op.basis->inner(p.coeffs, p.coeffs).real());
    p.gauge = apply_gauge(*op.basis, p.coeffs);

    Eigen::VectorXcd mc = identity ? Eigen::VectorXcd(p.coeffs) : Eigen::VectorXcd(op.mass * p.coeffs);
    Eigen::VectorXcd r = op.stiffness * p.coeffs - evals[n] * mc;
    // backward-stable floor of a dense Hermitian solver, scaled to this normalization
    double floor = 1e3 * eps * knorm / mnorm;
    if (p.eigenvalue > 0.0) {
      p.residual = r.norm() / (p.eigenvalue * mc.norm());
      floor /= p.eigenvalue;
    } else {
      p.residual = r.norm() / (knorm * mc.norm() / mnorm);
    }
    if (!(p.residual <= std::max(1e-8, floor))) bad << " n=" << n << " residual=" << p.residual;
    out.push_back(std::move(p));
  }
  if (!bad.str().empty()) fail(ErrorCode::non_convergence, "cell eigenpairs failed the residual check:" + bad.str());
  return out;
}

double omega_squared_xi(const BlochEigenpair& pair, const CellCoefficient& coeff) {
  const CellProfile profile = coeff.at(pair.t);
  return 2.0 * pair.basis->flux_moment(pair.coeffs, profile, pair.xi).imag();
}

GroupVelocity group_velocity_hf(const BlochEigenpair& pair, const CellCoefficient& coeff,
                                const DiscretizationOptions& opts) {
  GroupVelocity g;
  if (pair.omega >= 1e-10) {
    g.value = omega_squared_xi(pair, coeff) / (2.0 * pair.omega);
    return g;
  }
  // acoustic point: one-sided slope of Omega, stepping into the zone
  const double delta = 1e-4;
  const double step = (pair.xi + delta < kPi) ? delta : -delta;
  auto next = solve_bloch(coeff, pair.xi + step, pair.t, pair.n + 1, opts);
  g.value = (next[pair.n].omega - pair.omega) / step;
  g.fallback = true;
  return g;
}

BlochBranch::BlochBranch(CellCoefficient coeff, int n, int points, double t, DiscretizationOptions opts)
    : coeff_(std::move(coeff)), n_(n), t_(t), opts_(opts) {
  require(n >= 0, "branch index must be nonnegative");
  require(points >= 8, "branch grid needs at least 8 points");
  xi_.resize(points);
  omega_.resize(points);
  vg_.resize(points);
  fallback_.assign(points, false);
  for (int j = 0; j < points; ++j) {
    xi_[j] = -kPi + kTwoPi * j / points;
    auto pairs = solve_bloch(coeff_, xi_[j], t_, n + 1, opts_);
    pairs_.push_back(std::move(pairs[n]));
    omega_[j] = pairs_.back().omega;
    GroupVelocity g = group_velocity_hf(pairs_.back(), coeff_, opts_);
    vg_[j] = g.value;
    fallback_[j] = g.fallback;
  }

  // smooth stretches of the group velocity: split at an acoustic kink
  int split = -1;
  for (int j = 0; j < points; ++j)
    if (fallback_[j]) split = j;
  curv_.resize(points);
  one_sided_.assign(points, false);
  const double d = spacing();
  for (int j = 0; j < points; ++j) {
    int lo = 0, hi = points - 1;
    if (split >= 0) {
      if (j < split) hi = split - 1;
      else lo = split;
    }
    int start = std::clamp(j - 2, lo, std::max(lo, hi - 4));
    if (hi - lo < 4) {
      curv_[j] = std::numeric_limits<double>::quiet_NaN();
      one_sided_[j] = true;
      continue;
    }
    // five-point weights for offsets start-j .. start-j+4 (Lagrange derivative)
    double off[5], w[5];
    for (int k = 0; k < 5; ++k) off[k] = start + k - j;
    for (int k = 0; k < 5; ++k) {
      double denom = 1.0, num = 0.0;
      for (int m = 0; m < 5; ++m)
        if (m != k) denom *= (off[k] - off[m]);
      for (int m = 0; m < 5; ++m) {
        if (m == k) continue;
        double p = 1.0;
        for (int q = 0; q < 5; ++q)
          if (q != k && q != m) p *= (0.0 - off[q]);
        num += p;
      }
      w[k] = num / denom;
    }
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += w[k] * vg_[start + k];
    curv_[j] = s / d;
    one_sided_[j] = (start != j - 2);
  }
}

int BlochBranch::grid_index(double xi) const {
  double pos = (xi + kPi) / spacing();
  int j = static_cast<int>(std::lround(pos));
  if (j < 0 || j >= points() || std::abs(xi_[j] - xi) > 1e-12) return -1;
  return j;
}

Curvature curvature(const BlochBranch& branch, double xi) {
  int j = branch.grid_index(xi);
  if (j < 0) fail(ErrorCode::invalid_argument, "curvature: xi must be a grid point of the branch");
  return {branch.curvature_grid()[j], branch.one_sided()[j]};
}

void align_phase(const CellBasis& basis, const Eigen::VectorXcd& reference, Eigen::VectorXcd& v) {
  cd ov = basis.inner(v, reference);
  if (std::abs(ov) == 0.0) return;
  v *= std::conj(ov) / std::abs(ov);
}

OmegaDerivative eigenfunction_omega_derivative(const CellCoefficient& coeff, int n, double xi, double delta,
                                               double t, const DiscretizationOptions& opts) {
  require(delta > 0.0, "omega derivative: step must be positive");
  if (n == 0 && std::abs(xi) < 1e-3)
    fail(ErrorCode::degenerate, "omega derivative: acoustic point excluded (|xi| < 1e-3)");
  check_xi(xi - delta);
  check_xi(xi + delta);
  auto mid = solve_bloch(coeff, xi, t, n + 1, opts);
  auto lo = solve_bloch(coeff, xi - delta, t, n + 1, opts);
  auto hi = solve_bloch(coeff, xi + delta, t, n + 1, opts);
  const CellBasis& basis = *mid[n].basis;
  Eigen::VectorXcd up = hi[n].coeffs, um = lo[n].coeffs;
  align_phase(basis, mid[n].coeffs, up);
  align_phase(basis, mid[n].coeffs, um);
  OmegaDerivative d;
  d.delta_omega = hi[n].omega - lo[n].omega;
  if (std::abs(d.delta_omega) < 1e-8)
    fail(ErrorCode::flat_band, "flat-band derivative undefined: |dOmega| < 1e-8 at xi=" + std::to_string(xi));
  d.coeffs = (up - um) / d.delta_omega;
  d.basis = mid[n].basis;
  d.overlap = basis.inner(d.coeffs, mid[n].coeffs);
  return d;
}

OmegaDerivative eigenfunction_omega_derivative(const BlochBranch& branch, double xi) {
  return eigenfunction_omega_derivative(branch.coefficient(), branch.index(), xi, branch.spacing(), branch.time(),
                                        branch.options());
}

}  // namespace bwkb
