#include "bwkb/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "bwkb/error.hpp"

namespace bwkb {

TimeIntegrals integrate_in_time(const DispersionBranch& branch, double xi, double t) {
  TimeIntegrals r;
  if (!branch.time_dependent()) {
    BranchJet j = branch.jet(0.0, xi);
    r.omega = j.omega * t;
    r.omega_xi = j.omega_xi * t;
    r.omega_xixi = j.omega_xixi * t;
    return r;
  }
  const int intervals = 256;
  const double h = t / intervals;
  for (int i = 0; i <= intervals; ++i) {
    double w = (i == 0 || i == intervals) ? 1.0 : ((i % 2) ? 4.0 : 2.0);
    BranchJet j = branch.jet(i * h, xi);
    r.omega += w * j.omega;
    r.omega_xi += w * j.omega_xi;
    r.omega_xixi += w * j.omega_xixi;
  }
  r.omega *= h / 3;
  r.omega_xi *= h / 3;
  r.omega_xixi *= h / 3;
  return r;
}

CellBranch::CellBranch(std::shared_ptr<const BlochBranch> branch) : branch_(std::move(branch)) {
  for (double c : branch_->curvature_grid())
    if (std::isnan(c)) fail(ErrorCode::invalid_argument, "cell branch: curvature undefined on part of the grid");
}

CellBranch::CellBranch(const CellCoefficient& coeff, int n, int points, const DiscretizationOptions& opts)
    : CellBranch(std::make_shared<BlochBranch>(coeff, n, points, 0.0, opts)) {}

Jet CellBranch::node_jet(int j, bool left_limit) const {
  const auto& b = *branch_;
  Jet jet{b.omegas()[j], b.group_velocity()[j], b.curvature_grid()[j]};
  // acoustic kink: the stored slope is the right-hand limit
  if (left_limit && b.fallback()[j]) jet.d1 = -jet.d1;
  return jet;
}

BranchJet CellBranch::jet(double /*t*/, double xi) const {
  if (!(xi >= -kPi && xi < kPi)) fail(ErrorCode::out_of_range, "cell branch: xi outside [-pi, pi)");
  const auto& b = *branch_;
  const int n = b.points();
  const double d = b.spacing();
  int j = std::clamp(static_cast<int>(std::floor((xi + kPi) / d)), 0, n - 1);
  double x0 = b.xi_grid()[j];
  Jet left = node_jet(j, false);
  Jet right = node_jet((j + 1) % n, true);
  Jet v = quintic_hermite(x0, left, x0 + d, right, xi);
  return {v.value, v.d1, v.d2};
}

Eigen::VectorXcd CellBranch::mode_coefficients(double xi) const {
  if (!(xi >= -kPi && xi < kPi)) fail(ErrorCode::out_of_range, "cell branch: xi outside [-pi, pi)");
  const auto& b = *branch_;
  const int n = b.points();
  const double d = b.spacing();
  int j = static_cast<int>(std::floor((xi + kPi) / d));
  int start = std::clamp(j - 1, 0, n - 4);  // cubic stencil, kept inside the zone
  const BlochEigenpair& ref = b.pair(std::clamp(j, 0, n - 1));
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(ref.coeffs.size());
  for (int k = 0; k < 4; ++k) {
    double w = 1.0;
    for (int m = 0; m < 4; ++m)
      if (m != k) w *= (xi - b.xi_grid()[start + m]) / (b.xi_grid()[start + k] - b.xi_grid()[start + m]);
    c += w * b.pair(start + k).coeffs;
  }
  c /= std::sqrt(ref.basis->inner(c, c).real());
  return c;
}

void CellBranch::mode_values(double /*t*/, double xi, std::span<const double> ys, std::complex<double>* out) const {
  Eigen::VectorXcd c = mode_coefficients(xi);
  const CellBasis& basis = *branch_->pair(0).basis;
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = basis.value(c, ys[i]);
}

std::string CellBranch::describe() const {
  return "cell branch n=" + std::to_string(branch_->index()) + " on " + std::to_string(branch_->points()) +
         " quasimomenta (" + branch_->pair(0).basis->name() + ")";
}

TimeDependentCellBranch::TimeDependentCellBranch(const CellCoefficient& coeff, int n, int points,
                                                 const DiscretizationOptions& opts)
    : stamps_(coeff.stamps()) {
  for (std::size_t i = 0; i < coeff.profiles().size(); ++i) {
    CellCoefficient single(coeff.profiles()[i]);
    branches_.push_back(std::make_shared<CellBranch>(single, n, points, opts));
  }
}

std::pair<std::size_t, double> TimeDependentCellBranch::locate(double t) const {
  if (stamps_.size() == 1 || t <= stamps_.front()) return {0, 0.0};
  if (t >= stamps_.back()) return {stamps_.size() - 2, 1.0};
  std::size_t i = std::upper_bound(stamps_.begin(), stamps_.end(), t) - stamps_.begin() - 1;
  return {i, (t - stamps_[i]) / (stamps_[i + 1] - stamps_[i])};
}

BranchJet TimeDependentCellBranch::jet(double t, double xi) const {
  if (branches_.size() == 1) return branches_[0]->jet(0.0, xi);
  auto [i, w] = locate(t);
  BranchJet a = branches_[i]->jet(0.0, xi), b = branches_[i + 1]->jet(0.0, xi);
  return {(1 - w) * a.omega + w * b.omega, (1 - w) * a.omega_xi + w * b.omega_xi,
          (1 - w) * a.omega_xixi + w * b.omega_xixi};
}

double TimeDependentCellBranch::omega_t(double t, double xi) const {
  if (branches_.size() == 1 || t < stamps_.front() || t > stamps_.back()) return 0.0;
  auto [i, w] = locate(t);
  (void)w;
  return (branches_[i + 1]->omega(0.0, xi) - branches_[i]->omega(0.0, xi)) / (stamps_[i + 1] - stamps_[i]);
}

void TimeDependentCellBranch::mode_values(double t, double xi, std::span<const double> ys,
                                          std::complex<double>* out) const {
  if (branches_.size() == 1) return branches_[0]->mode_values(0.0, xi, ys, out);
  auto [i, w] = locate(t);
  std::vector<std::complex<double>> a(ys.size()), b(ys.size());
  branches_[i]->mode_values(0.0, xi, ys, a.data());
  branches_[i + 1]->mode_values(0.0, xi, ys, b.data());
  for (std::size_t k = 0; k < ys.size(); ++k) out[k] = (1 - w) * a[k] + w * b[k];
}

std::string TimeDependentCellBranch::describe() const {
  return "time-dependent " + branches_[0]->describe() + " with " + std::to_string(stamps_.size()) + " stamps";
}

TabulatedBranch::TabulatedBranch(std::shared_ptr<const DispersionBranch> source, double xi_lo, double xi_hi,
                                 int points)
    : source_(std::move(source)), lo_(xi_lo), hi_(xi_hi) {
  require(!source_->time_dependent(), "tabulated branch needs a time-independent source");
  require(points >= 2 && xi_hi > xi_lo, "tabulated branch: invalid grid");
  require(xi_lo >= -kPi && xi_hi <= kPi, "tabulated branch: grid must lie in [-pi, pi]");
  step_ = (hi_ - lo_) / (points - 1);
  for (int i = 0; i < points; ++i) {
    double xi = (i + 1 == points) ? hi_ : lo_ + i * step_;
    if (xi >= kPi) xi = std::nextafter(kPi, 0.0);
    BranchJet j = source_->jet(0.0, xi);
    nodes_.push_back({j.omega, j.omega_xi, j.omega_xixi});
  }
}

BranchJet TabulatedBranch::jet(double /*t*/, double xi) const {
  if (!(xi >= lo_ && xi <= hi_)) fail(ErrorCode::out_of_range, "tabulated branch: xi outside the tabulated range");
  int i = std::clamp(static_cast<int>((xi - lo_) / step_), 0, static_cast<int>(nodes_.size()) - 2);
  double x0 = lo_ + i * step_;
  Jet v = quintic_hermite(x0, nodes_[i], x0 + step_, nodes_[i + 1], xi);
  return {v.value, v.d1, v.d2};
}

void TabulatedBranch::mode_values(double t, double xi, std::span<const double> ys, std::complex<double>* out) const {
  source_->mode_values(t, xi, ys, out);
}

std::string TabulatedBranch::describe() const {
  return "tabulated (" + std::to_string(nodes_.size()) + " nodes) " + source_->describe();
}

}  // namespace bwkb
