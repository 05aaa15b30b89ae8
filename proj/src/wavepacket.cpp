#include "bwkb/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

namespace {

using cd = std::complex<double>;

double gaussian(double s, double w) { return std::exp(-0.5 * (s / w) * (s / w)); }

}  // namespace

double GaussianEnvelope::operator()(double x, double kappa) const {
  auto hump = [&](double centre) {
    double d = kappa - centre;
    return std::abs(d) <= cutoff * kappa_width ? gaussian(d, kappa_width) : 0.0;
  };
  double k = hump(kappa_star);
  if (mirrored) k += hump(-kappa_star);
  double xs = x_width > 0.0 ? gaussian(x - x_center, x_width) : 1.0;
  return amplitude * k * xs;
}

double GaussianEnvelope::kappa_lo() const {
  double lo = kappa_star - cutoff * kappa_width;
  if (mirrored) lo = std::min(lo, -kappa_star - cutoff * kappa_width);
  return std::max(lo, -kPi);
}

double GaussianEnvelope::kappa_hi() const {
  double hi = kappa_star + cutoff * kappa_width;
  if (mirrored) hi = std::max(hi, -kappa_star + cutoff * kappa_width);
  return std::min(hi, kPi);
}

PacketSpec PacketSpec::smooth(const GaussianEnvelope& env, double epsilon, int sign,
                              std::shared_ptr<const DispersionBranch> branch) {
  PacketSpec s;
  s.kind = Kind::smooth;
  s.envelope = env;
  s.kappa_lo = env.kappa_lo();
  s.kappa_hi = env.kappa_hi();
  s.kappa_star = env.kappa_star;
  s.epsilon = epsilon;
  s.sign = sign;
  s.branch = std::move(branch);
  s.validate();
  return s;
}

PacketSpec PacketSpec::delta(double kappa_star, std::function<double(double)> f, double epsilon, int sign,
                             std::shared_ptr<const DispersionBranch> branch) {
  PacketSpec s;
  s.kind = Kind::delta;
  s.kappa_star = kappa_star;
  s.amplitude = std::move(f);
  s.epsilon = epsilon;
  s.sign = sign;
  s.branch = std::move(branch);
  s.validate();
  return s;
}

void PacketSpec::validate() const {
  require(epsilon > 0.0 && std::isfinite(epsilon), "packet: epsilon must be positive");
  require(sign == 1 || sign == -1, "packet: sign must be +1 or -1");
  require(branch != nullptr, "packet: branch missing");
  if (kind == Kind::smooth) {
    require(static_cast<bool>(envelope), "packet: smooth envelope missing");
    require(kappa_lo < kappa_hi && kappa_lo >= -kPi && kappa_hi <= kPi, "packet: envelope support must lie in [-pi, pi]");
  } else {
    require(static_cast<bool>(amplitude), "packet: delta amplitude f missing");
    if (!(kappa_star > -kPi && kappa_star < kPi))
      fail(ErrorCode::out_of_range, "packet: kappa_star must be interior to the zone");
    if (std::abs(branch->omega_xixi(0.0, kappa_star)) < 1e-8)
      fail(ErrorCode::degenerate, "packet: |Omega''(kappa_star)| < 1e-8");
  }
}

CellGrid CellGrid::window(double epsilon, double a, double b, int nodes_per_cell) {
  require(epsilon > 0.0, "cell grid: epsilon must be positive");
  require(a < b, "cell grid: empty window");
  require(nodes_per_cell >= 1, "cell grid: need at least one node per cell");
  CellGrid g;
  g.epsilon = epsilon;
  for (int j = 0; j < nodes_per_cell; ++j) g.y.push_back(static_cast<double>(j) / nodes_per_cell);
  g.m_lo = static_cast<long>(std::floor(a / epsilon));
  g.m_hi = static_cast<long>(std::ceil(b / epsilon)) - 1;
  return g;
}

CellGrid CellGrid::point(double epsilon, double x) {
  require(epsilon > 0.0, "cell grid: epsilon must be positive");
  CellGrid g;
  g.epsilon = epsilon;
  double m = std::floor(x / epsilon);
  g.y = {x / epsilon - m};
  g.m_lo = g.m_hi = static_cast<long>(m);
  return g;
}

double CellGrid::x(std::size_t i) const { return epsilon * cell_coordinate(i); }

std::vector<double> CellGrid::xs() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
  return out;
}

StationaryScanner::StationaryScanner(std::shared_ptr<const DispersionBranch> branch, double t, int sign, int points,
                                     double kappa_lo, double kappa_hi)
    : branch_(std::move(branch)), t_(t), sign_(sign) {
  require(t > 0.0, "stationary points: t must be positive");
  require(points >= 8, "stationary points: scan needs at least 8 points");
  for (int i = 0; i <= points; ++i) {
    double k = kappa_lo + (kappa_hi - kappa_lo) * i / points;
    if (i == points && kappa_hi >= kPi) k = std::nextafter(kPi, 0.0);
    kappa_.push_back(k);
    drift_.push_back(drift_of(k));
  }
}

double StationaryScanner::drift_of(double kappa) const {
  return sign_ * integrate_in_time(*branch_, kappa, t_).omega_xi;
}

std::vector<StationaryPoint> StationaryScanner::find(double x) const {
  std::vector<StationaryPoint> out;
  const double scale = 1.0 + std::abs(x);
  auto add = [&](double k) {
    if (!out.empty() && std::abs(out.back().kappa - k) < 1e-12) return;
    StationaryPoint p;
    p.kappa = k;
    p.curvature_integral = integrate_in_time(*branch_, k, t_).omega_xixi;
    p.degenerate = std::abs(p.curvature_integral) < 1e-6;
    out.push_back(p);
  };
  for (std::size_t i = 0; i < kappa_.size(); ++i) {
    double fi = drift_[i] - x;
    if (std::abs(fi) <= 1e-13 * scale) {
      add(kappa_[i]);
      continue;
    }
    if (i + 1 == kappa_.size()) break;
    double fj = drift_[i + 1] - x;
    if (fi * fj < 0.0 && std::abs(fj) > 1e-13 * scale) {
      auto f = [&](double k) { return drift_of(k) - x; };
      double k = find_root(f, kappa_[i], kappa_[i + 1], 1e-15);
      // a jump in the drift (acoustic kink) is not a root
      if (std::abs(f(k)) <= 1e-9 * scale) add(k);
    }
  }
  return out;
}

std::vector<StationaryPoint> stationary_points(double x, double t, std::shared_ptr<const DispersionBranch> branch,
                                               int sign) {
  return StationaryScanner(std::move(branch), t, sign).find(x);
}

const char* method_name(ReconstructionMethod m) {
  switch (m) {
    case ReconstructionMethod::stationary_phase: return "stationary-phase";
    case ReconstructionMethod::quadrature: return "quadrature";
    case ReconstructionMethod::delta_pulse: return "delta-pulse";
  }
  return "?";
}

namespace {

double amplitude_ratio(const DispersionBranch& br, double t, double kappa) {
  if (!br.time_dependent()) return 1.0;
  return std::sqrt(br.omega(0.0, kappa) / br.omega(t, kappa));
}

}  // namespace

ReconstructedField reconstruct_stationary_phase(const PacketSpec& spec, const CellGrid& grid, double t) {
  spec.validate();
  require(spec.kind == PacketSpec::Kind::smooth, "stationary phase: smooth envelope required");
  require(t > 0.0, "stationary phase: t must be positive");
  const DispersionBranch& br = *spec.branch;
  const double eps = spec.epsilon;
  StationaryScanner scan(spec.branch, t, spec.sign);
  ReconstructedField out;
  out.grid = grid;
  out.t = t;
  out.method = ReconstructionMethod::stationary_phase;
  const std::size_t n = grid.size();
  out.values.assign(n, 0.0);
  out.points.resize(n);
  out.negligible.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    out.points[i] = scan.find(x);
    out.negligible[i] = out.points[i].empty();
    cd sum = 0.0;
    for (const StationaryPoint& p : out.points[i]) {
      const TimeIntegrals ti = integrate_in_time(br, p.kappa, t);
      const double amp = spec.envelope(x - spec.sign * ti.omega_xi, p.kappa);
      if (amp == 0.0) continue;
      if (p.degenerate) {
        std::ostringstream os;
        os << "Airy-regime point: degenerate stationary point kappa=" << p.kappa << " at x=" << x << ", t=" << t;
        fail(ErrorCode::degenerate, os.str());
      }
      const double phi2 = -spec.sign * p.curvature_integral;
      const double pref = std::sqrt(kTwoPi * eps / std::abs(phi2));
      const cd mode = br.mode_value(t, p.kappa, grid.cell_coordinate(i));
      const double phase = (p.kappa * grid.cell_coordinate(i)) - spec.sign * ti.omega / eps +
                           0.25 * kPi * (phi2 > 0 ? 1.0 : -1.0);
      sum += amp * amplitude_ratio(br, t, p.kappa) * pref * mode * std::polar(1.0, phase);
    }
    out.values[i] = sum;
  }
  return out;
}

cd reconstruct_stationary_phase(const PacketSpec& spec, double x, double t) {
  return reconstruct_stationary_phase(spec, CellGrid::point(spec.epsilon, x), t).values[0];
}

namespace {

// kappa-integral over GK15 panels; factor(kappa) multiplies the integrand
ReconstructedField quadrature_field(const PacketSpec& spec, const CellGrid& grid, double t,
                                    const QuadratureOptions& opts, const std::function<cd(double)>& factor) {
  spec.validate();
  require(spec.kind == PacketSpec::Kind::smooth, "quadrature: smooth envelope required");
  require(t >= 0.0, "quadrature: t must be nonnegative");
  const DispersionBranch& br = *spec.branch;
  const double eps = spec.epsilon;
  const double lo = spec.kappa_lo, hi = std::min(spec.kappa_hi, std::nextafter(kPi, 0.0));
  const double width = kTwoPi * eps / opts.panels_per_unit_scale;
  long panels = std::max(1L, static_cast<long>(std::ceil((hi - lo) / width)));
  ReconstructedField out;
  out.grid = grid;
  out.t = t;
  out.method = ReconstructionMethod::quadrature;
  if (panels > opts.max_panels) {
    panels = opts.max_panels;
    out.accuracy_warning = true;
  }
  const std::size_t n = grid.size(), ny = grid.y.size();
  out.values.assign(n, 0.0);
  out.error_estimate.assign(n, 0.0);
  out.negligible.assign(n, false);
  const KronrodRule& rule = gauss_kronrod15();
  const double h = (hi - lo) / panels;
  std::vector<cd> modes(ny), kron(n), gauss(n);
  std::vector<double> env(n);
  for (long p = 0; p < panels; ++p) {
    const double a = lo + h * p;
    std::fill(kron.begin(), kron.end(), 0.0);
    std::fill(gauss.begin(), gauss.end(), 0.0);
    bool any = false;
    for (int q = 0; q < 15; ++q) {
      const double kappa = a + 0.5 * h * (rule.nodes[q] + 1.0);
      const TimeIntegrals ti = integrate_in_time(br, kappa, t);
      const double shift = spec.sign * ti.omega_xi;
      bool live = false;
      for (std::size_t i = 0; i < n; ++i) {
        env[i] = spec.envelope(grid.x(i) - shift, kappa);
        live = live || env[i] != 0.0;
      }
      if (!live) continue;
      any = true;
      br.mode_values(t, kappa, grid.y, modes.data());
      const cd common = 0.5 * h * amplitude_ratio(br, t, kappa) * factor(kappa) *
                        std::polar(1.0, -spec.sign * ti.omega / eps);
      for (std::size_t i = 0; i < n; ++i) {
        if (env[i] == 0.0) continue;
        const cd term = common * env[i] * modes[i % ny] * std::polar(1.0, kappa * grid.cell_coordinate(i));
        kron[i] += rule.kronrod_weights[q] * term;
        gauss[i] += rule.gauss_weights[q] * term;
      }
    }
    if (!any) continue;
    for (std::size_t i = 0; i < n; ++i) {
      out.values[i] += kron[i];
      out.error_estimate[i] += std::abs(kron[i] - gauss[i]);
    }
  }
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, std::abs(out.values[i]));
    worst = std::max(worst, out.error_estimate[i]);
  }
  if (worst > opts.warn_tolerance * std::max(peak, 1e-300) && peak > 0.0) out.accuracy_warning = true;
  if (out.accuracy_warning) {
    std::ostringstream os;
    os << "quadrature accuracy warning: " << panels << " panels, estimated error " << worst << " (field max " << peak
       << ")";
    out.warning = os.str();
  }
  return out;
}

}  // namespace

ReconstructedField reconstruct_quadrature(const PacketSpec& spec, const CellGrid& grid, double t,
                                          const QuadratureOptions& opts) {
  return quadrature_field(spec, grid, t, opts, [](double) { return cd(1.0); });
}

cd reconstruct_quadrature(const PacketSpec& spec, double x, double t) {
  return reconstruct_quadrature(spec, CellGrid::point(spec.epsilon, x), t).values[0];
}

ReconstructedField reconstruct_symmetrized(const PacketSpec& spec, const CellGrid& grid, double t,
                                           const QuadratureOptions& opts) {
  PacketSpec other = spec;
  other.sign = -spec.sign;
  ReconstructedField a = reconstruct_quadrature(spec, grid, t, opts);
  ReconstructedField b = reconstruct_quadrature(other, grid, t, opts);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    a.values[i] = 0.5 * (a.values[i] + b.values[i]);
    a.error_estimate[i] = 0.5 * (a.error_estimate[i] + b.error_estimate[i]);
  }
  a.accuracy_warning = a.accuracy_warning || b.accuracy_warning;
  if (a.warning.empty()) a.warning = b.warning;
  return a;
}

std::vector<cd> quadrature_time_derivative(const PacketSpec& spec, const CellGrid& grid,
                                           const QuadratureOptions& opts) {
  const DispersionBranch& br = *spec.branch;
  const double eps = spec.epsilon;
  auto factor = [&](double kappa) { return cd(0.0, -spec.sign * br.omega(0.0, kappa) / eps); };
  return quadrature_field(spec, grid, 0.0, opts, factor).values;
}

DeltaPulse delta_pulse_field(const PacketSpec& spec, double t, const CellGrid& grid, double width) {
  spec.validate();
  require(spec.kind == PacketSpec::Kind::delta, "delta pulse: delta envelope required");
  require(t > 0.0, "delta pulse: t must be positive");
  if (width == 0.0) width = 4.0 * spec.epsilon;
  require(width > 0.0, "delta pulse: mollification width must be positive");
  const DispersionBranch& br = *spec.branch;
  const BranchJet j = br.jet(0.0, spec.kappa_star);
  DeltaPulse out;
  out.width = width;
  out.center = spec.sign * j.omega_xi * t;
  out.prefactor = spec.amplitude(0.0) / std::sqrt(t * std::abs(j.omega_xixi));
  const double phi2 = -spec.sign * j.omega_xixi;
  const double eps = spec.epsilon;
  out.field.grid = grid;
  out.field.t = t;
  out.field.method = ReconstructionMethod::delta_pulse;
  const std::size_t n = grid.size(), ny = grid.y.size();
  std::vector<cd> modes(ny);
  br.mode_values(t, spec.kappa_star, grid.y, modes.data());
  out.field.values.resize(n);
  out.field.negligible.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double s = x - out.center;
    const double mollifier = gaussian(s, width) / (std::sqrt(kTwoPi) * width);
    const double phase = spec.kappa_star * grid.cell_coordinate(i) - spec.sign * j.omega * t / eps +
                         0.25 * kPi * (phi2 > 0 ? 1.0 : -1.0);
    out.field.values[i] = out.prefactor * mollifier * modes[i % ny] * std::polar(1.0, phase);
  }
  return out;
}

std::vector<cd> gelfand_transform(const CellGrid& grid, std::span<const cd> u, double kappa) {
  require(u.size() == grid.size(), "gelfand transform: sample count does not match the grid");
  const std::size_t ny = grid.y.size();
  std::vector<cd> g(ny, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) g[i % ny] += u[i] * std::polar(1.0, -kappa * grid.cell_coordinate(i));
  for (cd& v : g) v /= kTwoPi;
  return g;
}

double l2_norm(std::span<const cd> v) {
  double s = 0.0;
  for (const cd& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double l2_distance(std::span<const cd> a, std::span<const cd> b) {
  require(a.size() == b.size(), "l2 distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace bwkb
