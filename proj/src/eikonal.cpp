#include "bwkb/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, "cannot parse " + what + " from '" + text + "'");
  }
}

void check_zone(double xi, double sigma) {
  if (!(xi >= -kPi && xi < kPi)) {
    std::ostringstream os;
    os << "kappa - g'(sigma) = " << xi << " leaves [-pi, pi) at sigma=" << sigma << " (no wrapping)";
    fail(ErrorCode::out_of_range, os.str());
  }
}

}  // namespace

InitialPhase InitialPhase::zero() { return InitialPhase(); }

InitialPhase InitialPhase::linear(double slope) {
  InitialPhase g;
  g.kind_ = Kind::linear;
  g.c_ = slope;
  return g;
}

InitialPhase InitialPhase::quadratic(double c2) {
  InitialPhase g;
  g.kind_ = Kind::quadratic;
  g.c_ = c2;
  return g;
}

InitialPhase InitialPhase::sampled(std::vector<double> sigma, std::vector<double> values) {
  InitialPhase g;
  g.kind_ = Kind::sampled;
  g.spline_ = CubicSpline(std::move(sigma), std::move(values));
  return g;
}

InitialPhase InitialPhase::parse(const std::string& spec) {
  if (spec == "zero") return zero();
  if (spec.rfind("linear:", 0) == 0) return linear(parse_double(spec.substr(7), "linear phase slope"));
  if (spec.rfind("quad:", 0) == 0) return quadratic(parse_double(spec.substr(5), "quadratic phase coefficient"));
  std::ifstream in(spec);
  if (!in) fail(ErrorCode::io, "initial phase: cannot open '" + spec + "'");
  std::vector<double> s, g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) {
      if (s.empty()) continue;  // header
      fail(ErrorCode::schema, spec + ":" + std::to_string(lineno) + ": expected 'sigma,g'");
    }
    s.push_back(a);
    g.push_back(b);
  }
  return sampled(std::move(s), std::move(g));
}

Jet InitialPhase::operator()(double sigma) const {
  switch (kind_) {
    case Kind::zero: return {};
    case Kind::linear: return {c_ * sigma, c_, 0.0};
    case Kind::quadratic: return {c_ * sigma * sigma, 2.0 * c_ * sigma, 2.0 * c_};
    case Kind::sampled:
      if (sigma < spline_.lo() || sigma > spline_.hi())
        fail(ErrorCode::out_of_range, "initial phase evaluated outside its sampled range");
      return spline_(sigma);
  }
  return {};
}

double InitialPhase::lo() const { return kind_ == Kind::sampled ? spline_.lo() : -kInf; }
double InitialPhase::hi() const { return kind_ == Kind::sampled ? spline_.hi() : kInf; }

std::string InitialPhase::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::zero: os << "zero"; break;
    case Kind::linear: os << "linear:" << c_; break;
    case Kind::quadratic: os << "quad:" << c_; break;
    case Kind::sampled: os << "sampled[" << spline_.lo() << "," << spline_.hi() << "]"; break;
  }
  return os.str();
}

double InitialPhase::consistency_error() const {
  if (kind_ != Kind::sampled) return 0.0;
  const int n = 2000;
  const double h = 1e-5 * std::max(1.0, spline_.hi() - spline_.lo());
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    double s = spline_.lo() + (spline_.hi() - spline_.lo()) * i / n;
    if (s - h < spline_.lo() || s + h > spline_.hi()) continue;
    double cd = (spline_(s + h).value - spline_(s - h).value) / (2 * h);
    worst = std::max(worst, std::abs(cd - spline_(s).d1));
  }
  return worst;
}

void validate_phase_state(const PhaseState& s) {
  require(s.sign == 1 || s.sign == -1, "phase state: sign must be +1 or -1");
  require(s.branch != nullptr, "phase state: branch missing");
  if (!(s.kappa >= -kPi && s.kappa < kPi)) fail(ErrorCode::out_of_range, "phase state: kappa outside [-pi, pi)");
  double e = s.g.consistency_error();
  if (e > 1e-6)
    fail(ErrorCode::invalid_argument, "initial phase: g and g' inconsistent (error " + std::to_string(e) + ")");
}

CharacteristicPoint characteristic_point(const PhaseState& s, double sigma, double t) {
  const Jet g = s.g(sigma);
  CharacteristicPoint p;
  p.xi = s.kappa - g.d1;
  check_zone(p.xi, sigma);
  const TimeIntegrals ti = integrate_in_time(*s.branch, p.xi, t);
  p.x = sigma + s.sign * ti.omega_xi;
  p.phase = g.value + s.sign * (g.d1 * ti.omega_xi + ti.omega);
  p.jacobian = 1.0 - s.sign * g.d2 * ti.omega_xixi;
  return p;
}

namespace {

struct PathState {
  double x, phase, curv_int, log_rho;
};

PathState rhs(const PhaseState& s, const Jet& g, double xi, double t, const PathState& y) {
  const BranchJet j = s.branch->jet(t, xi);
  const double jac = 1.0 - s.sign * g.d2 * y.curv_int;
  if (jac <= 0.0) fail(ErrorCode::caustic, "characteristic crossing: dx/dsigma reached zero along the path");
  if (j.omega <= 0.0) fail(ErrorCode::degenerate, "transport exponent undefined at Omega = 0");
  PathState d;
  d.x = s.sign * j.omega_xi;
  d.phase = s.sign * (g.d1 * j.omega_xi + j.omega);
  d.curv_int = j.omega_xixi;
  d.log_rho = s.sign * j.omega_xixi * g.d2 / jac - s.branch->omega_t(t, xi) / j.omega;
  return d;
}

PathState axpy(const PathState& y, double h, const PathState& d) {
  return {y.x + h * d.x, y.phase + h * d.phase, y.curv_int + h * d.curv_int, y.log_rho + h * d.log_rho};
}

std::vector<PathState> integrate_path(const PhaseState& s, const Jet& g, double xi, double sigma0, double t_final,
                                      int steps) {
  std::vector<PathState> out;
  PathState y{sigma0, g.value, 0.0, 0.0};
  out.push_back(y);
  const double h = t_final / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    PathState k1 = rhs(s, g, xi, t, y);
    PathState k2 = rhs(s, g, xi, t + h / 2, axpy(y, h / 2, k1));
    PathState k3 = rhs(s, g, xi, t + h / 2, axpy(y, h / 2, k2));
    PathState k4 = rhs(s, g, xi, t + h, axpy(y, h, k3));
    y.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    y.phase += h / 6 * (k1.phase + 2 * k2.phase + 2 * k3.phase + k4.phase);
    y.curv_int += h / 6 * (k1.curv_int + 2 * k2.curv_int + 2 * k3.curv_int + k4.curv_int);
    y.log_rho += h / 6 * (k1.log_rho + 2 * k2.log_rho + 2 * k3.log_rho + k4.log_rho);
    out.push_back(y);
  }
  return out;
}

// derivative of samples on a uniform grid: fourth order inside, second at the ends
std::vector<double> differentiate(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (v[1] - v[0]) / h;
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) d[i] = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12 * h);
    else if (i == 0) d[i] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
    else if (i + 1 == n) d[i] = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * h);
    else d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
  }
  return d;
}

}  // namespace

CharacteristicPath trace_characteristic(const PhaseState& s, double sigma0, double t_final, double dt,
                                        const std::function<double(double)>& u0_init) {
  validate_phase_state(s);
  require(t_final > 0.0, "trace_characteristic: t_final must be positive");
  require(dt > 0.0, "trace_characteristic: dt must be positive");
  const Jet g = s.g(sigma0);
  CharacteristicPath path;
  path.sigma0 = sigma0;
  path.xi = s.kappa - g.d1;
  check_zone(path.xi, sigma0);

  int steps = std::max(1, static_cast<int>(std::ceil(t_final / dt - 1e-9)));
  std::vector<PathState> coarse;
  for (int refine = 0;; ++refine) {
    coarse = integrate_path(s, g, path.xi, sigma0, t_final, steps);
    auto fine = integrate_path(s, g, path.xi, sigma0, t_final, 2 * steps);
    path.step_change = std::max(std::abs(coarse.back().x - fine.back().x), std::abs(coarse.back().phase - fine.back().phase));
    if (path.step_change < 1e-9) break;
    if (refine == 12) fail(ErrorCode::non_convergence, "characteristic integrator: step halving did not converge");
    steps *= 2;
  }
  path.step = t_final / steps;
  const double u0 = u0_init ? u0_init(sigma0) : 1.0;
  require(u0 >= 0.0, "initial amplitude must be nonnegative");

  // phase slope measured across the neighbouring characteristics
  double hs = 1e-5 * std::max(1.0, std::abs(sigma0));
  double sl = sigma0 - hs, sr = sigma0 + hs;
  if (sl < s.g.lo()) sl = sigma0;
  if (sr > s.g.hi()) sr = sigma0;

  for (int k = 0; k <= steps; ++k) {
    const double t = k * path.step;
    path.times.push_back(t);
    path.x.push_back(coarse[k].x);
    path.phase.push_back(coarse[k].phase);
    path.amplitude.push_back(u0 * std::exp(0.5 * coarse[k].log_rho));
    CharacteristicPoint a = characteristic_point(s, sl, t), b = characteristic_point(s, sr, t);
    path.phase_slope.push_back((b.phase - a.phase) / (b.x - a.x));
  }
  const auto vx = differentiate(path.x, path.step);
  const auto vp = differentiate(path.phase, path.step);
  for (int k = 0; k <= steps; ++k) {
    const BranchJet j = s.branch->jet(path.times[k], path.xi);
    path.slope_drift = std::max(path.slope_drift, std::abs(path.phase_slope[k] - path.phase_slope[0]));
    path.velocity_error = std::max(path.velocity_error, std::abs(vx[k] - s.sign * j.omega_xi));
    path.phase_rate_error = std::max(path.phase_rate_error,
                                     std::abs(vp[k] - s.sign * (path.phase_slope[k] * j.omega_xi + j.omega)));
  }
  return path;
}

std::pair<double, double> admissible_sigma(const PhaseState& s) {
  switch (s.g.kind()) {
    case InitialPhase::Kind::zero:
    case InitialPhase::Kind::linear: return {-kInf, kInf};
    case InitialPhase::Kind::quadratic: {
      const double c2 = s.g(1.0).d2 / 2.0;
      if (c2 == 0.0) return {-kInf, kInf};
      // xi = kappa - 2 c2 sigma in [-pi, pi)
      double a = (s.kappa - kPi) / (2 * c2), b = (s.kappa + kPi) / (2 * c2);
      auto inside = [&](double sg) {
        const double xi = s.kappa - 2 * c2 * sg;
        return xi >= -kPi && xi < kPi;
      };
      // step off the excluded end, then pull the closed end in if rounding left it outside
      while (!inside(a)) a = std::nextafter(a, b);
      while (!inside(b)) b = std::nextafter(b, a);
      return c2 > 0 ? std::pair{a, b} : std::pair{b, a};
    }
    case InitialPhase::Kind::sampled: {
      const double lo = s.g.lo(), hi = s.g.hi();
      for (int i = 0; i <= 4096; ++i) {
        double sg = lo + (hi - lo) * i / 4096;
        check_zone(s.kappa - s.g(sg).d1, sg);
      }
      return {lo, hi};
    }
  }
  return {-kInf, kInf};
}

CharacteristicMap::CharacteristicMap(const PhaseState& s, double t, int samples) : state_(s), t_(t) {
  validate_phase_state(s);
  require(samples >= 3, "characteristic map needs at least 3 samples");
  std::tie(lo_, hi_) = admissible_sigma(s);
  if (!s.g.curved() || t == 0.0) return;
  for (int i = 0; i < samples; ++i) {
    double sg = lo_ + (hi_ - lo_) * i / (samples - 1);
    CharacteristicPoint p = characteristic_point(s, sg, t);
    sigma_.push_back(sg);
    x_.push_back(p.x);
    jac_.push_back(p.jacobian);
  }
}

PhaseValue CharacteristicMap::at(double x) const {
  const PhaseState& s = state_;
  PhaseValue v;
  if (t_ == 0.0) {
    Jet g = s.g(x);
    return {g.value, g.d1, x, 1.0};
  }
  if (!s.g.curved()) {
    const Jet g0 = s.g(0.0);
    const double xi = s.kappa - g0.d1;
    check_zone(xi, x);
    const TimeIntegrals ti = integrate_in_time(*s.branch, xi, t_);
    v.sigma = x - s.sign * ti.omega_xi;
    v.phase = g0.d1 * v.sigma + s.sign * (g0.d1 * ti.omega_xi + ti.omega);
    v.phase_x = g0.d1;
    v.jacobian = 1.0;
    return v;
  }
  std::vector<std::size_t> brackets;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i)
    if ((x_[i] - x) * (x_[i + 1] - x) <= 0.0 && !(brackets.size() && brackets.back() == i - 1 && x_[i] == x))
      brackets.push_back(i);
  if (brackets.empty()) {
    std::ostringstream os;
    os << "phase field: x=" << x << " is not reached by any admissible characteristic at t=" << t_;
    fail(ErrorCode::out_of_range, os.str());
  }
  const std::size_t i = brackets.front();
  if (brackets.size() > 1 || jac_[i] <= 0.0 || jac_[i + 1] <= 0.0) {
    double a = kInf, b = -kInf;
    for (std::size_t k = 0; k < jac_.size(); ++k)
      if (jac_[k] <= 0.0) {
        a = std::min(a, sigma_[k]);
        b = std::max(b, sigma_[k]);
      }
    std::ostringstream os;
    os << "characteristic crossing at t=" << t_ << ": x=" << x << " has " << brackets.size()
       << " preimages; folding interval sigma in [" << a << ", " << b << "]";
    fail(ErrorCode::caustic, os.str());
  }
  auto f = [&](double sg) { return characteristic_point(s, sg, t_).x - x; };
  v.sigma = find_root(f, sigma_[i], sigma_[i + 1], 1e-15);
  CharacteristicPoint p = characteristic_point(s, v.sigma, t_);
  v.phase = p.phase;
  v.phase_x = s.g(v.sigma).d1;
  v.jacobian = p.jacobian;
  return v;
}

PhaseValue phase_field(const PhaseState& s, double t, double x) { return CharacteristicMap(s, t).at(x); }

namespace {

// Newton inversion of x(t; sigma) = x from a nearby launch point
double invert_near(const PhaseState& s, double t, double x, double sigma) {
  double best = sigma, best_res = kInf;
  for (int it = 0; it < 50; ++it) {
    CharacteristicPoint p = characteristic_point(s, sigma, t);
    const double res = std::abs(p.x - x);
    if (res < best_res) best = sigma, best_res = res;
    double step = (p.x - x) / p.jacobian;
    sigma -= step;
    if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(sigma))) return sigma;
  }
  // x(t; sigma) carries rounding noise of a few ulps of the branch evaluation
  if (best_res <= 1e-11 * std::max(1.0, std::abs(x))) return best;
  fail(ErrorCode::non_convergence, "characteristic inversion did not converge");
}

double phase_at(const PhaseState& s, double t, double x, double sigma_guess) {
  if (t == 0.0) return s.g(x).value;
  return characteristic_point(s, invert_near(s, t, x, sigma_guess), t).phase;
}

}  // namespace

double amplitude_field(const PhaseState& s, double t, double x, const std::function<double(double)>& u0_init,
                       TransportForm form) {
  require(static_cast<bool>(u0_init), "amplitude_field: initial amplitude required");
  require(t >= 0.0, "amplitude_field: t must be nonnegative");
  if (t == 0.0) {
    double u = u0_init(x);
    require(u >= 0.0, "initial amplitude must be nonnegative");
    return u;
  }
  const PhaseValue pv = phase_field(s, t, x);
  const Jet g = s.g(pv.sigma);
  const double xi = s.kappa - g.d1;
  const DispersionBranch& br = *s.branch;
  auto curv_int = [&](double tau) {
    if (!br.time_dependent()) return br.omega_xixi(0.0, xi) * tau;
    if (tau == 0.0) return 0.0;
    return simpson([&](double q) { return br.omega_xixi(q, xi); }, 0.0, tau, 64);
  };

  double exponent = 0.0;
  if (form == TransportForm::psi) {
    auto psi = [&](double tau) {
      BranchJet j = br.jet(tau, xi);
      if (j.omega <= 0.0) fail(ErrorCode::degenerate, "transport exponent undefined at Omega = 0");
      double jac = 1.0 - s.sign * g.d2 * curv_int(tau);
      return s.sign * j.omega_xixi * g.d2 / jac - br.omega_t(tau, xi) / j.omega;
    };
    if (g.d2 != 0.0 || br.time_dependent()) exponent = adaptive_simpson(psi, 0.0, t, 1e-12);
  } else {
    const double h = 1e-3 * std::max(t, 1e-3);
    auto integrand = [&](double tau) {
      BranchJet j = br.jet(tau, xi);
      if (std::abs(j.omega_xi) < 1e-8)
        fail(ErrorCode::degenerate, "degenerate transport exponent: Omega_xi vanishes on the path");
      CharacteristicPoint p = characteristic_point(s, pv.sigma, tau);
      // phi_tt at fixed x by second differences
      double t0 = std::max(tau - h, 0.0);
      double f0 = phase_at(s, t0, p.x, pv.sigma), f1 = phase_at(s, t0 + h, p.x, pv.sigma),
             f2 = phase_at(s, t0 + 2 * h, p.x, pv.sigma);
      double phi_tt = (f0 - 2 * f1 + f2) / (h * h);
      double w = j.omega_xixi / (j.omega_xi * j.omega_xi);
      double om_t = br.omega_t(tau, xi);
      return s.sign * w * phi_tt - s.sign * w * om_t - om_t / j.omega;
    };
    exponent = adaptive_simpson(integrand, 0.0, t, 1e-9, 20);
  }
  const double u = u0_init(pv.sigma);
  require(u >= 0.0, "initial amplitude must be nonnegative");
  return u * std::exp(0.5 * exponent);
}

SolvabilityReport verify_solvability_constants(const CellCoefficient& coeff, int n, double xi, double delta,
                                               const DiscretizationOptions& opts) {
  SolvabilityReport r;
  r.xi = xi;
  r.n = n;
  auto mid = solve_bloch(coeff, xi, 0.0, n + 1, opts);
  auto lo = solve_bloch(coeff, xi - delta, 0.0, n + 1, opts);
  auto hi = solve_bloch(coeff, xi + delta, 0.0, n + 1, opts);
  r.hf = omega_squared_xi(mid[n], coeff);
  r.fd = (hi[n].eigenvalue - lo[n].eigenvalue) / (2 * delta);
  r.hf_relative = std::abs(r.hf - r.fd) / std::max(std::abs(r.fd), 1e-300);
  OmegaDerivative d = eigenfunction_omega_derivative(coeff, n, xi, delta, 0.0, opts);
  r.overlap_real = std::abs(d.overlap.real());
  r.g1 = d.overlap.imag();
  r.g1_imag = -d.overlap.real();
  return r;
}

SolvabilityReport verify_solvability_constants(const BlochBranch& branch, double xi) {
  return verify_solvability_constants(branch.coefficient(), branch.index(), xi, 1e-4, branch.options());
}

}  // namespace bwkb
