#include "bwkb/high_contrast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

namespace {

struct Coeffs {
  double b;  // (1-h)/sqrt(a2)
  double c;  // h/(2 sqrt(a2))
};

Coeffs coeffs(const HighContrastMedium& m) {
  const double r = std::sqrt(m.a2);
  return {(1.0 - m.h) / r, m.h / (2.0 * r)};
}

double sign_pow(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

void check_kappa(double kappa) {
  if (!(kappa >= -kPi && kappa < kPi)) fail(ErrorCode::out_of_range, "quasimomentum outside [-pi, pi)");
}

}  // namespace

void HighContrastMedium::validate() const {
  if (!(h > 0.0 && h < 1.0)) fail(ErrorCode::invalid_argument, "high-contrast medium: h must lie in (0, 1)");
  if (!(std::isfinite(a2) && a2 > 0.0)) fail(ErrorCode::invalid_argument, "high-contrast medium: a2 must be positive");
}

double hc_dispersion_function(double omega, const HighContrastMedium& m) {
  const Coeffs k = coeffs(m);
  return std::cos(k.b * omega) - k.c * omega * std::sin(k.b * omega);
}

Jet hc_dispersion_jet(double omega, const HighContrastMedium& m) {
  const Coeffs k = coeffs(m);
  const double s = std::sin(k.b * omega), c = std::cos(k.b * omega);
  Jet j;
  j.value = c - k.c * omega * s;
  j.d1 = -(k.b + k.c) * s - k.c * k.b * omega * c;
  j.d2 = -(k.b * k.b + 2.0 * k.c * k.b) * c + k.c * k.b * k.b * omega * s;
  return j;
}

double hc_dispersion_residual(double omega, double kappa, const HighContrastMedium& m) {
  return hc_dispersion_function(omega, m) - std::cos(kappa);
}

double hc_scan_step(const HighContrastMedium& m) { return kPi * std::sqrt(m.a2) / (128.0 * (1.0 - m.h)); }

std::vector<BandInterval> hc_band_edges_upto(int n_max, const HighContrastMedium& m) {
  m.validate();
  require(n_max >= 0, "band index must be nonnegative");
  const double step = hc_scan_step(m);
  const double ceiling = (n_max + 2.0) * kPi * std::sqrt(m.a2) / (1.0 - m.h) + 1.0;
  auto f = [&](double w) { return hc_dispersion_function(w, m); };
  auto edge = [&](double a, double b) {
    // the crossing is through +1 or -1: pick by the out-of-band endpoint
    double fa = f(a), fb = f(b);
    double target = (std::abs(fa) > std::abs(fb) ? fa : fb) > 0 ? 1.0 : -1.0;
    auto g = [&](double w) { return f(w) - target; };
    return find_root(g, a, b, 1e-15);
  };

  std::vector<BandInterval> bands;
  bool inside = true;  // f(0) = 1
  double lo = 0.0;
  double prev = 0.0;
  for (long k = 1;; ++k) {
    const double w = k * step;
    if (w > ceiling) {
      std::ostringstream os;
      os << "band " << n_max << " not found below scan ceiling " << ceiling;
      fail(ErrorCode::out_of_range, os.str());
    }
    const bool now = std::abs(f(w)) - 1.0 <= 0.0;
    if (now != inside) {
      const double e = edge(prev, w);
      if (inside) {
        bands.push_back({lo, e});
        if (static_cast<int>(bands.size()) > n_max) return bands;
      } else {
        lo = e;
      }
      inside = now;
    }
    prev = w;
  }
}

BandInterval hc_band_edges(int n, const HighContrastMedium& m) { return hc_band_edges_upto(n, m).at(n); }

HCBandPoint hc_solve_in_band(int n, double kappa, const BandInterval& band, const HighContrastMedium& m) {
  check_kappa(kappa);
  const double target = std::cos(kappa);
  auto g = [&](double w) { return hc_dispersion_function(w, m) - target; };
  const double ga = g(band.lo), gb = g(band.hi);
  HCBandPoint p;
  p.n = n;
  p.kappa = kappa;
  // kappa = 0 or -pi puts the root on a band edge, where rounding can hide the sign change
  const double edge_tol = 1e-13;
  if (std::abs(ga) <= edge_tol || std::abs(gb) <= edge_tol) {
    p.omega = std::abs(ga) <= std::abs(gb) ? band.lo : band.hi;
    p.residual = std::abs(g(p.omega));
    return p;
  }
  if ((ga > 0 && gb > 0) || (ga < 0 && gb < 0)) {
    std::ostringstream os;
    os << "band-gap query: no root of f(W) = cos(kappa) in band " << n << " [" << band.lo << ", " << band.hi
       << "] for kappa=" << kappa;
    fail(ErrorCode::band_gap_query, os.str());
  }
  double w = find_root(g, band.lo, band.hi, 1e-15);
  // Newton polish, kept inside the band
  for (int it = 0; it < 3; ++it) {
    Jet j = hc_dispersion_jet(w, m);
    if (j.d1 == 0.0) break;
    double next = w - (j.value - target) / j.d1;
    if (!(next >= band.lo && next <= band.hi)) break;
    if (std::abs(g(next)) >= std::abs(g(w))) break;
    w = next;
  }
  p.omega = w;
  p.residual = std::abs(g(w));
  if (p.residual > 1e-12) {
    std::ostringstream os;
    os << "dispersion root residual " << p.residual << " exceeds 1e-12 (n=" << n << ", kappa=" << kappa << ")";
    fail(ErrorCode::non_convergence, os.str());
  }
  return p;
}

HCBandPoint hc_solve_branch(int n, double kappa, const HighContrastMedium& m) {
  return hc_solve_in_band(n, kappa, hc_band_edges(n, m), m);
}

BranchJet hc_branch_jet(const HCBandPoint& p, const HighContrastMedium& m) {
  Jet f = hc_dispersion_jet(p.omega, m);
  BranchJet j;
  j.omega = p.omega;
  if (std::abs(f.d1) < 1e-12) {
    if (p.n == 0 && p.omega < 1e-6) {
      // acoustic start of band 0: f ~ 1 + f''(0) W^2 / 2
      j.omega_xi = (p.kappa >= 0 ? 1.0 : -1.0) / std::sqrt(-f.d2);
      j.omega_xixi = 0.0;
      return j;
    }
    fail(ErrorCode::degenerate, "dispersion function is stationary at the root");
  }
  j.omega_xi = -std::sin(p.kappa) / f.d1;
  j.omega_xixi = (-std::cos(p.kappa) - f.d2 * j.omega_xi * j.omega_xi) / f.d1;
  return j;
}

BranchJet hc_band_asymptotics(int n, double kappa, const HighContrastMedium& m) {
  m.validate();
  if (n < 1) fail(ErrorCode::unsupported, "band asymptotics are defined for n >= 1 only");
  const double r = std::sqrt(m.a2);
  const double scale = 2.0 * r / (n * kPi * m.h);
  const double x = 1.0 + sign_pow(n + 1) * std::cos(kappa);
  return {r * n * kPi / (1.0 - m.h) + scale * x, sign_pow(n) * scale * std::sin(kappa),
          sign_pow(n) * scale * std::cos(kappa)};
}

double hc_sine_factor(const HCBandPoint& p, const HighContrastMedium& m) {
  return std::sin(coeffs(m).b * p.omega);
}

double hc_sine_factor_asymptotic(int n, double kappa, const HighContrastMedium& m) {
  if (n < 1) fail(ErrorCode::unsupported, "sine-factor asymptotics are defined for n >= 1 only");
  return sign_pow(n) * 2.0 * (1.0 - m.h) / (n * kPi * m.h) * (1.0 + sign_pow(n + 1) * std::cos(kappa));
}

double hc_normalizer(const HCBandPoint& p, const HighContrastMedium& m) {
  const double k = p.omega / std::sqrt(m.a2);
  const double len = 1.0 - m.h;
  const double s = std::sin(k * len);
  double soft;
  if (k * len < 1e-4) {
    // series of the two-sine integrals, avoids cancellation
    const double l3 = len * len * len;
    soft = k * k * l3 * (2.0 / 3.0) + std::cos(p.kappa) * k * k * l3 / 3.0;
  } else {
    soft = len - std::sin(2.0 * k * len) / (2.0 * k) + std::cos(p.kappa) * (s / k - len * std::cos(k * len));
  }
  const double norm_sq = m.h * s * s + soft;
  if (!(norm_sq >= 1e-28))
    fail(ErrorCode::degenerate, "limit eigenfunction vanishes identically (normalization < 1e-14)");
  return std::sqrt(norm_sq);
}

double hc_normalizer_asymptotic(int n, double kappa, const HighContrastMedium& m) {
  return std::sqrt((1.0 - m.h) * (1.0 + sign_pow(n + 1) * std::cos(kappa)));
}

namespace {

std::complex<double> raw_mode(double y, const HCBandPoint& p, const HighContrastMedium& m) {
  y -= std::floor(y);
  const double k = p.omega / std::sqrt(m.a2);
  if (y <= m.h) return std::sin(k * (1.0 - m.h)) * std::polar(1.0, -p.kappa * y);
  return std::sin(k * (1.0 - y)) * std::polar(1.0, -p.kappa * y) +
         std::sin(k * (y - m.h)) * std::polar(1.0, p.kappa * (1.0 - y));
}

// |bracket| on the soft part, in the phase-free form
double bracket_abs(double y, const HCBandPoint& p, const HighContrastMedium& m) {
  const double k = p.omega / std::sqrt(m.a2);
  const double a = std::sin(k * (1.0 - y)), b = std::sin(k * (y - m.h));
  return std::sqrt(std::max(0.0, a * a + b * b + 2.0 * a * b * std::cos(p.kappa)));
}

}  // namespace

std::complex<double> hc_eigenfunction(double y, const HCBandPoint& p, const HighContrastMedium& m, bool conjugate) {
  std::complex<double> v = raw_mode(y, p, m) / hc_normalizer(p, m);
  return conjugate ? std::conj(v) : v;
}

double hc_soft_bracket_max(const HCBandPoint& p, const HighContrastMedium& m) {
  const int samples = 4096;
  const double len = 1.0 - m.h;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= samples; ++i) {
    double v = bracket_abs(m.h + len * i / samples, p, m);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  // golden-section refinement around the best sample
  double a = m.h + len * std::max(0, best - 1) / samples;
  double b = m.h + len * std::min(samples, best + 1) / samples;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    if (bracket_abs(c, p, m) > bracket_abs(d, p, m)) b = d;
    else a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return std::max(best_v, bracket_abs(0.5 * (a + b), p, m));
}

HCPulseAmplitudes hc_pulse_amplitudes(int n, double kappa_star, const HighContrastMedium& m, double t, double f0) {
  m.validate();
  require(t > 0.0, "pulse amplitudes: t must be positive");
  require(n >= 1, "pulse amplitudes: n must be at least 1");
  const double ck = std::cos(kappa_star);
  if (std::abs(ck) < 1e-8) fail(ErrorCode::degenerate, "degenerate stationary phase: cos(kappa*) ~ 0");
  HCPulseAmplitudes r;
  r.point = hc_solve_branch(n, kappa_star, m);
  r.curvature = hc_branch_jet(r.point, m).omega_xixi;
  const double x = 1.0 + sign_pow(n + 1) * ck;
  const double base = std::abs(f0) * std::pow(m.a2, -0.25);
  const double nph = n * kPi * m.h;
  const double bmax = hc_soft_bracket_max(r.point, m);
  r.stiff = base * std::sqrt(2.0 * (1.0 - m.h) * x / (t * nph * std::abs(ck)));
  r.soft_prefactor = x > 0.0 ? base * std::sqrt(nph / (2.0 * t * std::abs(ck) * x))
                             : std::numeric_limits<double>::infinity();
  r.soft_max = r.soft_prefactor * bmax;
  r.ratio = r.stiff / r.soft_max;
  r.ratio_formula = 2.0 * (1.0 - m.h) / nph;
  const double amp = std::abs(f0) / std::sqrt(t * std::abs(r.curvature));
  const double cnorm = hc_normalizer(r.point, m);
  r.stiff_exact = amp * std::abs(hc_sine_factor(r.point, m)) / cnorm;
  r.soft_max_exact = amp * bmax / cnorm;
  r.ratio_exact = std::abs(hc_sine_factor(r.point, m)) / bmax;
  r.ratio_leading = r.ratio_formula * std::sqrt(x / 2.0);
  return r;
}

HighContrastBranch::HighContrastBranch(int n, HighContrastMedium m) : n_(n), m_(m) {
  m_.validate();
  band_ = hc_band_edges(n, m_);
}

HCBandPoint HighContrastBranch::point(double kappa) const { return hc_solve_in_band(n_, kappa, band_, m_); }

BranchJet HighContrastBranch::jet(double /*t*/, double xi) const { return hc_branch_jet(point(xi), m_); }

void HighContrastBranch::mode_values(double /*t*/, double xi, std::span<const double> ys,
                                     std::complex<double>* out) const {
  HCBandPoint p = point(xi);
  const double c = hc_normalizer(p, m_);
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = raw_mode(ys[i], p, m_) / c;
}

std::string HighContrastBranch::describe() const {
  std::ostringstream os;
  os << "high-contrast limit branch n=" << n_ << " (h=" << m_.h << ", a2=" << m_.a2 << ")";
  return os.str();
}

}  // namespace bwkb
