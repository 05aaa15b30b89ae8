#include "bwkb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bwkb/error.hpp"

namespace bwkb {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::flat_band: return "flat_band";
    case ErrorCode::band_gap_query: return "band_gap_query";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::caustic: return "caustic";
    case ErrorCode::instability: return "instability";
    case ErrorCode::io: return "io";
    case ErrorCode::schema: return "schema";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::validation_failed: return "validation_failed";
  }
  return "unknown";
}

namespace {

// Legendre P_n and its derivative at x.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  require(n >= 1, "gauss_legendre: n must be positive");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

QuadratureRule gauss_lobatto(int p) {
  require(p >= 1, "gauss_lobatto: order must be positive");
  QuadratureRule r;
  r.nodes.assign(p + 1, 0.0);
  r.weights.assign(p + 1, 0.0);
  r.nodes[0] = -1.0;
  r.nodes[p] = 1.0;
  // interior nodes: roots of P_p'
  for (int i = 1; i < p; ++i) {
    double x = -std::cos(kPi * i / p);
    for (int it = 0; it < 100; ++it) {
      // P_p'' from the Legendre ODE: (1-x^2)P'' = 2xP' - p(p+1)P
      auto [lp, dp] = legendre(p, x);
      double d2 = (2.0 * x * dp - p * (p + 1.0) * lp) / (1.0 - x * x);
      double dx = dp / d2;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
  }
  for (int i = 0; i <= p; ++i) {
    double lp = legendre(p, r.nodes[i]).first;
    r.weights[i] = 2.0 / (p * (p + 1.0) * lp * lp);
  }
  return r;
}

const KronrodRule& gauss_kronrod15() {
  static const KronrodRule rule = [] {
    KronrodRule k{};
    const double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    const double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    for (int i = 0; i < 7; ++i) {
      k.nodes[i] = -xgk[i];
      k.nodes[14 - i] = xgk[i];
      k.kronrod_weights[i] = k.kronrod_weights[14 - i] = wgk[i];
      // Gauss nodes are the odd-indexed Kronrod abscissae
      double g = (i % 2 == 1) ? wg[i / 2] : 0.0;
      k.gauss_weights[i] = k.gauss_weights[14 - i] = g;
    }
    k.nodes[7] = 0.0;
    k.kronrod_weights[7] = wgk[7];
    k.gauss_weights[7] = wg[3];
    return k;
  }();
  return rule;
}

std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
  }
  return w;
}

double bisect(const ScalarFn& f, double a, double b, double xtol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) fail(ErrorCode::non_convergence, "bisect: interval does not bracket a root");
  for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double find_root(const ScalarFn& f, double a, double b, double xtol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) fail(ErrorCode::non_convergence, "find_root: interval does not bracket a root");
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, d = b - a;
  bool bisected = true;
  for (int it = 0; it < max_iter; ++it) {
    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    double lo = (3 * a + b) / 4;
    bool out = !((s > std::min(lo, b) && s < std::max(lo, b)));
    double tol = std::max(xtol, 4 * std::numeric_limits<double>::epsilon() * std::abs(b));
    if (out || (bisected && std::abs(s - b) >= std::abs(b - c) / 2) ||
        (!bisected && std::abs(s - b) >= std::abs(c - d) / 2) || (bisected && std::abs(b - c) < tol) ||
        (!bisected && std::abs(c - d) < tol)) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }
    double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if ((fa > 0) != (fs > 0)) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
    if (fb == 0.0 || std::abs(b - a) <= tol) return b;
  }
  return b;
}

namespace {

double simpson_step(const ScalarFn& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  // start from a few panels so that narrow features are not missed
  const int panels = 8;
  double h = (b - a) / panels, sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h, x1 = (i + 1 == panels) ? b : a + (i + 1) * h;
    double f0 = f(x0), f1 = f(x1), fm = f(0.5 * (x0 + x1));
    double whole = (x1 - x0) / 6 * (f0 + 4 * fm + f1);
    sum += simpson_step(f, x0, x1, f0, fm, f1, whole, tol / panels, max_depth);
  }
  return sum;
}

double simpson(const ScalarFn& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

Jet quintic_hermite(double x0, const Jet& left, double x1, const Jet& right, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  // basis on [0,1]
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h00 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h10 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h20 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double h01 = 10 * s3 - 15 * s4 + 6 * s5;
  const double h11 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h21 = 0.5 * (s3 - 2 * s4 + s5);
  const double d00 = -30 * s2 + 60 * s3 - 30 * s4;
  const double d10 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double d20 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  const double d01 = -d00;
  const double d11 = -12 * s2 + 28 * s3 - 15 * s4;
  const double d21 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
  const double e00 = -60 * s + 180 * s2 - 120 * s3;
  const double e10 = -36 * s + 96 * s2 - 60 * s3;
  const double e20 = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
  const double e01 = -e00;
  const double e11 = -24 * s + 84 * s2 - 60 * s3;
  const double e21 = 0.5 * (6 * s - 24 * s2 + 20 * s3);
  Jet out;
  out.value = h00 * left.value + h * h10 * left.d1 + h * h * h20 * left.d2 + h01 * right.value +
              h * h11 * right.d1 + h * h * h21 * right.d2;
  out.d1 = (d00 * left.value + d01 * right.value) / h + d10 * left.d1 + d11 * right.d1 +
           h * (d20 * left.d2 + d21 * right.d2);
  out.d2 = (e00 * left.value + e01 * right.value) / (h * h) + (e10 * left.d1 + e11 * right.d1) / h +
           e20 * left.d2 + e21 * right.d2;
  return out;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  require(n >= 3 && y_.size() == n, "CubicSpline: need at least 3 matching points");
  for (std::size_t i = 1; i < n; ++i) require(x_[i] > x_[i - 1], "CubicSpline: abscissae must increase");
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  // tridiagonal solve for natural spline
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    double rhs = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    double diag = 2.0 * (hl + hr) - hl * c[i - 1];
    c[i] = hr / diag;
    d[i] = (rhs - hl * d[i - 1]) / diag;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

Jet CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
  i = std::clamp<std::size_t>(i, 1, n - 1);
  const double x0 = x_[i - 1], x1 = x_[i], h = x1 - x0;
  const double a = (x1 - x) / h, b = (x - x0) / h;
  Jet j;
  j.value = a * y_[i - 1] + b * y_[i] + ((a * a * a - a) * m_[i - 1] + (b * b * b - b) * m_[i]) * h * h / 6.0;
  j.d1 = (y_[i] - y_[i - 1]) / h + (-(3 * a * a - 1) * m_[i - 1] + (3 * b * b - 1) * m_[i]) * h / 6.0;
  j.d2 = a * m_[i - 1] + b * m_[i];
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace bwkb
