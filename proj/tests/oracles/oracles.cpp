#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

double layered_half_trace(const std::vector<Layer>& cell, double omega) {
  // state (u, a u')
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  for (const Layer& l : cell) {
    const double c = std::sqrt(l.a);
    double t00, t01, t10, t11;
    if (omega == 0.0) {
      t00 = 1, t01 = l.length / l.a, t10 = 0, t11 = 1;
    } else {
      const double k = omega / c, ph = k * l.length;
      t00 = std::cos(ph), t01 = std::sin(ph) / (l.a * k), t10 = -l.a * k * std::sin(ph), t11 = std::cos(ph);
    }
    const double n00 = t00 * m00 + t01 * m10, n01 = t00 * m01 + t01 * m11;
    const double n10 = t10 * m00 + t11 * m10, n11 = t10 * m01 + t11 * m11;
    m00 = n00, m01 = n01, m10 = n10, m11 = n11;
  }
  return 0.5 * (m00 + m11);
}

double fd_half_trace(const std::function<double(double)>& a, int nodes, double omega) {
  // a_{i+1/2} (u_{i+1} - u_i) - a_{i-1/2} (u_i - u_{i-1}) = -omega^2 h^2 u_i,
  // state (u_{i-1}, u_i) -> (u_i, u_{i+1})
  const double h = 1.0 / nodes, lam = omega * omega * h * h;
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  double a_prev = a(1.0 - 0.5 * h);
  for (int i = 0; i < nodes; ++i) {
    const double a_next = a((i + 0.5) * h);
    const double t00 = 0, t01 = 1, t10 = -a_prev / a_next, t11 = (a_prev + a_next - lam) / a_next;
    const double n00 = t00 * m00 + t01 * m10, n01 = t00 * m01 + t01 * m11;
    const double n10 = t10 * m00 + t11 * m10, n11 = t10 * m01 + t11 * m11;
    m00 = n00, m01 = n01, m10 = n10, m11 = n11;
    a_prev = a_next;
  }
  return 0.5 * (m00 + m11);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi), fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> bloch_frequencies(const std::function<double(double)>& half_trace, double xi, int count,
                                      double omega_step) {
  const double target = std::cos(xi);
  auto f = [&](double w) { return half_trace(w) - target; };
  std::vector<double> roots;
  double w0 = 0.0, f0 = f(w0);
  for (int step = 1; static_cast<int>(roots.size()) < count; ++step) {
    if (step > 100000000) throw std::runtime_error("bloch_frequencies: scan exhausted");
    const double w1 = step * omega_step, f1 = f(w1);
    if ((f0 > 0) != (f1 > 0)) roots.push_back(bisect(f, w0, w1));
    w0 = w1, f0 = f1;
  }
  return roots;
}

std::vector<std::pair<double, double>> band_intervals(const std::function<double(double)>& half_trace,
                                                      double omega_max, double omega_step) {
  auto excess = [&](double w) { return std::abs(half_trace(w)) - 1.0; };
  // signed versions keep bisection well defined at each crossing
  auto above = [&](double w) { return half_trace(w) - 1.0; };
  auto below = [&](double w) { return half_trace(w) + 1.0; };
  std::vector<std::pair<double, double>> bands;
  double lo = 0.0;
  bool inside = excess(0.0) <= 0.0;
  double w0 = 0.0, t0 = half_trace(0.0);
  for (double w1 = omega_step; w1 <= omega_max; w1 += omega_step) {
    const double t1 = half_trace(w1);
    const bool in1 = std::abs(t1) <= 1.0;
    if (in1 != inside) {
      // crossing of +1 or -1, whichever level the trace passes
      const bool at_plus = std::max(t0, t1) > 1.0;
      const double edge = at_plus ? bisect(above, w0, w1) : bisect(below, w0, w1);
      if (in1) {
        lo = edge;
      } else {
        bands.push_back({lo, edge});
      }
      inside = in1;
    }
    w0 = w1, t0 = t1;
  }
  return bands;
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

std::vector<double> finite_volume_advect(std::vector<double> q, double a, double b, double t_final,
                                         const std::function<double(std::size_t, double, double)>& velocity,
                                         double max_speed, double cfl) {
  const std::size_t n = q.size();
  const double dx = (b - a) / static_cast<double>(n);
  const long steps = static_cast<long>(std::ceil(t_final * max_speed / (cfl * dx)));
  const double dt = t_final / static_cast<double>(steps);
  std::vector<double> flux(n + 1), v(n + 1);
  auto rhs = [&](const std::vector<double>& c, double t, std::vector<double>& out) {
    for (std::size_t f = 0; f <= n; ++f) v[f] = velocity(f, a + static_cast<double>(f) * dx, t);
    auto cell = [&](long i) { return i < 0 || i >= static_cast<long>(n) ? 0.0 : c[static_cast<std::size_t>(i)]; };
    auto slope = [&](long i) { return minmod(cell(i) - cell(i - 1), cell(i + 1) - cell(i)); };
    for (std::size_t f = 0; f <= n; ++f) {
      const long left = static_cast<long>(f) - 1, right = static_cast<long>(f);
      const double ql = cell(left) + 0.5 * slope(left), qr = cell(right) - 0.5 * slope(right);
      flux[f] = v[f] >= 0 ? v[f] * ql : v[f] * qr;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = -(flux[i + 1] - flux[i]) / dx;
  };
  std::vector<double> k(n), stage(n);
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    rhs(q, t, k);
    for (std::size_t i = 0; i < n; ++i) stage[i] = q[i] + dt * k[i];
    rhs(stage, t + dt, k);
    for (std::size_t i = 0; i < n; ++i) q[i] = 0.5 * (q[i] + stage[i] + dt * k[i]);
    t += dt;
  }
  return q;
}

std::vector<double> dense_roots(const std::function<double(double)>& f, double lo, double hi, int points) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i < points; ++i) {
    const double x1 = lo + (hi - lo) * i / (points - 1), f1 = f(x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if ((f0 > 0) != (f1 > 0) && f1 != 0.0) roots.push_back(bisect(f, x0, x1, 1e-15));
    x0 = x1, f0 = f1;
  }
  if (f0 == 0.0) roots.push_back(x0);
  return roots;
}

}  // namespace oracle
