#include "bwkb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

namespace {

PhaseState state_for(const PhaseFamily& f, double kappa) {
  PhaseState s;
  s.sign = f.sign;
  s.g = f.g;
  s.kappa = kappa;
  s.branch = f.branch;
  return s;
}

double slope(const PhaseFamily& f) { return f.g.curved() ? 0.0 : f.g(0.0).d1; }

double zone_xi(double kappa, double c) {
  double xi = kappa - c;
  if (!(xi >= -kPi && xi < kPi)) fail(ErrorCode::out_of_range, "phase family: kappa - phi_x leaves [-pi, pi)");
  return xi;
}

}  // namespace

double PhaseFamily::phase(double x, double t, double kappa) const {
  if (!g.curved()) {
    const double c = slope(*this);
    return c * x + sign * integrate_in_time(*branch, zone_xi(kappa, c), t).omega;
  }
  return phase_field(state_for(*this, kappa), t, x).phase;
}

double PhaseFamily::phase_x(double x, double t, double kappa) const {
  if (!g.curved()) return slope(*this);
  return phase_field(state_for(*this, kappa), t, x).phase_x;
}

double PhaseFamily::phase_t(double x, double t, double kappa) const {
  const double h = 1e-4 * std::max(1.0, t);
  if (t >= h) return (phase(x, t + h, kappa) - phase(x, t - h, kappa)) / (2 * h);
  return (-3 * phase(x, t, kappa) + 4 * phase(x, t + h, kappa) - phase(x, t + 2 * h, kappa)) / (2 * h);
}

double PhaseFamily::phase_kappa(double x, double t, double kappa) const {
  if (!g.curved()) return sign * integrate_in_time(*branch, zone_xi(kappa, slope(*this)), t).omega_xi;
  const double h = 1e-5;
  return (phase(x, t, kappa + h) - phase(x, t, kappa - h)) / (2 * h);
}

double PhaseFamily::phase_kappa_kappa(double x, double t, double kappa) const {
  if (!g.curved()) return sign * integrate_in_time(*branch, zone_xi(kappa, slope(*this)), t).omega_xixi;
  const double h = 1e-3;
  return (phase_kappa(x, t, kappa + h) - phase_kappa(x, t, kappa - h)) / (2 * h);
}

std::vector<double> PhaseFamily::stationary(double x, double t, int scan) const {
  std::vector<double> roots;
  auto f = [&](double k) { return phase_kappa(x, t, k) - x; };
  const double hi = std::min(kappa_hi, std::nextafter(kPi, 0.0));
  double ka = kappa_lo, fa = f(ka);
  if (fa == 0.0) roots.push_back(ka);
  for (int i = 1; i <= scan; ++i) {
    double kb = kappa_lo + (hi - kappa_lo) * i / scan, fb = f(kb);
    if (fb == 0.0) roots.push_back(kb);
    else if (fa * fb < 0.0) {
      double k = find_root(f, ka, kb, 1e-15);
      if (std::abs(f(k)) <= 1e-9 * (1.0 + std::abs(x))) roots.push_back(k);
    }
    ka = kb;
    fa = fb;
  }
  return roots;
}

double PhaseFamily::position(double t, double kappa) const {
  if (!g.curved()) return phase_kappa(0.0, t, kappa);
  double x = 0.0;
  for (int it = 0; it < 200; ++it) {
    double next = phase_kappa(x, t, kappa);
    if (std::abs(next - x) < 1e-12 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  fail(ErrorCode::non_convergence, "phase family: characteristic position did not converge");
}

LocalWaveData local_fields(const PhaseFamily& family, const std::vector<double>& xs, const std::vector<double>& ts) {
  require(family.branch != nullptr, "local fields: branch missing");
  LocalWaveData d;
  d.xs = xs;
  d.ts = ts;
  const std::size_t n = xs.size() * ts.size();
  d.kappa_hat.assign(n, 0.0);
  d.k_hat.assign(n, 0.0);
  d.omega_hat.assign(n, 0.0);
  d.valid.assign(n, false);
  for (std::size_t it = 0; it < ts.size(); ++it) {
    require(ts[it] > 0.0, "local fields: times must be positive");
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const std::size_t k = d.index(it, ix);
      auto roots = family.stationary(xs[ix], ts[it]);
      if (roots.size() != 1) {
        ++d.excluded;
        continue;
      }
      const double kh = roots[0];
      d.kappa_hat[k] = kh;
      d.k_hat[k] = kh - family.phase_x(xs[ix], ts[it], kh);
      d.omega_hat[k] = -family.phase_t(xs[ix], ts[it], kh);
      d.valid[k] = true;
      d.dispersion_residual = std::max(
          d.dispersion_residual, std::abs(d.omega_hat[k] + family.sign * family.branch->omega(ts[it], d.k_hat[k])));
    }
  }
  return d;
}

namespace {

double uniform_step(const std::vector<double>& v) {
  require(v.size() >= 3, "residuals: need at least 3 grid points per axis");
  const double h = (v.back() - v.front()) / (v.size() - 1);
  for (std::size_t i = 1; i < v.size(); ++i)
    require(std::abs(v[i] - v[i - 1] - h) <= 1e-9 * std::abs(h), "residuals: grid must be uniform");
  return h;
}

// derivative of field at index i along a line with stride; nullopt-like flag when neighbours are invalid
bool derivative(const LocalWaveData& d, const std::vector<double>& field, std::size_t base, std::size_t stride,
                std::size_t i, std::size_t count, double h, int order, double& out) {
  auto ok = [&](long j) { return j >= 0 && j < long(count) && d.valid[base + j * stride]; };
  auto at = [&](long j) { return field[base + j * stride]; };
  const long c = static_cast<long>(i);
  if (order == 4) {
    if (!(ok(c - 2) && ok(c - 1) && ok(c + 1) && ok(c + 2))) return false;
    out = (-at(c + 2) + 8 * at(c + 1) - 8 * at(c - 1) + at(c - 2)) / (12 * h);
    return true;
  }
  if (!(ok(c - 1) && ok(c + 1))) return false;
  out = (at(c + 1) - at(c - 1)) / (2 * h);
  return true;
}

}  // namespace

TransportResiduals transport_residuals(const LocalWaveData& d, const PhaseFamily& family, int order) {
  require(order == 2 || order == 4, "residuals: order must be 2 or 4");
  const double hx = uniform_step(d.xs), ht = uniform_step(d.ts);
  const std::size_t nx = d.xs.size(), nt = d.ts.size();
  TransportResiduals r;
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = d.index(it, ix);
      if (!d.valid[k]) continue;
      double kt, kx, wt, wx;
      if (!derivative(d, d.kappa_hat, d.index(0, ix), nx, it, nt, ht, order, kt)) continue;
      if (!derivative(d, d.kappa_hat, d.index(it, 0), 1, ix, nx, hx, order, kx)) continue;
      derivative(d, d.k_hat, d.index(0, ix), nx, it, nt, ht, order, wt);
      derivative(d, d.k_hat, d.index(it, 0), 1, ix, nx, hx, order, wx);
      const double v = family.sign * family.branch->omega_xi(d.ts[it], d.k_hat[k]);
      r.r_kappa = std::max(r.r_kappa, std::abs(kt + kx * v));
      r.r_k = std::max(r.r_k, std::abs(wt + wx * v));
      ++r.points;
    }
  return r;
}

double energy_density(const PhaseFamily& family, const AmplitudeFn& amp, double x, double t, double kappa_hat,
                      const CellAverageFn& cell_average) {
  const double a = amp(x, t, kappa_hat);
  const double k = kappa_hat - family.phase_x(x, t, kappa_hat);
  const double f = cell_average ? cell_average(t, k) : 1.0;
  const double curv = family.phase_kappa_kappa(x, t, kappa_hat);
  if (curv == 0.0) fail(ErrorCode::degenerate, "energy density: phi_kappa_kappa vanishes");
  return a * a * f / std::abs(curv);
}

double energy_flux_check(const LocalWaveData& d, const PhaseFamily& family, const AmplitudeFn& amp, int order,
                         const CellAverageFn& cell_average) {
  require(order == 2 || order == 4, "energy flux: order must be 2 or 4");
  const double hx = uniform_step(d.xs), ht = uniform_step(d.ts);
  const std::size_t nx = d.xs.size(), nt = d.ts.size();
  std::vector<double> e(d.valid.size(), 0.0), f(d.valid.size(), 0.0);
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = d.index(it, ix);
      if (!d.valid[k]) continue;
      e[k] = energy_density(family, amp, d.xs[ix], d.ts[it], d.kappa_hat[k], cell_average);
      f[k] = family.sign * family.branch->omega_xi(d.ts[it], d.k_hat[k]) * e[k];
    }
  double worst = 0.0;
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double et, fx;
      if (!d.valid[d.index(it, ix)]) continue;
      if (!derivative(d, e, d.index(0, ix), nx, it, nt, ht, order, et)) continue;
      if (!derivative(d, f, d.index(it, 0), 1, ix, nx, hx, order, fx)) continue;
      worst = std::max(worst, std::abs(et + fx));
    }
  return worst;
}

namespace {

void check_endpoints(EnergySeries& s, double kappa1, double kappa2) {
  require(kappa1 < kappa2, "energy: kappa1 < kappa2 required");
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double gap = s.x2[i] - s.x1[i];
    const double first = s.x2[0] - s.x1[0];
    if (gap == 0.0 || (gap > 0) != (first > 0)) {
      std::ostringstream os;
      os << "endpoint characteristics cross at t=" << s.t[i];
      fail(ErrorCode::caustic, os.str());
    }
  }
}

void finish_drift(EnergySeries& s) {
  for (double q : s.q)
    if (s.q[0] != 0.0) s.max_relative_drift = std::max(s.max_relative_drift, std::abs(q - s.q[0]) / std::abs(s.q[0]));
}

}  // namespace

EnergySeries energy_between_characteristics_asymptotic(const PhaseFamily& family, const AmplitudeFn& amp,
                                                       double kappa1, double kappa2, const std::vector<double>& ts,
                                                       const CellAverageFn& cell_average) {
  EnergySeries s;
  for (double t : ts) {
    require(t > 0.0, "energy: times must be positive");
    s.t.push_back(t);
    s.x1.push_back(family.position(t, kappa1));
    s.x2.push_back(family.position(t, kappa2));
  }
  check_endpoints(s, kappa1, kappa2);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double t = s.t[i];
    const double a = std::min(s.x1[i], s.x2[i]), b = std::max(s.x1[i], s.x2[i]);
    auto density = [&](double x) {
      auto f = [&](double k) { return family.phase_kappa(x, t, k) - x; };
      const double kh = find_root(f, kappa1, kappa2, 1e-15);
      return energy_density(family, amp, x, t, kh, cell_average);
    };
    // scale the tolerance by a coarse estimate of the integral
    const double coarse = simpson(density, a, b, 16);
    s.q.push_back(adaptive_simpson(density, a, b, 1e-11 * std::max(std::abs(coarse), 1e-300)));
  }
  finish_drift(s);
  return s;
}

double integrate_square(const std::vector<double>& x, const std::vector<double>& u, double x1, double x2) {
  require(x.size() == u.size() && x.size() >= 2, "integrate_square: size mismatch");
  if (x2 < x1) std::swap(x1, x2);
  auto value = [&](std::size_t i, double p) {
    double w = (p - x[i]) / (x[i + 1] - x[i]);
    return (1 - w) * u[i] + w * u[i + 1];
  };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double a = std::max(x[i], x1), b = std::min(x[i + 1], x2);
    if (b <= a) continue;
    double ua = value(i, a), ub = value(i, b);
    sum += 0.5 * (b - a) * (ua * ua + ub * ub);
  }
  return sum;
}

EnergySeries energy_between_characteristics_fdtd(const PhaseFamily& family, const FineGrid& grid,
                                                 const std::vector<FieldSnapshot>& snapshots, double kappa1,
                                                 double kappa2) {
  EnergySeries s;
  for (const FieldSnapshot& snap : snapshots) {
    require(snap.t > 0.0, "energy: snapshot times must be positive");
    s.t.push_back(snap.t);
    s.x1.push_back(family.position(snap.t, kappa1));
    s.x2.push_back(family.position(snap.t, kappa2));
  }
  check_endpoints(s, kappa1, kappa2);
  for (std::size_t i = 0; i < snapshots.size(); ++i)
    s.q.push_back(integrate_square(grid.x, snapshots[i].u, s.x1[i], s.x2[i]));
  finish_drift(s);
  return s;
}

double energy_centroid(const FineGrid& g, const std::vector<double>& u, const std::vector<double>& v) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double e = 0.5 * g.mass[i] * v[i] * v[i];
    num += e * g.x[i];
    den += e;
  }
  for (std::size_t k = 0; k < g.coeff.size(); ++k) {
    std::size_t i = k, j = (k + 1) % g.size();
    if (j == 0) continue;
    double d = u[j] - u[i];
    double e = 0.5 * g.coeff[k] * d * d / g.length[k];
    num += e * 0.5 * (g.x[i] + g.x[j]);
    den += e;
  }
  require(den > 0.0, "energy centroid: zero field");
  return num / den;
}

}  // namespace bwkb
