#include "bwkb/reference_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

namespace {

std::size_t elements(const FineGrid& g) { return g.coeff.size(); }

std::pair<std::size_t, std::size_t> ends(const FineGrid& g, std::size_t e) {
  return {e, (e + 1) % g.size()};
}

void apply_stiffness(const FineGrid& g, const std::vector<double>& u, std::vector<double>& f) {
  std::fill(f.begin(), f.end(), 0.0);
  for (std::size_t e = 0; e < elements(g); ++e) {
    auto [i, j] = ends(g, e);
    double flux = g.coeff[e] * (u[j] - u[i]) / g.length[e];
    f[i] += flux;
    f[j] -= flux;
  }
}

void finish(FineGrid& g) {
  const std::size_t n = g.size();
  g.mass.assign(n, 0.0);
  for (std::size_t e = 0; e < elements(g); ++e) {
    auto [i, j] = ends(g, e);
    g.mass[i] += 0.5 * g.length[e];
    g.mass[j] += 0.5 * g.length[e];
  }
  g.damping.assign(n, 0.0);
  g.sponge_lo = g.x.front();
  g.sponge_hi = g.x.back();
}

}  // namespace

double FineGrid::min_spacing() const { return *std::min_element(length.begin(), length.end()); }

double FineGrid::max_frequency_squared() const {
  std::vector<double> row(size(), 0.0);
  for (std::size_t e = 0; e < coeff.size(); ++e) {
    auto [i, j] = ends(*this, e);
    double k = coeff[e] / length[e];
    row[i] += 2 * k;
    row[j] += 2 * k;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, row[i] / mass[i]);
  return worst;
}

FineGrid periodic_uniform_grid(double length, int nodes, const std::function<double(double)>& a) {
  require(length > 0.0 && nodes >= 3, "periodic grid: need positive length and at least 3 nodes");
  FineGrid g;
  g.periodic = true;
  g.period = length;
  const double h = length / nodes;
  for (int i = 0; i < nodes; ++i) {
    g.x.push_back(h * i);
    double ae = a(h * (i + 0.5));
    require(ae > 0.0 && std::isfinite(ae), "periodic grid: coefficient must be positive");
    g.coeff.push_back(ae);
    g.length.push_back(h);
  }
  finish(g);
  return g;
}

std::vector<double> cell_nodes(const CellProfile& profile, int nodes_per_cell) {
  require(nodes_per_cell >= 2, "cell nodes: need at least 2 nodes per cell");
  std::vector<double> y;
  if (profile.kind() == CellProfile::Kind::sampled || profile.is_constant()) {
    for (int j = 0; j < nodes_per_cell; ++j) y.push_back(static_cast<double>(j) / nodes_per_cell);
    return y;
  }
  const double amin = profile.min_value();
  double start = 0.0;
  for (const Segment& s : profile.segments()) {
    int count = std::max(2, static_cast<int>(std::ceil(s.fraction * nodes_per_cell * std::sqrt(amin / s.value))));
    for (int j = 0; j < count; ++j) y.push_back(start + s.fraction * j / count);
    start += s.fraction;
  }
  return y;
}

FineGrid cell_aligned_grid(const CellProfile& profile, double epsilon, double a, double b, int nodes_per_cell) {
  FineGrid g;
  g.cells = CellGrid::window(epsilon, a, b, 1);
  g.cells.y = cell_nodes(profile, nodes_per_cell);
  g.cell_aligned = true;
  const std::size_t n = g.cells.size();
  for (std::size_t i = 0; i < n; ++i) g.x.push_back(g.cells.x(i));
  g.x.push_back(epsilon * static_cast<double>(g.cells.m_hi + 1));
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    double y0 = g.cells.cell_coordinate(i);
    double y1 = i + 1 < n ? g.cells.cell_coordinate(i + 1) : static_cast<double>(g.cells.m_hi + 1);
    g.coeff.push_back(profile.harmonic_mean(y0, y1));
    g.length.push_back(g.x[i + 1] - g.x[i]);
  }
  finish(g);
  return g;
}

void add_sponge(FineGrid& g, const SpongeOptions& opts) {
  require(!g.periodic, "sponge: periodic windows have no margins");
  require(opts.fraction > 0.0 && opts.fraction < 0.5, "sponge: fraction must be in (0, 0.5)");
  const double lo = g.x.front(), hi = g.x.back(), margin = opts.fraction * (hi - lo);
  double sigma = opts.strength;
  if (sigma == 0.0) {
    // effective long-wave speed from the harmonic mean of the coefficient
    double compliance = 0.0;
    for (std::size_t e = 0; e < g.coeff.size(); ++e) compliance += g.length[e] / g.coeff[e];
    sigma = 30.0 * std::sqrt((hi - lo) / compliance) / margin;
  }
  g.sponge_lo = lo + margin;
  g.sponge_hi = hi - margin;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double depth = 0.0;
    if (g.x[i] < g.sponge_lo) depth = (g.sponge_lo - g.x[i]) / margin;
    if (g.x[i] > g.sponge_hi) depth = (g.x[i] - g.sponge_hi) / margin;
    g.damping[i] = sigma * depth * depth * depth;
  }
}

std::pair<double, double> suggested_window(double support_lo, double support_hi, double max_speed, double t_final) {
  double lo = support_lo - max_speed * t_final, hi = support_hi + max_speed * t_final;
  double pad = 0.2 * (hi - lo);
  return {lo - pad, hi + pad};
}

FineGridState prepared_initial_data(const PacketSpec& spec, const FineGrid& grid, const QuadratureOptions& opts) {
  require(grid.cell_aligned, "prepared data: the grid must be cell aligned");
  FineGridState s;
  s.grid = grid;
  const std::size_t n = grid.cells.size();
  auto u = reconstruct_quadrature(spec, grid.cells, 0.0, opts).values;
  auto v = quadrature_time_derivative(spec, grid.cells, opts);
  CellGrid last = CellGrid::point(spec.epsilon, grid.x.back());
  u.push_back(reconstruct_quadrature(spec, last, 0.0, opts).values[0]);
  v.push_back(quadrature_time_derivative(spec, last, opts)[0]);
  s.u.resize(n + 1);
  s.v.resize(n + 1);
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    s.u[i] = u[i].real();
    s.v[i] = v[i].real();
    double mag = std::abs(u[i]);
    peak = std::max(peak, mag);
    if (grid.x[i] < grid.sponge_lo || grid.x[i] > grid.sponge_hi) edge = std::max(edge, mag);
  }
  if (peak > 0.0 && edge > 1e-3 * peak) {
    std::ostringstream os;
    os << "window error: initial field reaches the sponge margins (" << edge / peak << " of its peak)";
    fail(ErrorCode::out_of_range, os.str());
  }
  return s;
}

double discrete_energy(const FineGrid& g, const std::vector<double>& u, const std::vector<double>& v) {
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e += g.mass[i] * v[i] * v[i];
  for (std::size_t k = 0; k < elements(g); ++k) {
    auto [i, j] = ends(g, k);
    double d = u[j] - u[i];
    e += g.coeff[k] * d * d / g.length[k];
  }
  return 0.5 * e;
}

double modified_energy(const FineGrid& g, const std::vector<double>& u, const std::vector<double>& v, double dt) {
  std::vector<double> f(g.size());
  apply_stiffness(g, u, f);
  double corr = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) corr += f[i] * f[i] / g.mass[i];
  return discrete_energy(g, u, v) - 0.125 * dt * dt * corr;
}

FdtdRun run_fdtd(FineGridState& s, const std::vector<double>& snapshot_times) {
  const FineGrid& g = s.grid;
  require(s.u.size() == g.size() && s.v.size() == g.size(), "fdtd: state size does not match the grid");
  require(!snapshot_times.empty(), "fdtd: no snapshot times");
  require(s.cfl > 0.0 && s.cfl <= 1.0, "fdtd: cfl factor must be in (0, 1]");
  FdtdRun run;
  run.cfl = s.cfl;
  run.dt_max = s.cfl * 2.0 / std::sqrt(g.max_frequency_squared());
  const std::size_t n = g.size();
  std::vector<double> f(n), damp(n);
  double start_peak = 1.0;
  for (double w : s.u) start_peak = std::max(start_peak, std::abs(w));
  const double e0 = discrete_energy(g, s.u, s.v);
  double prev = s.t;
  for (double target : snapshot_times) {
    require(target > prev, "fdtd: snapshot times must increase past the current time");
    const long steps = static_cast<long>(std::ceil((target - prev) / run.dt_max - 1e-12));
    const double dt = (target - prev) / steps;
    for (std::size_t i = 0; i < n; ++i) damp[i] = std::exp(-g.damping[i] * dt);
    const double e_start = modified_energy(g, s.u, s.v, dt);
    apply_stiffness(g, s.u, f);
    for (long k = 0; k < steps; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        s.v[i] += 0.5 * dt * f[i] / g.mass[i];
        s.u[i] += dt * s.v[i];
      }
      apply_stiffness(g, s.u, f);
      for (std::size_t i = 0; i < n; ++i) s.v[i] = (s.v[i] + 0.5 * dt * f[i] / g.mass[i]) * damp[i];
      if ((k & 1023) == 1023 || k + 1 == steps) {
        double peak = 0.0;
        for (double w : s.u) peak = std::max(peak, std::abs(w));
        if (!(peak <= 1e10 * start_peak)) {
          std::ostringstream os;
          os << "fdtd instability: field max " << peak << " at t=" << prev + (k + 1) * dt << " (dt=" << dt
             << ", bound " << 2.0 / std::sqrt(g.max_frequency_squared()) << ")";
          fail(ErrorCode::instability, os.str());
        }
      }
    }
    run.steps += steps;
    const double e_end = modified_energy(g, s.u, s.v, dt);
    if (e0 > 0.0) run.energy_drift += std::abs(e_end - e_start) / e0;
    s.t = target;
    prev = target;
    run.snapshots.push_back({target, s.u, s.v, discrete_energy(g, s.u, s.v)});
  }
  return run;
}

}  // namespace bwkb
