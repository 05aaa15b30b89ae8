#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "bwkb/dispersion.hpp"
#include "bwkb/error.hpp"
#include "bwkb/reference_solver.hpp"

using namespace bwkb;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::validation_failed;
}

FineGridState periodic_state(int nodes, const std::function<double(double)>& a,
                             const std::function<double(double)>& u0) {
  FineGridState s;
  s.grid = periodic_uniform_grid(1.0, nodes, a);
  for (double x : s.grid.x) s.u.push_back(u0(x));
  s.v.assign(s.grid.size(), 0.0);
  return s;
}

double smooth_coefficient(double x) { return 1.0 + 0.5 * std::sin(kTwoPi * x); }
double bump(double x) { return std::exp(-50.0 * (x - 0.5) * (x - 0.5)); }

std::shared_ptr<const DispersionBranch> unit_medium() {
  static auto br = std::make_shared<CellBranch>(CellCoefficient(CellProfile::constant(1.0)), 0, 64);
  return br;
}

}  // namespace

TEST(ReferenceSolver, StandingWaveInUnitMedium) {
  auto s = periodic_state(1000, [](double) { return 1.0; }, [](double x) { return std::cos(kTwoPi * x); });
  auto run = run_fdtd(s, {0.25, 1.0});
  const auto& snap = run.snapshots.back();
  double worst = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i)
    worst = std::max(worst, std::abs(snap.u[i] - std::cos(kTwoPi * s.grid.x[i]) * std::cos(kTwoPi * 1.0)));
  EXPECT_LE(worst, 1e-4);
}

TEST(ReferenceSolver, PeriodicEnergyIsConserved) {
  auto s = periodic_state(800, [](double x) { return x < 0.5 ? 4.0 : 1.0; }, bump);
  const double e0 = discrete_energy(s.grid, s.u, s.v);
  auto run = run_fdtd(s, {0.5, 1.0, 2.0});
  // the Verlet step conserves the modified energy to rounding
  EXPECT_LE(run.energy_drift, 1e-12);
  // the plain energy differs from it by O((dt omega)^2) of the potential part
  for (const auto& snap : run.snapshots) EXPECT_NEAR(snap.energy / e0, 1.0, 1e-3);
}

TEST(ReferenceSolver, SecondOrderSelfConvergence) {
  // nodes 0, 2, 4, ... of the finer grid coincide with the coarser grid
  std::vector<std::vector<double>> sols;
  for (int n : {200, 400, 800}) {
    auto s = periodic_state(n, smooth_coefficient, bump);
    run_fdtd(s, {0.4});
    sols.push_back(s.u);
  }
  auto diff = [&](const std::vector<double>& coarse, const std::vector<double>& fine) {
    double d = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) d = std::max(d, std::abs(coarse[i] - fine[2 * i]));
    return d;
  };
  const double d1 = diff(sols[0], sols[1]), d2 = diff(sols[1], sols[2]);
  const double rate = std::log2(d1 / d2);
  EXPECT_GE(rate, 1.8) << d1 << " " << d2;
  EXPECT_LE(rate, 2.2) << d1 << " " << d2;
}

TEST(ReferenceSolver, LinearFieldEnergyResolvesStiffLayers) {
  // u = x has energy (1/2) int a dx exactly when element ends sit on the interfaces
  const double h = 0.4, a1 = 1e4, a2 = 1.0, eps = 0.05;
  auto grid = cell_aligned_grid(CellProfile::two_phase(h, a1, a2), eps, -1.0, 1.0, 32);
  std::vector<double> u = grid.x, v(grid.size(), 0.0);
  const double exact = 0.5 * (grid.x.back() - grid.x.front()) * (h * a1 + (1 - h) * a2);
  EXPECT_NEAR(discrete_energy(grid, u, v) / exact, 1.0, 1e-12);
}

TEST(ReferenceSolver, ZeroDataStaysZero) {
  auto s = periodic_state(100, smooth_coefficient, [](double) { return 0.0; });
  auto run = run_fdtd(s, {1.0});
  for (double w : run.snapshots[0].u) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(run.energy_drift, 0.0);
}

TEST(ReferenceSolver, UnitMediumPacketTravelsUnchanged) {
  // Omega = kappa > 0 on the support: the exact solution is u0(x - t)
  GaussianEnvelope env;
  env.kappa_star = 1.5;
  env.kappa_width = 0.2;
  const double eps = 0.05, t = 0.5;
  auto spec = PacketSpec::smooth(env, eps, 1, unit_medium());
  auto grid = cell_aligned_grid(CellProfile::constant(1.0), eps, -2.0, 2.5, 64);
  auto state = prepared_initial_data(spec, grid);
  run_fdtd(state, {t});
  auto exact = reconstruct_quadrature(spec, grid.cells, t).values;
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    err += std::pow(state.u[i] - exact[i].real(), 2);
    norm += std::pow(exact[i].real(), 2);
  }
  EXPECT_LE(std::sqrt(err / norm), 2e-3);
}

TEST(ReferenceSolver, SpongeAbsorbsOutgoingPacket) {
  GaussianEnvelope env;
  env.kappa_star = 1.5;
  env.kappa_width = 0.2;
  const double eps = 0.05;
  auto spec = PacketSpec::smooth(env, eps, 1, unit_medium());
  auto grid = cell_aligned_grid(CellProfile::constant(1.0), eps, -2.0, 2.0, 32);
  add_sponge(grid);
  auto state = prepared_initial_data(spec, grid);
  const double e0 = discrete_energy(grid, state.u, state.v);
  auto run = run_fdtd(state, {4.0});
  EXPECT_LE(run.snapshots[0].energy / e0, 1e-3);
}

TEST(ReferenceSolver, InitialFieldInsideSpongeIsRejected) {
  GaussianEnvelope env;
  env.kappa_star = 1.5;
  env.kappa_width = 0.2;
  env.x_center = 1.0;
  env.x_width = 1.0;
  auto spec = PacketSpec::smooth(env, 0.05, 1, unit_medium());
  auto grid = cell_aligned_grid(CellProfile::constant(1.0), 0.05, -1.0, 1.0, 8);
  add_sponge(grid);
  EXPECT_EQ(code_of([&] { prepared_initial_data(spec, grid); }), ErrorCode::out_of_range);
}

TEST(ReferenceSolver, SuggestedWindowCoversTravel) {
  auto [lo, hi] = suggested_window(-1.0, 1.0, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(lo, -7.0 - 0.2 * 14.0);
  EXPECT_DOUBLE_EQ(hi, 7.0 + 0.2 * 14.0);
}

TEST(ReferenceSolver, RejectsInvalidRuns) {
  auto s = periodic_state(50, smooth_coefficient, bump);
  EXPECT_EQ(code_of([&] { run_fdtd(s, {}); }), ErrorCode::invalid_argument);
  s.cfl = 1.5;
  EXPECT_EQ(code_of([&] { run_fdtd(s, {1.0}); }), ErrorCode::invalid_argument);
  s.cfl = 0.9;
  EXPECT_EQ(code_of([&] { run_fdtd(s, {0.0}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { periodic_uniform_grid(1.0, 10, [](double) { return -1.0; }); }),
            ErrorCode::invalid_argument);
  auto g = periodic_uniform_grid(1.0, 10, smooth_coefficient);
  EXPECT_EQ(code_of([&] { add_sponge(g); }), ErrorCode::invalid_argument);
}
