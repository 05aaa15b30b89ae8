#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "bwkb/diagnostics.hpp"
#include "bwkb/error.hpp"

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

std::shared_ptr<const DispersionBranch> layered_band1() {
  static auto br = std::make_shared<CellBranch>(CellCoefficient(CellProfile::two_phase(0.5, 100.0, 1.0)), 1, 128);
  return br;
}

// Omega' < 0 and Omega'' < 0 on [0.2, 1.6]: one stationary point per x in the fan
PhaseFamily fan(InitialPhase g = InitialPhase::zero()) {
  PhaseFamily f;
  f.g = std::move(g);
  f.sign = 1;
  f.branch = layered_band1();
  f.kappa_lo = 0.2;
  f.kappa_hi = 1.6;
  return f;
}

// central difference of Omega, independent of the branch derivative tables
double slope_fd(double k) {
  const double d = 1e-5;
  return (layered_band1()->omega(0.0, k + d) - layered_band1()->omega(0.0, k - d)) / (2 * d);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

double amp_profile(double k) { return std::exp(-(k - 0.9) * (k - 0.9)); }

}  // namespace

TEST(Diagnostics, ZeroPhaseLocalWavenumberEqualsStationaryQuasimomentum) {
  const double t = 2.0;
  const double x_lo = slope_fd(0.3) * t, x_hi = slope_fd(1.5) * t;
  auto data = local_fields(fan(), linspace(x_hi, x_lo, 9), {t});
  EXPECT_EQ(data.excluded, 0u);
  for (std::size_t i = 0; i < data.xs.size(); ++i) {
    ASSERT_TRUE(data.valid[i]);
    EXPECT_EQ(data.k_hat[i], data.kappa_hat[i]);
    EXPECT_NEAR(slope_fd(data.kappa_hat[i]) * t, data.xs[i], 1e-7);
  }
  EXPECT_LE(data.dispersion_residual, 1e-6);
}

TEST(Diagnostics, LinearPhaseShiftsLocalWavenumber) {
  const double c = 0.1, t = 1.5;
  const double x_lo = slope_fd(0.3 - c) * t, x_hi = slope_fd(1.5 - c) * t;
  auto data = local_fields(fan(InitialPhase::linear(c)), linspace(x_hi, x_lo, 7), {t});
  for (std::size_t i = 0; i < data.xs.size(); ++i) {
    ASSERT_TRUE(data.valid[i]);
    EXPECT_NEAR(data.k_hat[i], data.kappa_hat[i] - c, 1e-14);
  }
  EXPECT_LE(data.dispersion_residual, 1e-6);
}

TEST(Diagnostics, TransportResidualsShrinkWithGridAndOrder) {
  // kappa_hat = F(x / t) is transported exactly at speed Omega'(kappa_hat)
  auto residual = [&](int n, int order) {
    auto xs = linspace(slope_fd(1.2) * 1.5, slope_fd(0.5) * 2.5, n);
    auto ts = linspace(1.5, 2.5, n);
    return transport_residuals(local_fields(fan(), xs, ts), fan(), order);
  };
  auto coarse = residual(9, 2), fine = residual(17, 2), finer = residual(33, 2), fine4 = residual(17, 4);
  EXPECT_EQ(finer.points, 31u * 31u);
  EXPECT_GT(fine4.points, 0u);
  // pre-asymptotic at these spacings; the ratio tends to 1/4
  EXPECT_LE(fine.r_kappa, 0.5 * coarse.r_kappa);
  EXPECT_LE(finer.r_kappa, 0.4 * fine.r_kappa);
  EXPECT_LE(fine.r_k, 0.5 * coarse.r_k);
  EXPECT_LE(fine4.r_kappa, 0.1 * fine.r_kappa);
}

TEST(Diagnostics, AsymptoticEnergyBetweenCharacteristicsIsConserved) {
  // x = t Omega'(kappa) maps the integral onto int A(kappa)^2 d kappa
  const double k1 = 0.5, k2 = 1.3;
  AmplitudeFn amp = [](double, double, double k) { return amp_profile(k); };
  auto series = energy_between_characteristics_asymptotic(fan(), amp, k1, k2, {0.5, 1.0, 2.0, 4.0});
  double exact = 0.0;
  const int n = 2000;
  const double h = (k2 - k1) / n;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    exact += w * std::pow(amp_profile(k1 + i * h), 2);
  }
  exact *= h / 3;
  for (double q : series.q) EXPECT_NEAR(q / exact, 1.0, 1e-6);
  EXPECT_LE(series.max_relative_drift, 1e-6);
}

TEST(Diagnostics, EnergyFluxBalanceHolds) {
  AmplitudeFn amp = [](double, double, double k) { return amp_profile(k); };
  auto xs = linspace(slope_fd(1.2) * 1.5, slope_fd(0.5) * 2.5, 17);
  auto ts = linspace(1.5, 2.5, 17);
  auto data = local_fields(fan(), xs, ts);
  const double e_scale = energy_density(fan(), amp, xs[8], ts[8], data.kappa_hat[data.index(8, 8)]);
  EXPECT_LE(energy_flux_check(data, fan(), amp, 4), 1e-3 * e_scale);
}

TEST(Diagnostics, SquareIntegralInterpolatesEnds) {
  const std::vector<double> x = {0.0, 1.0, 2.0}, ones = {1.0, 1.0, 1.0};
  EXPECT_NEAR(integrate_square(x, ones, 0.5, 1.7), 1.2, 1e-15);
  EXPECT_NEAR(integrate_square(x, ones, 1.7, 0.5), 1.2, 1e-15);
  const std::vector<double> zeros = {0.0, 0.0, 0.0};
  EXPECT_EQ(integrate_square(x, zeros, 0.0, 2.0), 0.0);
}

TEST(Diagnostics, CentroidOfSymmetricFieldIsCentre) {
  auto grid = periodic_uniform_grid(1.0, 200, [](double) { return 1.0; });
  grid.periodic = false;
  grid.coeff.pop_back();
  grid.length.pop_back();
  std::vector<double> u(grid.size()), v(grid.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-200.0 * std::pow(grid.x[i] - 0.3, 2));
  // strain midpoints and nodes of a symmetric bump average to its centre
  EXPECT_NEAR(energy_centroid(grid, u, v), 0.3, 1e-6);
  std::fill(u.begin(), u.end(), 0.0);
  EXPECT_EQ(code_of([&] { energy_centroid(grid, u, v); }), ErrorCode::invalid_argument);
}

TEST(Diagnostics, RejectsInvalidInput) {
  AmplitudeFn amp = [](double, double, double) { return 1.0; };
  EXPECT_EQ(code_of([&] { energy_between_characteristics_asymptotic(fan(), amp, 1.0, 0.5, {1.0}); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { local_fields(fan(), {0.0}, {0.0}); }), ErrorCode::invalid_argument);
}
