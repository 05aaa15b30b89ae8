#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "bwkb/dispersion.hpp"
#include "bwkb/error.hpp"
#include "bwkb/high_contrast.hpp"
#include "bwkb/wavepacket.hpp"
#include "oracles.hpp"

using namespace bwkb;
using cd = std::complex<double>;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::validation_failed;
}

std::shared_ptr<const DispersionBranch> unit_medium() {
  static auto br = std::make_shared<CellBranch>(CellCoefficient(CellProfile::constant(1.0)), 0, 64);
  return br;
}

std::shared_ptr<const DispersionBranch> layered_band1() {
  static auto br = std::make_shared<CellBranch>(CellCoefficient(CellProfile::two_phase(0.5, 100.0, 1.0)), 1, 128);
  return br;
}

// limit dispersion for h = 1/2, a2 = 1 written out independently:
// f(W) = cos(W/2) - (W/4) sin(W/2) = cos(kappa)
double f_half(double w) { return std::cos(w / 2) - (w / 4) * std::sin(w / 2); }
double f_half_prime(double w) { return -0.75 * std::sin(w / 2) - (w / 8) * std::cos(w / 2); }

struct LimitBand {
  double lo, hi;
  double omega(double kappa) const {
    return oracle::bisect([&](double w) { return f_half(w) - std::cos(kappa); }, lo, hi);
  }
  // implicit differentiation of f(Omega) = cos(kappa)
  double slope(double kappa) const { return -std::sin(kappa) / f_half_prime(omega(kappa)); }
  double curvature(double kappa) const {
    const double d = 1e-5;
    return (slope(kappa + d) - slope(kappa - d)) / (2 * d);
  }
};

LimitBand limit_band(int n) {
  auto bands = oracle::band_intervals(f_half, 30.0, 1e-3);
  return {bands.at(n).first, bands.at(n).second};
}

double peak(const std::vector<cd>& v) {
  double m = 0.0;
  for (const cd& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST(Wavepacket, UnitMediumQuadratureIsShiftedGaussianTransform) {
  // Omega = kappa, U = 1: the integral is the Fourier transform of the envelope
  GaussianEnvelope env;
  env.kappa_star = 1.5;
  env.kappa_width = 0.1;
  env.x_center = 0.2;
  env.x_width = 0.5;
  const double eps = 0.05, t = 0.7;
  auto spec = PacketSpec::smooth(env, eps, 1, unit_medium());
  auto grid = CellGrid::window(eps, 0.0, 2.0, 4);
  auto field = reconstruct_quadrature(spec, grid, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i), s = x - t, sk = env.kappa_width;
    const cd exact = std::sqrt(kTwoPi) * sk * std::exp(-0.5 * sk * sk * s * s / (eps * eps)) *
                     std::exp(-0.5 * (s - env.x_center) * (s - env.x_center) / (env.x_width * env.x_width)) *
                     std::polar(1.0, env.kappa_star * s / eps);
    worst = std::max(worst, std::abs(field.values[i] - exact));
  }
  EXPECT_LE(worst, 1e-9);
  EXPECT_FALSE(field.accuracy_warning);
}

TEST(Wavepacket, StationaryPointsMatchDenseScanOnLimitBand) {
  const int n = 2;
  auto br = std::make_shared<HighContrastBranch>(n, HighContrastMedium{0.5, 1.0});
  const LimitBand band = limit_band(n);
  double vmax = 0.0;
  for (int i = 1; i < 2000; ++i) vmax = std::max(vmax, std::abs(band.slope(-kPi + kTwoPi * i / 2000.0)));
  const double t = 1.0;
  for (double frac : {0.3, 0.7, -0.5}) {
    const double x = frac * vmax * t;
    auto oracle_roots = oracle::dense_roots([&](double k) { return band.slope(k) * t - x; }, -kPi + 1e-9,
                                            kPi - 1e-9, 4001);
    auto pts = stationary_points(x, t, br, 1);
    ASSERT_EQ(pts.size(), oracle_roots.size()) << x;
    ASSERT_EQ(pts.size(), 2u) << x;
    for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_NEAR(pts[k].kappa, oracle_roots[k], 1e-8);
    // Omega' of an even band is symmetric about the zone centre of each half
    const double mid = 0.5 * (pts[0].kappa + pts[1].kappa);
    EXPECT_NEAR(std::abs(mid), kPi / 2, 0.3);
  }
}

TEST(Wavepacket, NoStationaryPointBeyondMaximalSpeed) {
  auto br = std::make_shared<HighContrastBranch>(2, HighContrastMedium{0.5, 1.0});
  const LimitBand band = limit_band(2);
  double vmax = 0.0;
  for (int i = 1; i < 2000; ++i) vmax = std::max(vmax, std::abs(band.slope(-kPi + kTwoPi * i / 2000.0)));
  EXPECT_TRUE(stationary_points(1.1 * vmax, 1.0, br, 1).empty());

  GaussianEnvelope env;
  env.kappa_star = 1.0;
  env.kappa_width = 0.2;
  auto spec = PacketSpec::smooth(env, 0.05, 1, br);
  auto field = reconstruct_stationary_phase(spec, CellGrid::point(0.05, 1.1 * vmax), 1.0);
  EXPECT_TRUE(field.negligible[0]);
  EXPECT_EQ(field.values[0], cd(0.0));
}

TEST(Wavepacket, ZeroEnvelopeGivesZeroField) {
  GaussianEnvelope env;
  env.amplitude = 0.0;
  env.kappa_star = 0.8;
  env.kappa_width = 0.2;
  auto spec = PacketSpec::smooth(env, 0.05, 1, layered_band1());
  auto grid = CellGrid::window(0.05, -0.5, 0.5, 4);
  EXPECT_EQ(peak(reconstruct_quadrature(spec, grid, 0.5).values), 0.0);
  EXPECT_EQ(peak(reconstruct_stationary_phase(spec, grid, 0.5).values), 0.0);
}

TEST(Wavepacket, StationaryPhaseConvergesToQuadratureAtFirstOrder) {
  GaussianEnvelope env;
  env.kappa_star = 0.6;
  env.kappa_width = 0.2;
  const double t = 2.0;
  const double centre = layered_band1()->omega_xi(0.0, env.kappa_star) * t;
  std::vector<double> gaps;
  for (double eps : {1.0 / 40, 1.0 / 80, 1.0 / 160}) {
    auto spec = PacketSpec::smooth(env, eps, 1, layered_band1());
    auto grid = CellGrid::window(eps, centre - 1.5, centre + 1.5, 4);
    auto quad = reconstruct_quadrature(spec, grid, t);
    auto sp = reconstruct_stationary_phase(spec, grid, t);
    gaps.push_back(l2_distance(sp.values, quad.values) / l2_norm(quad.values));
  }
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const double rate = std::log2(gaps[k - 1] / gaps[k]);
    EXPECT_GE(rate, 0.85) << gaps[k - 1] << " -> " << gaps[k];
    EXPECT_LE(rate, 1.15) << gaps[k - 1] << " -> " << gaps[k];
  }
}

TEST(Wavepacket, LinearDispersionIsDegenerate) {
  GaussianEnvelope env;
  env.kappa_star = 1.0;
  env.kappa_width = 0.1;
  auto spec = PacketSpec::smooth(env, 0.05, 1, unit_medium());
  EXPECT_EQ(code_of([&] { reconstruct_stationary_phase(spec, 1.0, 1.0); }), ErrorCode::degenerate);
  EXPECT_EQ(code_of([] { PacketSpec::delta(1.0, [](double) { return 1.0; }, 0.05, 1, unit_medium()); }),
            ErrorCode::degenerate);
}

TEST(Wavepacket, MirroredSymmetrizedFieldIsReal) {
  GaussianEnvelope env;
  env.kappa_star = 0.9;
  env.kappa_width = 0.15;
  env.mirrored = true;
  env.x_width = 0.5;
  const double eps = 1.0 / 40;
  auto spec = PacketSpec::smooth(env, eps, 1, layered_band1());
  auto grid = CellGrid::window(eps, -1.0, 1.0, 8);
  auto field = reconstruct_symmetrized(spec, grid, 0.6);
  double imag = 0.0;
  for (const cd& z : field.values) imag = std::max(imag, std::abs(z.imag()));
  // U(-kappa) = conj U(kappa) holds up to the branch interpolation error
  EXPECT_LE(imag, 1e-8 * peak(field.values));
  EXPECT_GT(peak(field.values), 1e-3);
}

TEST(Wavepacket, TimeDerivativeMatchesDifferencedField) {
  // with an x-independent envelope the leading-order derivative is exact
  GaussianEnvelope env;
  env.kappa_star = 0.8;
  env.kappa_width = 0.2;
  const double eps = 1.0 / 20;
  auto spec = PacketSpec::smooth(env, eps, 1, layered_band1());
  auto grid = CellGrid::window(eps, -0.5, 0.5, 4);
  auto deriv = quadrature_time_derivative(spec, grid);
  const double h = 2e-4 * eps;
  auto u0 = reconstruct_quadrature(spec, grid, 0.0).values;
  auto u1 = reconstruct_quadrature(spec, grid, h).values;
  auto u2 = reconstruct_quadrature(spec, grid, 2 * h).values;
  double worst = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i)
    worst = std::max(worst, std::abs((-3.0 * u0[i] + 4.0 * u1[i] - u2[i]) / (2 * h) - deriv[i]));
  EXPECT_LE(worst, 1e-5 * peak(deriv));
}

TEST(Wavepacket, DeltaPulseCentreAndDecay) {
  const int n = 2;
  const double kstar = kPi / 3, eps = 1.0 / 40;
  auto br = std::make_shared<HighContrastBranch>(n, HighContrastMedium{0.5, 1.0});
  const LimitBand band = limit_band(n);
  auto spec = PacketSpec::delta(kstar, [](double x) { return std::exp(-x * x); }, eps, 1, br);
  auto grid = CellGrid::window(eps, -0.2, 0.2, 4);
  auto a = delta_pulse_field(spec, 1.0, grid);
  auto b = delta_pulse_field(spec, 4.0, grid);
  EXPECT_NEAR(a.center, band.slope(kstar), 1e-8);
  EXPECT_NEAR(b.center, 4.0 * band.slope(kstar), 4e-8);
  EXPECT_NEAR(a.prefactor, 1.0 / std::sqrt(std::abs(band.curvature(kstar))), 1e-6);
  EXPECT_NEAR(b.prefactor / a.prefactor, 0.5, 1e-14);
  EXPECT_DOUBLE_EQ(a.width, 4 * eps);
}

TEST(Wavepacket, GelfandTransformRecoversPeriodicFactor) {
  const double eps = 0.1, k0 = 0.7;
  auto grid = CellGrid::window(eps, 0.0, 2.0, 8);
  auto periodic = [](double y) { return cd(1.0 + 0.3 * std::cos(kTwoPi * y), 0.2 * std::sin(kTwoPi * y)); };
  std::vector<cd> u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = grid.cell_coordinate(i);
    u[i] = periodic(c - std::floor(c)) * std::polar(1.0, k0 * c);
  }
  auto g = gelfand_transform(grid, u, k0);
  const double cells = static_cast<double>(grid.cells());
  for (std::size_t j = 0; j < grid.y.size(); ++j)
    EXPECT_LE(std::abs(g[j] - cells / kTwoPi * periodic(grid.y[j])), 1e-12);
}

TEST(Wavepacket, RejectsInvalidSpecs) {
  GaussianEnvelope env;
  env.kappa_star = 0.5;
  EXPECT_EQ(code_of([&] { PacketSpec::smooth(env, 0.0, 1, unit_medium()); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { PacketSpec::smooth(env, 0.1, 2, unit_medium()); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { PacketSpec::delta(kPi, [](double) { return 1.0; }, 0.1, 1, layered_band1()); }),
            ErrorCode::out_of_range);
  auto spec = PacketSpec::smooth(env, 0.1, 1, layered_band1());
  EXPECT_EQ(code_of([&] { reconstruct_stationary_phase(spec, 0.0, 0.0); }), ErrorCode::invalid_argument);
}
