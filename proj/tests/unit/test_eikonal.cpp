#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "bwkb/dispersion.hpp"
#include "bwkb/eikonal.hpp"
#include "bwkb/error.hpp"
#include "oracles.hpp"

using namespace bwkb;

namespace {

// band 1 of a moderate-contrast cell: smooth, no acoustic kink, curvature of both signs
std::shared_ptr<const DispersionBranch> cell_branch() {
  static auto br = std::make_shared<CellBranch>(CellCoefficient(CellProfile::two_phase(0.5, 100.0, 1.0)), 1, 128);
  return br;
}

PhaseState state(InitialPhase g, double kappa, int sign) {
  PhaseState s;
  s.sign = sign;
  s.g = std::move(g);
  s.kappa = kappa;
  s.branch = cell_branch();
  return s;
}

double gaussian(double s) { return std::exp(-0.5 * s * s / (0.3 * 0.3)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::validation_failed;
}

}  // namespace

TEST(Eikonal, ZeroPhaseMovesAtGroupVelocity) {
  const double kappa = 1.2;
  const auto j = cell_branch()->jet(0.0, kappa);
  for (int sign : {1, -1}) {
    auto s = state(InitialPhase::zero(), kappa, sign);
    auto p = trace_characteristic(s, 0.3, 1.0, 0.01);
    EXPECT_NEAR(p.x.back(), 0.3 + sign * j.omega_xi * 1.0, 1e-10);
    EXPECT_NEAR(p.phase.back(), sign * j.omega * 1.0, 1e-10);
  }
}

TEST(Eikonal, LinearPhaseKeepsItsSlope) {
  const double kappa = 1.2, c = 0.3;
  auto s = state(InitialPhase::linear(c), kappa, 1);
  const double v = cell_branch()->omega_xi(0.0, kappa - c);
  for (double s0 : {-1.0, 0.0, 0.7}) {
    auto p = trace_characteristic(s, s0, 1.0, 0.01);
    // measured by differencing neighbouring paths 1e-5 apart
    for (double slope : p.phase_slope) EXPECT_NEAR(slope, c, 1e-9);
    EXPECT_NEAR(p.x.back(), s0 + v, 1e-10);
  }
}

TEST(Eikonal, QuadraticPhaseSlopeConstantAlongPaths) {
  auto s = state(InitialPhase::quadratic(0.2), 1.2, 1);
  for (double s0 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    auto p = trace_characteristic(s, s0, 1.0, 0.01);
    EXPECT_LE(p.slope_drift, 1e-8);
    EXPECT_LE(p.velocity_error, 1e-8);
  }
}

TEST(Eikonal, PhaseFieldSatisfiesEikonalEquation) {
  auto s = state(InitialPhase::quadratic(0.2), 1.2, 1);
  const double h = 1e-3;
  double worst = 0.0;
  for (double t : {0.3, 0.6, 0.9})
    for (double x = -1.0; x <= 1.0; x += 0.25) {
      const double pt = (phase_field(s, t + h, x).phase - phase_field(s, t - h, x).phase) / (2 * h);
      const double px = (phase_field(s, t, x + h).phase - phase_field(s, t, x - h).phase) / (2 * h);
      worst = std::max(worst, std::abs(pt - cell_branch()->omega(t, s.kappa - px)));
    }
  EXPECT_LE(worst, 1e-5);
}

TEST(Eikonal, ZeroPhaseFieldIsUniform) {
  const double kappa = 0.9;
  auto s = state(InitialPhase::zero(), kappa, -1);
  const auto j = cell_branch()->jet(0.0, kappa);
  for (double x : {-0.5, 0.0, 1.5}) {
    auto v = phase_field(s, 0.7, x);
    EXPECT_NEAR(v.sigma, x + j.omega_xi * 0.7, 1e-10);
    EXPECT_NEAR(v.phase, -j.omega * 0.7, 1e-10);
  }
}

TEST(Eikonal, PhaseFieldAtTimeZeroIsInitialPhase) {
  auto s = state(InitialPhase::quadratic(0.2), 1.2, 1);
  for (double x : {-1.0, 0.2, 2.0}) {
    auto v = phase_field(s, 0.0, x);
    EXPECT_EQ(v.phase, 0.2 * x * x);
    EXPECT_EQ(v.sigma, x);
  }
}

TEST(Eikonal, InversionRecoversLaunchPoint) {
  auto s = state(InitialPhase::quadratic(0.2), 1.2, 1);
  for (double s0 : {-1.0, -0.3, 0.4, 1.1}) {
    const double x = characteristic_point(s, s0, 0.1).x;
    EXPECT_NEAR(phase_field(s, 0.1, x).sigma, s0, 1e-9);
  }
}

TEST(Eikonal, ZeroPhaseAmplitudeIsTranslated) {
  const double kappa = 1.2;
  auto s = state(InitialPhase::zero(), kappa, 1);
  const double v = cell_branch()->omega_xi(0.0, kappa);
  for (double x : {-1.0, -0.6, 0.0, 0.4}) EXPECT_NEAR(amplitude_field(s, 1.0, x, gaussian), gaussian(x - v), 1e-12);
}

TEST(Eikonal, AmplitudeAtTimeZeroIsInitialData) {
  auto s = state(InitialPhase::quadratic(0.2), 1.2, 1);
  for (double x : {-0.4, 0.0, 0.9}) EXPECT_EQ(amplitude_field(s, 0.0, x, gaussian), gaussian(x));
}

TEST(Eikonal, TransportMatchesFiniteVolumeOracle) {
  const double c2 = 0.2, kappa = 1.2, t_final = 0.8;
  auto s = state(InitialPhase::quadratic(c2), kappa, 1);
  auto br = cell_branch();
  auto xi_of = [&](double sigma) { return kappa - 2 * c2 * sigma; };
  const double a = -3.5, b = 2.5;
  const std::size_t cells = 3000;
  const double dx = (b - a) / cells;
  // conservative variable (u0)^2 phi_t = (u0)^2 Omega, flux (u0)^2 Omega Omega_xi
  std::vector<double> q0(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = a + (i + 0.5) * dx;
    q0[i] = gaussian(x) * gaussian(x) * br->omega(0.0, xi_of(x));
  }
  // launch point of the characteristic through each face, by Newton from the last one
  std::vector<double> sigma(cells + 1);
  for (std::size_t f = 0; f <= cells; ++f) sigma[f] = a + f * dx;
  auto invert = [&](double& sg, double x, double t) {
    for (int it = 0; it < 30; ++it) {
      const auto j = br->jet(0.0, xi_of(sg));
      const double r = sg + j.omega_xi * t - x, d = 1.0 - 2 * c2 * j.omega_xixi * t;
      sg -= r / d;
      if (std::abs(r) < 1e-13) break;
    }
  };
  auto velocity = [&](std::size_t f, double x, double t) {
    invert(sigma[f], x, t);
    return br->omega_xi(0.0, xi_of(sigma[f]));
  };
  double vmax = 0.0;
  for (int i = 0; i <= 400; ++i) vmax = std::max(vmax, std::abs(br->omega_xi(0.0, xi_of(a + (b - a) * i / 400.0))));
  auto q = oracle::finite_volume_advect(q0, a, b, t_final, velocity, vmax);

  double l1 = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = a + (i + 0.5) * dx;
    double sg = x;
    invert(sg, x, t_final);
    const double u_fv = std::sqrt(std::max(q[i], 0.0) / br->omega(0.0, xi_of(sg)));
    const double u_char = amplitude_field(s, t_final, x, gaussian);
    l1 += std::abs(u_fv - u_char) * dx;
    mass += u_char * dx;
  }
  EXPECT_LE(l1, 1e-3) << "L1 mass of the solution " << mass;
}

TEST(Eikonal, SolvabilityResidualsVanishForConstantCoefficient) {
  auto r = verify_solvability_constants(CellCoefficient(CellProfile::constant(2.0)), 0, 1.0);
  EXPECT_LE(r.overlap_real, 1e-10);
  EXPECT_LE(r.hf_relative, 1e-8);
}

TEST(Eikonal, FoldedCharacteristicsAreReported) {
  // dx/dsigma = 1 - 2 c2 Omega'' t turns negative near the zone edge, where Omega'' > 0
  auto s = state(InitialPhase::quadratic(2.0), 1.2, 1);
  CharacteristicMap map(s, 1.0);
  const auto p = characteristic_point(s, map.sigma_lo() + 0.01, 1.0);
  ASSERT_LT(p.jacobian, 0.0);
  EXPECT_EQ(code_of([&] { map.at(p.x); }), ErrorCode::caustic);
  EXPECT_EQ(code_of([&] { trace_characteristic(s, map.sigma_lo() + 0.01, 1.0, 0.01); }), ErrorCode::caustic);
}

TEST(Eikonal, RejectsPhaseLeavingTheZone) {
  auto s = state(InitialPhase::linear(5.0), 1.2, 1);
  EXPECT_EQ(code_of([&] { trace_characteristic(s, 0.0, 1.0, 0.01); }), ErrorCode::out_of_range);
}
