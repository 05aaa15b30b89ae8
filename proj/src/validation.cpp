#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <utility>

#include "bwkb/cell_spectrum.hpp"
#include "bwkb/diagnostics.hpp"
#include "bwkb/eikonal.hpp"
#include "bwkb/error.hpp"
#include "bwkb/experiment.hpp"
#include "bwkb/high_contrast.hpp"
#include "bwkb/reference_solver.hpp"
#include "bwkb/wavepacket.hpp"

namespace bwkb {

namespace {

using cd = std::complex<double>;

CheckResult make_check(std::string suite, std::string name, double value, double lower, double tol,
                       std::string cmp, bool pass, std::string detail) {
  CheckResult c;
  c.suite = std::move(suite);
  c.name = std::move(name);
  c.value = value;
  c.lower = lower;
  c.tolerance = tol;
  c.comparator = std::move(cmp);
  c.pass = pass;
  c.detail = std::move(detail);
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class Suite {
 public:
  explicit Suite(std::string name) { report_.suite = std::move(name); }
  void le(const std::string& name, double v, double tol, const std::string& detail = {}) {
    report_.checks.push_back(check_le(report_.suite, name, v, tol, detail));
  }
  void ge(const std::string& name, double v, double bound, const std::string& detail = {}) {
    report_.checks.push_back(check_ge(report_.suite, name, v, bound, detail));
  }
  void in(const std::string& name, double v, double lo, double hi, const std::string& detail = {}) {
    report_.checks.push_back(check_in(report_.suite, name, v, lo, hi, detail));
  }
  // reported without affecting the verdict
  void info(const std::string& name, double v, const std::string& detail = {}) {
    CheckResult c = make_check(report_.suite, name, v, 0.0, 0.0, "info", true, detail);
    c.gating = false;
    report_.checks.push_back(c);
  }
  DataTable& table(std::string name, std::vector<std::string> columns) {
    report_.tables.push_back({std::move(name), std::move(columns), {}});
    return report_.tables.back();
  }
  SuiteReport take() { return std::move(report_); }

 private:
  SuiteReport report_;
};

double zone_point(int j, int count) { return -kPi + kTwoPi * (j + 0.5) / count; }

// ---------------------------------------------------------------- constant

SuiteReport suite_constant() {
  Suite s("constant");
  const int xi_points = 32, m_max = 4;
  for (double c2 : {1.0, 2.25}) {
    CellCoefficient coeff(CellProfile::constant(c2));
    double worst = 0.0;
    for (int j = 0; j < xi_points; ++j) {
      const double xi = zone_point(j, xi_points);
      auto pairs = solve_bloch(coeff, xi, 0.0, 2 * m_max + 1);
      std::vector<double> exact;
      for (int m = -m_max; m <= m_max; ++m) exact.push_back(c2 * std::pow(kTwoPi * m + xi, 2));
      std::sort(exact.begin(), exact.end());
      for (std::size_t k = 0; k < exact.size(); ++k)
        worst = std::max(worst, std::abs(pairs[k].eigenvalue - exact[k]) / exact[k]);
    }
    s.le("eigenvalue_relative_error[a=" + fmt(c2) + "]", worst, 1e-10, "|m| <= 4, 32 quasimomenta");
  }
  return s.take();
}

// ------------------------------------------------------------------ lemmas

std::vector<std::pair<std::string, CellCoefficient>> lemma_media() {
  std::vector<double> samples(256);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double y = static_cast<double>(i) / samples.size();
    samples[i] = 1.0 + 0.5 * std::sin(kTwoPi * y) + 0.2 * std::cos(2.0 * kTwoPi * y);
  }
  return {
      {"two_phase(h=0.5,a1=100,a2=1)", CellCoefficient(CellProfile::two_phase(0.5, 100.0, 1.0))},
      {"three_segment", CellCoefficient(CellProfile::piecewise({{0.3, 5.0}, {0.3, 1.0}, {0.4, 2.5}}))},
      {"smooth_sampled", CellCoefficient(CellProfile::sampled(samples))},
  };
}

SuiteReport suite_lemmas() {
  Suite s("lemmas");
  auto& tab = s.table("lemma_residuals", {"medium", "n", "xi", "overlap_real", "hf_relative"});
  int mi = 0;
  for (const auto& [name, coeff] : lemma_media()) {
    double worst_overlap = 0.0, worst_hf = 0.0;
    for (int n = 0; n < 4; ++n)
      for (int j = 0; j < 16; ++j) {
        const double xi = zone_point(j, 16);
        SolvabilityReport r = verify_solvability_constants(coeff, n, xi);
        worst_overlap = std::max(worst_overlap, r.overlap_real);
        worst_hf = std::max(worst_hf, r.hf_relative);
        tab.rows.push_back({double(mi), double(n), xi, r.overlap_real, r.hf_relative});
      }
    s.le("overlap_real_part[" + name + "]", worst_overlap, 1e-6, "max |Re int U_Omega conj U| over 4 bands x 16 xi");
    s.le("hellmann_feynman_relative[" + name + "]", worst_hf, 1e-5, "vs central difference of Omega^2");
    ++mi;
  }
  return s.take();
}

// ----------------------------------------------------------------- figure1

SuiteReport suite_figure1() {
  Suite s("figure1");
  const HighContrastMedium m{0.5, 1.0};
  auto bands = hc_band_edges_upto(6, m);
  auto& tab = s.table("band_intervals", {"n", "lower", "upper"});
  double worst = 0.0, overlap = 0.0, node = 1e300;
  for (std::size_t n = 0; n < bands.size(); ++n) {
    tab.rows.push_back({double(n), bands[n].lo, bands[n].hi});
    for (double e : {bands[n].lo, bands[n].hi}) {
      worst = std::max(worst, std::abs(std::abs(hc_dispersion_function(e, m)) - 1.0));
      node = std::min(node, std::abs(e - kTwoPi));
    }
    if (n > 0) overlap = std::max(overlap, bands[n - 1].hi - bands[n].lo);
  }
  s.le("edge_residual", worst, 1e-10, "max ||f(edge)| - 1| over bands 0..6");
  s.le("sine_node_on_boundary", node, 1e-10, "distance from 2 pi to the nearest band edge");
  s.le("bands_ordered", overlap, 0.0, "max over n of upper(n-1) - lower(n); negative when disjoint");
  return s.take();
}

// ------------------------------------------------------------- asymptotics

SuiteReport suite_asymptotics() {
  Suite s("asymptotics");
  const HighContrastMedium m{0.5, 1.0};
  const char* names[] = {"omega", "omega_xi", "omega_xixi", "normalizer", "sine_factor"};
  auto& tab = s.table("asymptotic_errors", {"n", "kappa", "quantity", "n2_error"});
  auto errors = [&](int n, double k) {
    HCBandPoint p = hc_solve_branch(n, k, m);
    BranchJet j = hc_branch_jet(p, m), a = hc_band_asymptotics(n, k, m);
    std::vector<double> e = {j.omega - a.omega, j.omega_xi - a.omega_xi, j.omega_xixi - a.omega_xixi,
                             hc_normalizer(p, m) - hc_normalizer_asymptotic(n, k, m),
                             hc_sine_factor(p, m) - hc_sine_factor_asymptotic(n, k, m)};
    for (double& v : e) v = double(n) * n * std::abs(v);
    return e;
  };
  for (double k : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
    for (int n = 4; n <= 16; ++n) {
      auto e = errors(n, k);
      for (int q = 0; q < 5; ++q) tab.rows.push_back({double(n), k, double(q), e[q]});
    }
    auto e8 = errors(8, k), e16 = errors(16, k);
    for (int q = 0; q < 5; ++q) {
      const std::string tag = std::string(names[q]) + "[kappa=" + fmt(k) + "]";
      const double ratio = e8[q] / e16[q];
      const std::string detail = "n^2 |error| at n=8 over n=16; observed order " + fmt(2.0 + std::log2(ratio));
      if (q < 4)
        s.in("n2_ratio_" + tag, ratio, 0.8, 1.3, detail);
      else
        s.info("n2_ratio_" + tag, ratio, detail);
    }
  }
  return s.take();
}

// ---------------------------------------------------------------- coupling

SuiteReport suite_coupling() {
  Suite s("coupling");
  const HighContrastMedium m{0.5, 1.0};
  const std::vector<double> couplings = {1e3, 1e4, 1e5, 1e6};
  auto& tab = s.table("coupling_gaps", {"n", "kappa", "a1", "gap"});
  int non_monotone = 0;
  double final_gap = 0.0;
  for (double k : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
    std::vector<std::vector<double>> gaps(4);
    for (double a1 : couplings) {
      auto pairs = solve_bloch(CellCoefficient(CellProfile::two_phase(m.h, a1, m.a2)), k, 0.0, 4);
      for (int n = 0; n < 4; ++n) {
        const double gap = pairs[n].omega - hc_solve_branch(n, k, m).omega;
        gaps[n].push_back(gap);
        tab.rows.push_back({double(n), k, a1, gap});
      }
    }
    for (int n = 0; n < 4; ++n) {
      for (std::size_t i = 1; i < gaps[n].size(); ++i) {
        const bool same_side = (gaps[n][i] < 0) == (gaps[n][0] < 0);
        if (!(std::abs(gaps[n][i]) < std::abs(gaps[n][i - 1])) || !same_side) ++non_monotone;
      }
      final_gap = std::max(final_gap, std::abs(gaps[n].back()));
    }
  }
  s.le("non_monotone_steps", non_monotone, 0.0, "bands 0..3, kappa in {pi/4, pi/2, 3pi/4}");
  s.le("final_gap", final_gap, 5e-3, "max |Omega(a1=1e6) - limit root|");
  return s.take();
}

// ----------------------------------------------------------------- eikonal

std::shared_ptr<const DispersionBranch> eikonal_branch() {
  return std::make_shared<CellBranch>(CellCoefficient(CellProfile::two_phase(0.5, 100.0, 1.0)), 1, 128);
}

SuiteReport suite_eikonal() {
  Suite s("eikonal");
  PhaseState st;
  st.sign = 1;
  st.kappa = 1.2;
  st.g = InitialPhase::quadratic(0.2);
  st.branch = eikonal_branch();
  const DispersionBranch& br = *st.branch;

  double drift = 0.0, vel = 0.0, rate = 0.0;
  for (double s0 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    CharacteristicPath p = trace_characteristic(st, s0, 1.0, 0.01);
    drift = std::max(drift, p.slope_drift);
    vel = std::max(vel, p.velocity_error);
    rate = std::max(rate, p.phase_rate_error);
  }
  s.le("phase_slope_drift", drift, 1e-8, "max |phi_x(t) - phi_x(0)| over 5 paths, t in [0,1]");
  s.le("path_velocity_error", vel, 1e-8, "max |dx/dt - Omega_xi|");
  s.le("path_phase_rate_error", rate, 1e-6, "max |dphi/dt - (phi_x Omega_xi + Omega)|");

  // phi_tt = Omega_xi^2 phi_xx on the reconstructed field
  const double h = 2e-3;
  auto phi = [&](double x, double t) { return phase_field(st, t, x).phase; };
  double hyper = 0.0;
  for (double t : {0.4, 0.7, 1.0})
    for (int i = 0; i <= 8; ++i) {
      const double x = -0.4 + 0.1 * i + br.omega_xi(0.0, st.kappa) * t;
      const double c = phi(x, t);
      const double ptt = (phi(x, t + h) - 2 * c + phi(x, t - h)) / (h * h);
      const double pxx = (phi(x + h, t) - 2 * c + phi(x - h, t)) / (h * h);
      const double vg = br.omega_xi(t, st.kappa - phase_field(st, t, x).phase_x);
      hyper = std::max(hyper, std::abs(ptt - vg * vg * pxx));
    }
  s.le("hyperbolic_residual", hyper, 1e-4, "max |phi_tt - Omega_xi^2 phi_xx|, 27 points, h=2e-3");

  auto u0 = [](double sigma) { return std::exp(-sigma * sigma / (2 * 0.2 * 0.2)); };
  double forms = 0.0;
  for (double t : {0.5, 1.0})
    for (double x : {-0.2, 0.0, 0.3}) {
      const double xc = x + br.omega_xi(0.0, st.kappa) * t;
      const double a = amplitude_field(st, t, xc, u0, TransportForm::psi);
      const double b = amplitude_field(st, t, xc, u0, TransportForm::preform);
      forms = std::max(forms, std::abs(a - b) / std::max(a, 1e-300));
    }
  s.le("psi_vs_preform_relative", forms, 1e-5, "two forms of the transport exponent");

  // int u0^2 Omega(xi(sigma)) dx is conserved for a = a(y)
  auto conserved = [&](double t) {
    const double xa = characteristic_point(st, -1.6, t).x, xb = characteristic_point(st, 1.6, t).x;
    return simpson(
        [&](double x) {
          PhaseValue pv = phase_field(st, t, x);
          const double u = amplitude_field(st, t, x, u0);
          return u * u * br.omega(t, st.kappa - st.g(pv.sigma).d1);
        },
        xa, xb, 800);
  };
  const double q0 = conserved(0.0), q1 = conserved(1.0);
  s.le("transport_conservation", std::abs(q1 - q0) / q0, 1e-8, "int u0^2 Omega dx at t=1 vs t=0");
  return s.take();
}

// -------------------------------------------------------- stationary phase

SuiteReport suite_stationary_phase() {
  Suite s("stationary_phase");
  const HighContrastMedium m{0.5, 1.0};
  auto br = std::make_shared<HighContrastBranch>(2, m);
  GaussianEnvelope env;
  env.kappa_star = kPi / 4;
  env.kappa_width = 0.15;
  const double t = 4.0;
  const double xa = br->omega_xi(0, env.kappa_star - 3 * env.kappa_width) * t;
  const double xb = br->omega_xi(0, env.kappa_star + 3 * env.kappa_width) * t;
  auto& tab = s.table("sp_convergence", {"epsilon", "relative_l2_gap"});
  std::vector<double> gaps;
  bool warned = false;
  for (double inv : {40.0, 80.0, 160.0}) {
    auto spec = PacketSpec::smooth(env, 1.0 / inv, 1, br);
    auto grid = CellGrid::window(1.0 / inv, std::min(xa, xb), std::max(xa, xb), 16);
    auto q = reconstruct_quadrature(spec, grid, t);
    auto p = reconstruct_stationary_phase(spec, grid, t);
    warned = warned || q.accuracy_warning;
    gaps.push_back(l2_distance(q.values, p.values) / l2_norm(q.values));
    tab.rows.push_back({1.0 / inv, gaps.back()});
  }
  s.le("quadrature_warning", warned ? 1.0 : 0.0, 0.0, "oracle error estimate within tolerance");
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    s.in("log2_ratio[" + std::to_string(i) + "]", std::log2(gaps[i - 1] / gaps[i]), 0.7, 1.3,
         "gaps " + fmt(gaps[i - 1]) + " -> " + fmt(gaps[i]));
    s.in("halving_ratio[" + std::to_string(i) + "]", gaps[i - 1] / gaps[i], 1.7, 2.3);
  }
  return s.take();
}

// ------------------------------------------------------------------ packet

SuiteReport suite_packet() {
  Suite s("packet");
  const HighContrastMedium m{0.5, 1.0};
  auto br = std::make_shared<HighContrastBranch>(2, m);
  const double eps = 1.0 / 40;

  GaussianEnvelope env;
  env.kappa_star = kPi / 4;
  env.kappa_width = 0.15;
  env.cutoff = 5.0;  // keeps the support off kappa = 0, where the even-n limit mode degenerates
  auto spec = PacketSpec::smooth(env, eps, 1, br);
  auto grid = CellGrid::window(eps, -1.0, 1.0, 32);
  auto u = reconstruct_quadrature(spec, grid, 0.0);
  double gel = 0.0;
  for (double k : {env.kappa_star - env.kappa_width, env.kappa_star, env.kappa_star + env.kappa_width}) {
    auto g = gelfand_transform(grid, u.values, k);
    std::vector<cd> ref(grid.y.size());
    br->mode_values(0.0, k, grid.y, ref.data());
    for (cd& v : ref) v *= env(0.0, k);
    gel = std::max(gel, l2_distance(g, ref) / l2_norm(ref));
  }
  s.le("gelfand_round_trip", gel, 1e-3, "relative L2 over cell nodes at 3 quasimomenta, t=0");
  s.le("gelfand_quadrature_warning", u.accuracy_warning ? 1.0 : 0.0, 0.0, "oracle error estimate within tolerance");

  GaussianEnvelope mir = env;
  mir.mirrored = true;
  auto mspec = PacketSpec::smooth(mir, eps, 1, br);
  auto sym = reconstruct_symmetrized(mspec, CellGrid::window(eps, -1.0, 1.0, 16), 1.0);
  double im = 0.0, re = 0.0;
  for (const cd& v : sym.values) {
    im = std::max(im, std::abs(v.imag()));
    re = std::max(re, std::abs(v.real()));
  }
  s.le("symmetrized_imaginary_part", im / re, 1e-6, "max |Im| / max |Re| at t=1, mirrored envelope");

  GaussianEnvelope zero = env;
  zero.amplitude = 0.0;
  auto z = reconstruct_quadrature(PacketSpec::smooth(zero, eps, 1, br), CellGrid::window(eps, -0.5, 0.5, 8), 1.0);
  s.le("zero_envelope", l2_norm(z.values), 0.0);

  double vmax = 0.0;
  for (int j = 0; j < 2048; ++j) vmax = std::max(vmax, std::abs(br->omega_xi(0, zone_point(j, 2048))));
  auto far = reconstruct_stationary_phase(spec, 1.1 * vmax * 2.0, 2.0);
  s.le("beyond_max_group_velocity", std::abs(far), 0.0, "no stationary point, field set to zero");
  return s.take();
}

// ------------------------------------------------------------- delta pulse

double gaussian_density(double s, double w) { return std::exp(-0.5 * s * s / (w * w)) / (std::sqrt(kTwoPi) * w); }

// max of uniformly spaced samples refined by a parabola through the top three
double refined_max(const std::vector<double>& v) {
  std::size_t i = std::max_element(v.begin(), v.end()) - v.begin();
  if (i == 0 || i + 1 == v.size()) return v[i];
  const double a = v[i - 1], b = v[i], c = v[i + 1];
  const double den = a - 2 * b + c;
  return den < 0 ? b - (c - a) * (c - a) / (8 * den) : b;
}

SuiteReport suite_delta_pulse() {
  Suite s("delta_pulse");
  const HighContrastMedium m{0.5, 1.0};
  const double eps = 1.0 / 80, w = 8 * eps;
  auto f = [](double x) { return std::exp(-x * x); };

  auto br2 = std::make_shared<HighContrastBranch>(2, m);
  const double ks = kPi / 3;
  auto spec = PacketSpec::delta(ks, f, eps, 1, br2);
  auto& tab = s.table("pulse_peaks", {"t", "center", "peak"});
  std::vector<double> peaks;
  double center_err = 0.0;
  for (double t : {0.25, 1.0, 4.0}) {
    const double c = br2->omega_xi(0, ks) * t;
    auto grid = CellGrid::window(eps, c - 6 * w, c + 6 * w, 256);
    DeltaPulse d = delta_pulse_field(spec, t, grid, w);
    double num = 0.0, den = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double a2 = std::norm(d.field.values[i]);
      num += grid.x(i) * a2;
      den += a2;
      peak = std::max(peak, std::sqrt(a2));
    }
    center_err = std::max(center_err, std::abs(num / den - c));
    peaks.push_back(peak);
    tab.rows.push_back({t, num / den, peak});
  }
  s.le("center_offset", center_err, w, "energy-weighted center vs Omega'(kappa*) t; bound = width");
  double decay = 0.0;
  const double ts[] = {0.25, 1.0, 4.0};
  for (int i = 0; i < 3; ++i) decay = std::max(decay, std::abs(peaks[i] * std::sqrt(ts[i]) / peaks[1] - 1.0));
  s.le("peak_t_half_decay", decay, 1e-2, "max |peak(t) sqrt(t) / peak(1) - 1|");

  auto& rt = s.table("amplitude_ratios", {"n", "sampled", "exact", "printed_formula"});
  double vs_exact = 0.0, vs_printed = 0.0;
  for (int n = 2; n <= 8; ++n) {
    auto br = std::make_shared<HighContrastBranch>(n, m);
    auto dspec = PacketSpec::delta(ks, f, eps, 1, br);
    const double t = 1.0;
    const double c = br->omega_xi(0, ks) * t;
    const long cell = static_cast<long>(std::floor(c / eps));
    CellGrid grid;
    grid.epsilon = eps;
    grid.m_lo = grid.m_hi = cell;
    const int ny = 8192;
    for (int j = 0; j < ny; ++j) grid.y.push_back(double(j) / ny);
    DeltaPulse d = delta_pulse_field(dspec, t, grid, w);
    std::vector<double> stiff, soft;
    for (int j = 0; j < ny; ++j) {
      const double mod = std::abs(d.field.values[j]) / (d.prefactor * gaussian_density(grid.x(j) - c, w));
      (grid.y[j] < m.h ? stiff : soft).push_back(mod);
    }
    const double ratio = refined_max(stiff) / refined_max(soft);
    HCPulseAmplitudes amp = hc_pulse_amplitudes(n, ks, m, t, f(0.0));
    vs_exact = std::max(vs_exact, std::abs(ratio - amp.ratio_exact));
    vs_printed = std::max(vs_printed, std::abs(ratio - amp.ratio_formula));
    rt.rows.push_back({double(n), ratio, amp.ratio_exact, amp.ratio_formula});
  }
  s.le("ratio_vs_exact_eigenfunction", vs_exact, 1e-6, "sampled stiff/soft maxima vs limit eigenfunction, n=2..8");
  s.le("ratio_vs_2(1-h)/(n pi h)", vs_printed, 1e-6, "sampled stiff/soft maxima vs closed-form ratio, n=2..8");

  auto& rs = s.table("resonance", {"n", "kappa_star", "stiff", "soft_max"});
  double stiff_fall = 0.0, soft_growth = 1e300;
  for (int n : {2, 4}) {
    std::vector<double> st, so;
    for (double k : {0.4, 0.2, 0.1, 0.05}) {
      HCPulseAmplitudes a = hc_pulse_amplitudes(n, k, m, 1.0, 1.0);
      st.push_back(a.stiff_exact);
      so.push_back(a.soft_max_exact);
      rs.rows.push_back({double(n), k, a.stiff_exact, a.soft_max_exact});
    }
    stiff_fall = std::max(stiff_fall, st.back() / st.front());
    soft_growth = std::min(soft_growth, so.back() / so.front());
  }
  s.le("resonance_stiff_vanishes", stiff_fall, 0.2, "stiff(kappa*=0.05) / stiff(kappa*=0.4), even n");
  s.ge("resonance_soft_diverges", soft_growth, 4.0,
       "soft(kappa*=0.05) / soft(kappa*=0.4), even n; a 1/kappa* divergence gives 8");
  return s.take();
}

// ------------------------------------------------------------------ energy

SuiteReport suite_energy() {
  Suite s("energy");
  const HighContrastMedium m{0.5, 1.0};
  auto br = std::make_shared<HighContrastBranch>(2, m);
  GaussianEnvelope env;
  env.kappa_star = kPi / 4;
  env.kappa_width = 0.3;
  PhaseFamily fam;
  fam.branch = br;
  fam.sign = 1;
  fam.kappa_lo = 0.2;
  fam.kappa_hi = 1.4;
  AmplitudeFn amp = [&](double x, double t, double k) { return env(x - br->omega_xi(t, k) * t, k); };

  const std::vector<double> ts = {0.1, 0.25, 0.5, 0.75, 1.0};
  EnergySeries q = energy_between_characteristics_asymptotic(fam, amp, kPi / 4 - 0.3, kPi / 4 + 0.3, ts);
  s.le("q_drift_asymptotic", q.max_relative_drift, 1e-6, "max |Q(t) - Q(t0)| / Q(t0)");
  auto& qt = s.table("q_series_asymptotic", {"t", "x1", "x2", "q"});
  for (std::size_t i = 0; i < q.t.size(); ++i) qt.rows.push_back({q.t[i], q.x1[i], q.x2[i], q.q[i]});

  const int nx = 50, nt = 50;
  const double t_lo = 0.6, t_hi = 1.0;
  const double x_lo = br->omega_xi(0, 0.35) * t_hi, x_hi = br->omega_xi(0, 1.25) * t_lo;
  std::vector<double> xs(nx), tv(nt);
  for (int i = 0; i < nx; ++i) xs[i] = x_lo + (x_hi - x_lo) * i / (nx - 1);
  for (int i = 0; i < nt; ++i) tv[i] = t_lo + (t_hi - t_lo) * i / (nt - 1);
  LocalWaveData d = local_fields(fam, xs, tv);
  s.le("excluded_points", d.excluded, 0.0, "50 x 50 grid");
  s.le("dispersion_residual", d.dispersion_residual, 1e-6, "max |omega_hat - Omega(t, k_hat)|");

  // conservation-law residuals on a 50 x 50 patch around the packet center
  const double t0 = 0.8, x0 = br->omega_xi(0, kPi / 4) * t0, w = 0.01;
  std::vector<double> px(nx), pt(nt);
  for (int i = 0; i < nx; ++i) px[i] = x0 - w / 2 + w * i / (nx - 1);
  for (int i = 0; i < nt; ++i) pt[i] = t0 - w / 2 + w * i / (nt - 1);
  LocalWaveData patch = local_fields(fam, px, pt);
  TransportResiduals r = transport_residuals(patch, fam, 2);
  s.le("transport_residual_kappa", r.r_kappa, 1e-5, "second-order differences, 50 x 50 patch of width 0.01");
  s.le("transport_residual_k", r.r_k, 1e-5, "second-order differences, 50 x 50 patch of width 0.01");
  s.le("energy_flux_residual", energy_flux_check(patch, fam, amp, 2), 1e-4,
       "second-order differences, 50 x 50 patch of width 0.01");
  return s.take();
}

// -------------------------------------------------------------- end to end

double weighted_relative_l2(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return std::sqrt(integrate_square(x, diff, x.front(), x.back()) / integrate_square(x, a, x.front(), x.back()));
}

SuiteReport suite_end_to_end() {
  Suite s("end_to_end");
  const auto profile = CellProfile::two_phase(0.5, 1e4, 1.0);
  auto br = std::make_shared<CellBranch>(CellCoefficient(profile), 0, 256);
  const double ks = 1.9;
  const std::vector<double> snaps = {0.25, 0.5, 0.75, 1.0};

  GaussianEnvelope env;
  env.kappa_star = ks;
  env.kappa_width = 0.2;
  env.cutoff = 6.0;
  env.x_width = 0.25;
  auto& conv = s.table("convergence", {"epsilon", "nodes_per_cell", "relative_l2_error"});
  auto& cen = s.table("centroid", {"t", "centroid"});
  std::vector<double> errs;
  for (double inv : {20.0, 40.0, 80.0}) {
    const double eps = 1.0 / inv;
    auto spec = PacketSpec::smooth(env, eps, 1, br);
    auto [a, b] = suggested_window(-5 * env.x_width, 5 * env.x_width, 1.5, 1.0);
    FineGrid grid = cell_aligned_grid(profile, eps, a, b, 256);
    add_sponge(grid);
    FineGridState st = prepared_initial_data(spec, grid);
    FdtdRun run = run_fdtd(st, snaps);
    auto ref = reconstruct_quadrature(spec, grid.cells, 1.0);
    const std::size_t nc = grid.cells.size();
    std::vector<double> xs(grid.x.begin(), grid.x.begin() + nc), fd(run.snapshots.back().u.begin(),
                                                                     run.snapshots.back().u.begin() + nc),
        re(nc);
    for (std::size_t i = 0; i < nc; ++i) re[i] = ref.values[i].real();
    errs.push_back(weighted_relative_l2(xs, fd, re));
    conv.rows.push_back({eps, 256.0, errs.back()});
    if (inv == 80.0) s.info("modified_energy_drift[eps=1/80]", run.energy_drift, "sum of per-interval changes, sponge active");
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    s.le("error_decreases[" + std::to_string(i) + "]", errs[i] - errs[i - 1], 0.0,
         "error " + fmt(errs[i - 1]) + " -> " + fmt(errs[i]));
    s.ge("observed_rate[" + std::to_string(i) + "]", std::log2(errs[i - 1] / errs[i]), 0.8);
  }
  // the centroid moves at the energy-weighted mean group velocity, which is
  // within O(kappa_width^2) of Omega'(kappa*); a narrow envelope isolates it
  {
    GaussianEnvelope narrow;
    narrow.kappa_star = ks;
    narrow.kappa_width = 0.1;
    narrow.cutoff = 6.0;
    const double eps = 1.0 / 80;
    auto spec = PacketSpec::smooth(narrow, eps, 1, br);
    const double half = 8 * eps / narrow.kappa_width;
    auto [a, b] = suggested_window(-half, half, 1.5, 1.0);
    FineGrid grid = cell_aligned_grid(profile, eps, a, b, 64);
    add_sponge(grid);
    FineGridState st = prepared_initial_data(spec, grid);
    std::vector<double> tt = {0.0}, cc = {energy_centroid(grid, st.u, st.v)};
    FdtdRun run = run_fdtd(st, snaps);
    for (const FieldSnapshot& f : run.snapshots) {
      tt.push_back(f.t);
      cc.push_back(energy_centroid(grid, f.u, f.v));
    }
    // least-squares slope over t in [0, 1]
    double tm = 0, cm = 0;
    for (std::size_t i = 0; i < tt.size(); ++i) tm += tt[i] / tt.size(), cm += cc[i] / tt.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < tt.size(); ++i) sxy += (tt[i] - tm) * (cc[i] - cm), sxx += (tt[i] - tm) * (tt[i] - tm);
    const double speed = sxy / sxx;
    for (std::size_t i = 0; i < tt.size(); ++i) cen.rows.push_back({tt[i], cc[i]});
    const double vg = br->omega_xi(0.0, ks);
    s.le("centroid_speed_relative", std::abs(speed / vg - 1.0), 0.02,
         "centroid slope " + fmt(speed) + " vs Omega'(kappa*) " + fmt(vg) + ", eps=1/80, kappa_width 0.1");
  }

  // wideband packet for energy between characteristics
  GaussianEnvelope wide;
  wide.kappa_star = ks;
  wide.kappa_width = 0.38;
  wide.cutoff = 3.2;
  const double eps = 1.0 / 80;
  auto spec = PacketSpec::smooth(wide, eps, 1, br);
  const double half = 8 * eps / wide.kappa_width;
  auto [a, b] = suggested_window(-half, half, 1.5, 1.0);
  FineGrid grid = cell_aligned_grid(profile, eps, a, b, 128);
  add_sponge(grid);
  FineGridState st = prepared_initial_data(spec, grid);
  FdtdRun run = run_fdtd(st, snaps);
  PhaseFamily fam;
  fam.branch = br;
  fam.sign = 1;
  const double k1 = ks - 3 * wide.kappa_width, k2 = ks + 3 * wide.kappa_width;
  EnergySeries q = energy_between_characteristics_fdtd(fam, grid, run.snapshots, k1, k2);
  auto& qt = s.table("q_series_fdtd", {"t", "x1", "x2", "q"});
  for (std::size_t i = 0; i < q.t.size(); ++i) qt.rows.push_back({q.t[i], q.x1[i], q.x2[i], q.q[i]});
  s.le("q_drift_fdtd", q.max_relative_drift, 0.05, "eps=1/80, t in {0.25, 0.5, 0.75, 1}");
  return s.take();
}

using SuiteFn = SuiteReport (*)();

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"constant", suite_constant},
      {"lemmas", suite_lemmas},
      {"figure1", suite_figure1},
      {"asymptotics", suite_asymptotics},
      {"coupling", suite_coupling},
      {"eikonal", suite_eikonal},
      {"stationary_phase", suite_stationary_phase},
      {"packet", suite_packet},
      {"delta_pulse", suite_delta_pulse},
      {"energy", suite_energy},
      {"end_to_end", suite_end_to_end},
  };
  return r;
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.gating || c.pass; });
}

CheckResult check_le(std::string suite, std::string name, double value, double tolerance, std::string detail) {
  const bool ok = std::isfinite(value) && value <= tolerance;
  return make_check(std::move(suite), std::move(name), value, 0.0, tolerance, "<=", ok, std::move(detail));
}

CheckResult check_ge(std::string suite, std::string name, double value, double bound, std::string detail) {
  const bool ok = std::isfinite(value) && value >= bound;
  return make_check(std::move(suite), std::move(name), value, 0.0, bound, ">=", ok, std::move(detail));
}

CheckResult check_in(std::string suite, std::string name, double value, double lo, double hi, std::string detail) {
  const bool ok = std::isfinite(value) && value >= lo && value <= hi;
  return make_check(std::move(suite), std::move(name), value, lo, hi, "in", ok, std::move(detail));
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

SuiteReport run_suite(const std::string& name) {
  for (const auto& [n, fn] : registry())
    if (n == name) return fn();
  fail(ErrorCode::invalid_argument, "unknown validation suite '" + name + "'");
}

}  // namespace bwkb
