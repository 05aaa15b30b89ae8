#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bwkb/dispersion.hpp"

namespace bwkb {

using Envelope = std::function<double(double x, double kappa)>;

// Gaussian in kappa around kappa_star (cut to zero beyond cutoff widths),
// optionally times a Gaussian in x; x_width = 0 means no x-dependence.
struct GaussianEnvelope {
  double amplitude = 1.0;
  double kappa_star = 0.0;
  double kappa_width = 0.1;
  double x_center = 0.0;
  double x_width = 0.0;
  double cutoff = 7.0;
  bool mirrored = false;  // add the partner hump at -kappa_star
  double operator()(double x, double kappa) const;
  double kappa_lo() const;
  double kappa_hi() const;
};

struct PacketSpec {
  enum class Kind { smooth, delta };
  Kind kind = Kind::smooth;
  Envelope envelope;             // smooth case
  double kappa_lo = -kPi;        // support of the envelope in kappa
  double kappa_hi = kPi;
  double kappa_star = 0.0;       // delta case
  std::function<double(double)> amplitude;  // delta case: f(x)
  double epsilon = 0.0;
  int sign = 1;
  std::shared_ptr<const DispersionBranch> branch;

  static PacketSpec smooth(const GaussianEnvelope& env, double epsilon, int sign,
                           std::shared_ptr<const DispersionBranch> branch);
  static PacketSpec delta(double kappa_star, std::function<double(double)> f, double epsilon, int sign,
                          std::shared_ptr<const DispersionBranch> branch);
  void validate() const;
};

// Sample points x = epsilon (m + y_j) for cells m_lo..m_hi and cell nodes y_j.
struct CellGrid {
  double epsilon = 0.0;
  std::vector<double> y;
  long m_lo = 0;
  long m_hi = -1;

  static CellGrid window(double epsilon, double a, double b, int nodes_per_cell);
  static CellGrid point(double epsilon, double x);
  std::size_t cells() const { return m_hi >= m_lo ? static_cast<std::size_t>(m_hi - m_lo + 1) : 0; }
  std::size_t size() const { return cells() * y.size(); }
  double x(std::size_t i) const;
  double cell_coordinate(std::size_t i) const { return static_cast<double>(m_lo + long(i / y.size())) + y[i % y.size()]; }
  std::vector<double> xs() const;
};

struct StationaryPoint {
  double kappa = 0.0;
  double curvature_integral = 0.0;  // int_0^t Omega_kk ds
  bool degenerate = false;
};

// Sign scan of +-int_0^t Omega_k ds - x over a kappa grid, reusable for many x.
class StationaryScanner {
 public:
  StationaryScanner(std::shared_ptr<const DispersionBranch> branch, double t, int sign, int points = 4096,
                    double kappa_lo = -kPi, double kappa_hi = kPi);
  std::vector<StationaryPoint> find(double x) const;

 private:
  std::shared_ptr<const DispersionBranch> branch_;
  double t_;
  int sign_;
  std::vector<double> kappa_, drift_;
  double drift_of(double kappa) const;
};

std::vector<StationaryPoint> stationary_points(double x, double t, std::shared_ptr<const DispersionBranch> branch,
                                               int sign);

enum class ReconstructionMethod { stationary_phase, quadrature, delta_pulse };
const char* method_name(ReconstructionMethod m);

struct ReconstructedField {
  CellGrid grid;
  double t = 0.0;
  ReconstructionMethod method = ReconstructionMethod::quadrature;
  std::vector<std::complex<double>> values;
  std::vector<std::vector<StationaryPoint>> points;  // stationary phase only
  std::vector<bool> negligible;                      // no stationary point
  std::vector<double> error_estimate;                // quadrature only
  bool accuracy_warning = false;
  std::string warning;
};

ReconstructedField reconstruct_stationary_phase(const PacketSpec& spec, const CellGrid& grid, double t);
std::complex<double> reconstruct_stationary_phase(const PacketSpec& spec, double x, double t);

struct QuadratureOptions {
  double panels_per_unit_scale = 40.0;  // panels over 2 pi per unit of 1/epsilon
  long max_panels = 2000000;
  double warn_tolerance = 1e-8;         // relative to the field maximum
};
ReconstructedField reconstruct_quadrature(const PacketSpec& spec, const CellGrid& grid, double t,
                                          const QuadratureOptions& opts = {});
std::complex<double> reconstruct_quadrature(const PacketSpec& spec, double x, double t);

// Half-sum of the + and - branch reconstructions (real for mirrored envelopes).
ReconstructedField reconstruct_symmetrized(const PacketSpec& spec, const CellGrid& grid, double t,
                                           const QuadratureOptions& opts = {});

// Time derivative of the leading-order quadrature field at t = 0.
std::vector<std::complex<double>> quadrature_time_derivative(const PacketSpec& spec, const CellGrid& grid,
                                                             const QuadratureOptions& opts = {});

struct DeltaPulse {
  double center = 0.0;
  double prefactor = 0.0;  // f(0)/sqrt(t |Omega''|)
  double width = 0.0;
  ReconstructedField field;
};
DeltaPulse delta_pulse_field(const PacketSpec& spec, double t, const CellGrid& grid, double width = 0.0);

// G(y_j, kappa) = (1/2pi) sum_m u(eps (y_j + m)) exp(-i kappa (y_j + m)) over the grid cells.
std::vector<std::complex<double>> gelfand_transform(const CellGrid& grid, std::span<const std::complex<double>> u,
                                                    double kappa);

double l2_norm(std::span<const std::complex<double>> v);
double l2_distance(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

}  // namespace bwkb
