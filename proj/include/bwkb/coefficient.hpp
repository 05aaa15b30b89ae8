#pragma once

#include <complex>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bwkb {

struct Segment {
  double fraction;
  double value;
};

// One periodic profile a(y) on the unit cell [0, 1).
class CellProfile {
 public:
  enum class Kind { piecewise, sampled };

  static CellProfile piecewise(std::vector<Segment> segments);
  static CellProfile sampled(std::vector<double> samples);
  static CellProfile constant(double a);
  // stiff segment [0, h) with value a1, soft segment [h, 1) with value a2
  static CellProfile two_phase(double h, double a1, double a2);

  Kind kind() const { return kind_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& samples() const { return samples_; }

  // y is reduced modulo 1
  double operator()(double y) const;
  double min_value() const;
  double max_value() const;
  bool is_constant() const;
  // segment start points in [0, 1), first is always 0 (piecewise only)
  std::vector<double> breakpoints() const;
  // (1/(y1-y0)) * integral of 1/a over [y0, y1], inverted; y0 < y1, any real values
  double harmonic_mean(double y0, double y1) const;
  // integral over the cell of a(y) exp(-2 pi i k y)
  std::complex<double> fourier_coefficient(int k) const;

  // Pointwise blend (1-w) p + w q; both must share kind and layout.
  static CellProfile blend(const CellProfile& p, const CellProfile& q, double w);
  bool same_layout(const CellProfile& other) const;

 private:
  Kind kind_ = Kind::piecewise;
  std::vector<Segment> segments_;
  std::vector<double> samples_;
  std::vector<std::complex<double>> dft_;  // sampled: centered DFT coefficients
  double integral_inverse(double y0, double y1) const;
};

// a(y, t): a single profile, or profiles at increasing time stamps with
// linear interpolation between them (held constant outside the stamp range).
class CellCoefficient {
 public:
  CellCoefficient() = default;
  explicit CellCoefficient(CellProfile profile);
  CellCoefficient(std::vector<double> stamps, std::vector<CellProfile> profiles);

  bool time_dependent() const { return profiles_.size() > 1; }
  CellProfile at(double t) const;
  const std::vector<double>& stamps() const { return stamps_; }
  const std::vector<CellProfile>& profiles() const { return profiles_; }
  const CellProfile& profile(std::size_t i = 0) const { return profiles_.at(i); }
  double value(double y, double t = 0.0) const;

  static CellCoefficient from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::vector<double> stamps_;
  std::vector<CellProfile> profiles_;
};

}  // namespace bwkb
