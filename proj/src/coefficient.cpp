#include "bwkb/coefficient.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "bwkb/error.hpp"
#include "bwkb/numerics.hpp"

namespace bwkb {

namespace {

void check_value(double a, const char* what) {
  if (!(std::isfinite(a) && a > 0.0))
    fail(ErrorCode::invalid_argument, std::string(what) + ": coefficient values must be positive and finite");
}

double wrap_unit(double y) {
  double r = y - std::floor(y);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

CellProfile CellProfile::piecewise(std::vector<Segment> segments) {
  require(!segments.empty(), "piecewise profile needs at least one segment");
  double total = 0.0;
  for (const auto& s : segments) {
    require(std::isfinite(s.fraction) && s.fraction > 0.0, "segment fractions must be positive");
    check_value(s.value, "piecewise profile");
    total += s.fraction;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::invalid_argument, "segment fractions must sum to 1");
  CellProfile p;
  p.kind_ = Kind::piecewise;
  p.segments_ = std::move(segments);
  return p;
}

CellProfile CellProfile::sampled(std::vector<double> samples) {
  require(samples.size() >= 8, "sampled profile needs at least 8 points");
  for (double a : samples) check_value(a, "sampled profile");
  CellProfile p;
  p.kind_ = Kind::sampled;
  p.samples_ = std::move(samples);
  const int n = static_cast<int>(p.samples_.size());
  p.dft_.assign(n / 2 + 1, 0.0);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> s = 0.0;
    for (int j = 0; j < n; ++j) s += p.samples_[j] * std::polar(1.0, -kTwoPi * k * j / n);
    s /= static_cast<double>(n);
    if (n % 2 == 0 && k == n / 2) s *= 0.5;  // split the Nyquist term symmetrically
    p.dft_[k] = s;
  }
  return p;
}

CellProfile CellProfile::constant(double a) { return piecewise({{1.0, a}}); }

CellProfile CellProfile::two_phase(double h, double a1, double a2) {
  require(h > 0.0 && h < 1.0, "two-phase profile: h must lie in (0, 1)");
  return piecewise({{h, a1}, {1.0 - h, a2}});
}

double CellProfile::operator()(double y) const {
  y = wrap_unit(y);
  if (kind_ == Kind::piecewise) {
    double start = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      start += segments_[i].fraction;
      if (y < start || i + 1 == segments_.size()) return segments_[i].value;
    }
    return segments_.back().value;
  }
  // trigonometric interpolant through the samples
  double v = dft_[0].real();
  for (std::size_t k = 1; k < dft_.size(); ++k) v += 2.0 * (dft_[k] * std::polar(1.0, kTwoPi * k * y)).real();
  return v;
}

double CellProfile::min_value() const {
  if (kind_ == Kind::piecewise) {
    double m = segments_[0].value;
    for (const auto& s : segments_) m = std::min(m, s.value);
    return m;
  }
  return *std::min_element(samples_.begin(), samples_.end());
}

double CellProfile::max_value() const {
  if (kind_ == Kind::piecewise) {
    double m = segments_[0].value;
    for (const auto& s : segments_) m = std::max(m, s.value);
    return m;
  }
  return *std::max_element(samples_.begin(), samples_.end());
}

bool CellProfile::is_constant() const { return min_value() == max_value(); }

std::vector<double> CellProfile::breakpoints() const {
  std::vector<double> b;
  double start = 0.0;
  for (const auto& s : segments_) {
    b.push_back(start);
    start += s.fraction;
  }
  return b;
}

double CellProfile::integral_inverse(double y0, double y1) const {
  if (kind_ == Kind::sampled) {
    // smooth integrand: composite Gauss on sub-panels of width <= 1/(4n)
    const int panels = std::max(1, static_cast<int>(std::ceil((y1 - y0) * 4.0 * samples_.size())));
    static const QuadratureRule g = gauss_legendre(8);
    double h = (y1 - y0) / panels, s = 0.0;
    for (int p = 0; p < panels; ++p) {
      double c = y0 + (p + 0.5) * h;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] * 0.5 * h / (*this)(c + 0.5 * h * g.nodes[q]);
    }
    return s;
  }
  // piecewise: walk segments across cells
  double s = 0.0;
  double y = y0;
  const auto bp = breakpoints();
  while (y < y1) {
    double cell = std::floor(y);
    double local = y - cell;
    std::size_t i = 0;
    while (i + 1 < bp.size() && bp[i + 1] <= local) ++i;
    double seg_end = cell + (i + 1 < bp.size() ? bp[i + 1] : 1.0);
    double stop = std::min(seg_end, y1);
    if (stop <= y) stop = std::nextafter(y, y1);  // rounding guard at breakpoints
    s += (stop - y) / segments_[i].value;
    y = stop;
  }
  return s;
}

double CellProfile::harmonic_mean(double y0, double y1) const {
  require(y1 > y0, "harmonic_mean: empty interval");
  return (y1 - y0) / integral_inverse(y0, y1);
}

std::complex<double> CellProfile::fourier_coefficient(int k) const {
  if (kind_ == Kind::sampled) {
    const int n = static_cast<int>(samples_.size());
    int ak = std::abs(k);
    if (ak > n / 2) return 0.0;
    return k >= 0 ? dft_[ak] : std::conj(dft_[ak]);
  }
  std::complex<double> s = 0.0;
  double start = 0.0;
  for (const auto& seg : segments_) {
    double end = start + seg.fraction;
    if (k == 0) {
      s += seg.value * seg.fraction;
    } else {
      double w = kTwoPi * k;
      // reduce k*y mod 1 first so integer multiples of the period stay exact
      auto phase = [k](double y) {
        double r = std::fmod(k * y, 1.0);
        return std::polar(1.0, -kTwoPi * r);
      };
      s += seg.value * (phase(end) - phase(start)) / std::complex<double>(0.0, -w);
    }
    start = end;
  }
  return s;
}

bool CellProfile::same_layout(const CellProfile& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::sampled) return samples_.size() == o.samples_.size();
  if (segments_.size() != o.segments_.size()) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (std::abs(segments_[i].fraction - o.segments_[i].fraction) > 1e-14) return false;
  return true;
}

CellProfile CellProfile::blend(const CellProfile& p, const CellProfile& q, double w) {
  require(p.same_layout(q), "time-stamped profiles must share kind and segment layout");
  if (p.kind_ == Kind::sampled) {
    std::vector<double> s(p.samples_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = (1 - w) * p.samples_[i] + w * q.samples_[i];
    return sampled(std::move(s));
  }
  std::vector<Segment> s = p.segments_;
  for (std::size_t i = 0; i < s.size(); ++i) s[i].value = (1 - w) * p.segments_[i].value + w * q.segments_[i].value;
  CellProfile r;
  r.kind_ = Kind::piecewise;
  r.segments_ = std::move(s);
  return r;
}

CellCoefficient::CellCoefficient(CellProfile profile) : stamps_{0.0}, profiles_{std::move(profile)} {}

CellCoefficient::CellCoefficient(std::vector<double> stamps, std::vector<CellProfile> profiles)
    : stamps_(std::move(stamps)), profiles_(std::move(profiles)) {
  require(!profiles_.empty() && stamps_.size() == profiles_.size(), "one profile per time stamp required");
  for (std::size_t i = 1; i < stamps_.size(); ++i) {
    require(stamps_[i] > stamps_[i - 1], "time stamps must increase");
    require(profiles_[i].same_layout(profiles_[0]), "time-stamped profiles must share kind and segment layout");
  }
}

CellProfile CellCoefficient::at(double t) const {
  if (profiles_.size() == 1 || t <= stamps_.front()) return profiles_.front();
  if (t >= stamps_.back()) return profiles_.back();
  std::size_t i = std::upper_bound(stamps_.begin(), stamps_.end(), t) - stamps_.begin();
  double w = (t - stamps_[i - 1]) / (stamps_[i] - stamps_[i - 1]);
  return CellProfile::blend(profiles_[i - 1], profiles_[i], w);
}

double CellCoefficient::value(double y, double t) const { return at(t)(y); }

namespace {

CellProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) fail(ErrorCode::schema, "coefficient: missing field 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "piecewise") {
    if (!j.contains("segments") || !j["segments"].is_array())
      fail(ErrorCode::schema, "coefficient: piecewise profile needs array field 'segments'");
    std::vector<Segment> segs;
    for (std::size_t i = 0; i < j["segments"].size(); ++i) {
      const auto& s = j["segments"][i];
      if (!s.is_array() || s.size() != 2)
        fail(ErrorCode::schema, "coefficient: segments[" + std::to_string(i) + "] must be [fraction, value]");
      segs.push_back({s[0].get<double>(), s[1].get<double>()});
    }
    return CellProfile::piecewise(std::move(segs));
  }
  if (kind == "sampled") {
    if (!j.contains("samples") || !j["samples"].is_array())
      fail(ErrorCode::schema, "coefficient: sampled profile needs array field 'samples'");
    return CellProfile::sampled(j["samples"].get<std::vector<double>>());
  }
  fail(ErrorCode::schema, "coefficient: unknown kind '" + kind + "'");
}

nlohmann::json profile_to_json(const CellProfile& p) {
  nlohmann::json j;
  if (p.kind() == CellProfile::Kind::piecewise) {
    j["kind"] = "piecewise";
    j["segments"] = nlohmann::json::array();
    for (const auto& s : p.segments()) j["segments"].push_back({s.fraction, s.value});
  } else {
    j["kind"] = "sampled";
    j["samples"] = p.samples();
  }
  return j;
}

}  // namespace

CellCoefficient CellCoefficient::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("time_dependence")) {
      std::vector<double> stamps;
      std::vector<CellProfile> profiles;
      for (const auto& e : j.at("time_dependence")) {
        stamps.push_back(e.at("t").get<double>());
        profiles.push_back(profile_from_json(e.at("profile")));
      }
      return CellCoefficient(std::move(stamps), std::move(profiles));
    }
    return CellCoefficient(profile_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("coefficient: ") + e.what());
  }
}

nlohmann::json CellCoefficient::to_json() const {
  if (!time_dependent()) return profile_to_json(profiles_[0]);
  nlohmann::json j;
  j["time_dependence"] = nlohmann::json::array();
  for (std::size_t i = 0; i < profiles_.size(); ++i)
    j["time_dependence"].push_back({{"t", stamps_[i]}, {"profile", profile_to_json(profiles_[i])}});
  return j;
}

}  // namespace bwkb
