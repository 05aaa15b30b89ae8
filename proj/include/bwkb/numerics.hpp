#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bwkb {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(int n);
// Gauss-Lobatto-Legendre nodes for polynomial order p (p + 1 nodes).
QuadratureRule gauss_lobatto(int p);

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
struct KronrodRule {
  double nodes[15];
  double kronrod_weights[15];
  double gauss_weights[15];  // zero on Kronrod-only nodes
};
const KronrodRule& gauss_kronrod15();

// Barycentric weights for Lagrange interpolation on the given nodes.
std::vector<double> barycentric_weights(const std::vector<double>& nodes);

using ScalarFn = std::function<double(double)>;

// Bracketed root of f on [a, b] (f(a), f(b) of opposite sign or zero).
// Brent's method; absolute tolerance xtol.
double find_root(const ScalarFn& f, double a, double b, double xtol = 1e-15, int max_iter = 200);
double bisect(const ScalarFn& f, double a, double b, double xtol, int max_iter = 200);

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth = 40);
double simpson(const ScalarFn& f, double a, double b, int intervals);

// Scalar quintic Hermite interpolation on one interval from value, first and
// second derivative at both ends. Returns value and first two derivatives.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
Jet quintic_hermite(double x0, const Jet& left, double x1, const Jet& right, double x);

// Natural cubic spline on strictly increasing abscissae.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  Jet operator()(double x) const;
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic number formatting used in all CSV output.
std::string format_number(double v);

}  // namespace bwkb
