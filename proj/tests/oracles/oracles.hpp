#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

// Reference computations used only by tests. They share no numerical code
// with the library: each one discretizes the problem its own way.
namespace oracle {

// -(a u')' = omega^2 u on one period, a piecewise constant over layers.
struct Layer {
  double length;
  double a;
};

// Exact monodromy of the layered cell; returns trace / 2.
double layered_half_trace(const std::vector<Layer>& cell, double omega);

// Second-order flux-form finite differences on n uniform nodes of the unit
// cell, a sampled at cell midpoints of the stencil; returns trace / 2 of the
// one-period recurrence map at eigenvalue omega^2.
double fd_half_trace(const std::function<double(double)>& a, int nodes, double omega);

// Ascending frequencies omega >= 0 with half_trace(omega) = cos(xi), found by
// a uniform scan of step omega_step followed by bisection. xi must stay away
// from 0 and +-pi, where roots are tangential.
std::vector<double> bloch_frequencies(const std::function<double(double)>& half_trace, double xi, int count,
                                      double omega_step);

// Band intervals [lo, hi] where |half_trace| <= 1, scanning up to omega_max.
std::vector<std::pair<double, double>> band_intervals(const std::function<double(double)>& half_trace,
                                                      double omega_max, double omega_step);

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15);

// q_t + (v(x, t) q)_x = 0 on [a, b] with zero boundary values: MUSCL
// reconstruction with the minmod limiter, upwind fluxes, SSP-RK2 in time.
// velocity(face, x, t) is queried at the cell faces x_face = a + face * dx.
std::vector<double> finite_volume_advect(std::vector<double> q0, double a, double b, double t_final,
                                         const std::function<double(std::size_t, double, double)>& velocity,
                                         double max_speed, double cfl = 0.4);

// All roots of f on [lo, hi] from a uniform scan with `points` samples.
std::vector<double> dense_roots(const std::function<double(double)>& f, double lo, double hi, int points);

}  // namespace oracle
