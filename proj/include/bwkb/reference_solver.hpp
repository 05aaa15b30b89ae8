#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bwkb/coefficient.hpp"
#include "bwkb/wavepacket.hpp"

namespace bwkb {

// Node-based flux-form discretization of u_tt = (a u_x)_x: linear elements
// with one coefficient each, lumped mass.
struct FineGrid {
  std::vector<double> x;       // nodes, increasing
  std::vector<double> coeff;   // per element (nodes i, i+1; last wraps when periodic)
  std::vector<double> length;  // per element
  std::vector<double> mass;    // lumped, per node
  bool periodic = false;
  double period = 0.0;         // periodic window length
  CellGrid cells;              // cell-aligned grids: nodes 0..cells.size()-1
  bool cell_aligned = false;
  double sponge_lo = 0.0;      // damping acts on x < sponge_lo and x > sponge_hi
  double sponge_hi = 0.0;
  std::vector<double> damping; // rate per node

  std::size_t size() const { return x.size(); }
  double min_spacing() const;
  // Gershgorin bound on the largest eigenvalue of M^-1 K
  double max_frequency_squared() const;
};

FineGrid periodic_uniform_grid(double length, int nodes, const std::function<double(double)>& a);
// y-nodes for one cell: per segment counts scaled by 1/sqrt(a) (piecewise),
// or uniform (sampled)
std::vector<double> cell_nodes(const CellProfile& profile, int nodes_per_cell);
FineGrid cell_aligned_grid(const CellProfile& profile, double epsilon, double a, double b, int nodes_per_cell);

struct SpongeOptions {
  double fraction = 0.1;  // of the window, at each end
  double strength = 0.0;  // peak damping rate; 0 picks one from the window size
};
void add_sponge(FineGrid& grid, const SpongeOptions& opts = {});

// window = support + 2 (max speed) t_final, widened by 20% on each side
std::pair<double, double> suggested_window(double support_lo, double support_hi, double max_speed, double t_final);

struct FineGridState {
  FineGrid grid;
  std::vector<double> u, v;
  double t = 0.0;
  double cfl = 0.9;
};

// Real parts of the leading-order quadrature field and its time derivative at t = 0.
FineGridState prepared_initial_data(const PacketSpec& spec, const FineGrid& grid, const QuadratureOptions& opts = {});

double discrete_energy(const FineGrid& grid, const std::vector<double>& u, const std::vector<double>& v);
// conserved by the velocity Verlet step of size dt
double modified_energy(const FineGrid& grid, const std::vector<double>& u, const std::vector<double>& v, double dt);

struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> u, v;
  double energy = 0.0;
};

struct FdtdRun {
  std::vector<FieldSnapshot> snapshots;
  double dt_max = 0.0;
  double cfl = 0.0;
  long steps = 0;
  double energy_drift = 0.0;  // sum of per-interval modified-energy changes, relative
};

// Advances to each requested time (increasing, > state.t); state ends at the last.
FdtdRun run_fdtd(FineGridState& state, const std::vector<double>& snapshot_times);

}  // namespace bwkb
