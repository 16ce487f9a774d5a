#pragma once

#include <functional>
#include <vector>

#include "vortlab/grid.hpp"

namespace vortlab {

struct SolverConfig {
  GridSpec grid;
  double viscosity = 1.0;
  double dt = 1e-3;
  double t_end = 0.5;
  bool dealias = true;
  int snapshot_stride = 1;

  void validate() const;
};

struct Snapshot {
  GridField velocity;
  double time = 0.0;
  double kinetic_energy = 0.0;  // 1/2 |u|_2^2
  double enstrophy = 0.0;       // |grad u|_2^2
};

struct EnergyRow {
  double t;
  double kinetic_energy;
  double enstrophy;
  // 1/2|u(t)|^2 + nu int_0^t |grad u|^2 - 1/2|u_0|^2; <= 0 up to quadrature error.
  double leray_defect;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<EnergyRow> energy;
};

GridField taylor_green_init(const GridSpec& spec, double amplitude);

Snapshot make_snapshot(const GridField& u);

// Integrating-factor RK4 for u_t = -P_curl(omega x u) + nu Lap u.
class NavierStokes {
 public:
  explicit NavierStokes(const SolverConfig& cfg);

  Snapshot step(const Snapshot& state) const;
  RunResult run(const GridField& u0) const;
  // Right-hand side -P_curl(omega x u) + nu Lap u evaluated on the grid.
  GridField rhs(const GridField& u) const;

  const SolverConfig& config() const { return cfg_; }

 private:
  SolverConfig cfg_;
};

// Convenience wrappers.
Snapshot step(const Snapshot& state, const SolverConfig& cfg);
RunResult run(const SolverConfig& cfg, const GridField& u0);

// Cumulative integral of equally spaced samples by cubic (four point) panels.
std::vector<double> cumulative_quadrature(const std::vector<double>& f, double h);

// P = -Lap^{-1} div div (u x u), mean zero.
GridField pressure(const GridField& velocity);

// psi(t, x) = chi(t) * space(x) with chi smooth and vanishing near the window ends.
struct TestFunction {
  GridField space;
  std::function<double(double)> chi;
  std::function<double(double)> chi_dot;
};

// Signed weak-form local energy quantity
// int int [ -|u|^2/2 d_t psi - (|u|^2/2 + P) u.grad psi + nu |grad u|^2 psi - nu |u|^2/2 Lap psi ].
// Zero for exact smooth solutions; negative values would signal dissipation.
double local_energy_residual(const std::vector<Snapshot>& snapshots, const TestFunction& psi,
                             double viscosity = 1.0);

// Smooth time bump supported in (a, b).
TestFunction make_test_function(const GridField& space, double a, double b);

}  // namespace vortlab
