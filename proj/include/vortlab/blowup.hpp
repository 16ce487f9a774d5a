#pragma once

#include <string>
#include <vector>

#include "vortlab/flowmap.hpp"
#include "vortlab/grid.hpp"
#include "vortlab/ns_solver.hpp"

namespace vortlab {

// Moving frame along the mollified trajectory through (t0, x0). Nodes are uniform in time,
// increasing, and cover [t_lo, t_hi]. Between nodes X is the cubic Hermite interpolant with
// slopes u_eps, and velocity() is its exact derivative, so the rescaled field is an exact
// Galilean change of frame. Xdot holds fourth-order differences of the node positions.
struct RescaleFrame {
  double t0 = 0;
  Vec3 x0{};
  double epsilon = 1;
  std::vector<double> times;
  std::vector<Vec3> X;
  std::vector<Vec3> Xdot;
  std::vector<Vec3> u_eps;

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
};

RescaleFrame make_frame(const MaximalContext& ctx, double t0, const Vec3& x0, double eps, double t_lo, double t_hi,
                        int steps = 256);
// Straight-line frame X(t) = x0 + c (t - t0).
RescaleFrame straight_frame(double t0, const Vec3& x0, const Vec3& c, double eps, double t_lo, double t_hi,
                            int steps = 256);

// Fourth-order differences on uniform samples (one-sided five-point stencils at the ends).
std::vector<Vec3> differentiate_uniform(const std::vector<Vec3>& f, double h);

// u(x + d) for every grid point, by an exact Fourier phase shift.
GridField spectral_shift(const GridField& u, const Vec3& d);

// u~(s, y) = eps (u(t0 + eps^2 s, X(t) + eps y) - Xdot(t)) at every snapshot time inside the
// frame, on the box of side L / eps centred at y = 0.
FieldSeries rescale(const FieldSeries& velocity, const RescaleFrame& frame);

struct NsResidual {
  double residual = 0;  // L2 over the window and ball
  double scale = 0;     // sum of the L2 norms of the three terms
  double relative = 0;
  int slices = 0;
};

// P_curl(d_s u + P_curl(omega x u) - nu Lap u) in L2((lo, hi) x B_radius(center)), d_s by
// fourth-order central differences (uniform slices, >= 5).
NsResidual ns_residual(const FieldSeries& series, double viscosity, const Vec3& center, double radius, double t_lo,
                       double t_hi);

// Same residual with the time derivative supplied.
GridField ns_residual_field(const GridField& u, const GridField& dt_u, double viscosity);

// Residuals are normalized by the summed norms of the terms of the equation, as in
// ns_residual, so the comparison is not dominated by rounding of a near-zero residual.
struct GalileanReport {
  double relative_before = 0;  // |R[u]| / scale
  double relative_after = 0;   // |R[u_bar]| / scale_bar
  double residual_change = 0;  // |R[u_bar] - shift(R[u])| / scale
};

// u_bar(t, x) = u(t, x - c (t - t_ref)) + c with d_t u_bar from the chain rule.
GalileanReport galilean_check(const FieldSeries& series, const Vec3& c, double viscosity);

// max over slices of |int u phi dx|.
double mean_zero_residual(const FieldSeries& series, const GridField& phi);
// The fixed mollifier sampled at unit scale and normalized to unit grid mass.
GridField sampled_mollifier(const GridSpec& spec);

struct PivotConfig {
  double p = 1.9;
  double nu = 0;  // 0 selects the midpoint of the admissible interval
  double delta = 0.5;
  double eta = 0.002;

  void validate() const;
  double nu_lower() const { return (2 - p) / (p - 1); }
  double nu_upper() const { return (7 * p - 12) / (6 - p); }
  double nu_value() const { return nu > 0 ? nu : 0.5 * (nu_lower() + nu_upper()); }
  double theta() const { return 1.0 / (1.0 + nu_value()); }
  // 1/p2 = theta/p, 1/q2 = theta/p + 1 - theta.
  double p2() const { return p / theta(); }
  double q2() const { return 1.0 / (theta() / p + 1 - theta()); }
};

struct PivotQuantities {
  double lp_term = 0;       // delta^{-nu} (int_{Q3} |grad u|^p)^{1/p}
  double l2_term = 0;       // delta int_{Q3} |grad u|^2
  double linf_l1 = 0;       // delta sup_{(-4,0)} |omega|_{L1(B2)}
};

PivotQuantities pivot_quantities(const FieldSeries& series, const PivotConfig& cfg);

struct InterpolationBound {
  double lhs = 0;  // |omega|_{L^{p2}_t L^{q2}_x(Q2)}
  double rhs = 0;  // |omega|_{L^p(Q2)}^theta |omega|_{L^inf L^1(Q2)}^{1-theta}
};

InterpolationBound vorticity_interpolation(const FieldSeries& series, const PivotConfig& cfg);

struct SelectionResult {
  double t = 0;
  Vec3 x{};
  double eps_star = 0;
  int case_tag = 0;  // 1: I(eps) = eta below the cap; 2: eps = sqrt(t)/3
  double I_value = 0;
  double mq_p = 0;  // M_Q(M(grad u)^p)
  double mq_2 = 0;  // M_Q(M(grad u)^2)
  double bound_lhs = 0;  // eps_star^{-4}
  double bound_rhs = 0;  // max{(1/eta)[...], 81 t^{-2}}
  bool admissible_at_star = false;
  bool violated = false;
};

// I(eps) = eps^4 [delta^{-2 nu} (avg M^p)^{2/p} + delta avg M^2] on Q_eps(t, x).
double selection_functional(const MaximalContext& ctx, double t, const Vec3& x, double eps, const PivotConfig& cfg,
                            SkewedCylinder* cyl = nullptr);

SelectionResult epsilon_selection(const MaximalContext& ctx, double t, const Vec3& x, const PivotConfig& cfg,
                                  int ladder_levels = 8, double ladder_ratio = 2.0, int bisection_iterations = 40);

}  // namespace vortlab
