#pragma once

#include <map>
#include <string>
#include <vector>

#include "vortlab/grid.hpp"
#include "vortlab/ns_solver.hpp"

namespace vortlab {

// Time-indexed fields on a common grid. Space: periodic trilinear interpolation.
// Time: cubic Lagrange on the four nearest snapshots (fewer when the series is short).
struct FieldSeries {
  std::vector<GridField> fields;
  std::vector<double> times;

  void validate() const;
  double t_min() const { return times.front(); }
  double t_max() const { return times.back(); }
  int components() const { return fields.front().components; }
  // Writes `components()` values into out.
  void sample(double t, const Vec3& x, double* out) const;
  double sample_scalar(double t, const Vec3& x) const;
};

FieldSeries velocity_series(const std::vector<Snapshot>& snapshots);

double trilinear(const GridField& f, int comp, const Vec3& x);

// Standard mollifier c exp(-1/(1-|x|^2)) on B_1 with unit mass; hat is its radial
// Fourier transform normalized so hat(0) = 1.
double mollifier_kernel(double r);
double mollifier_hat(double k);

enum class MollifierMode { analytic, sampled };

// u * phi_eps. The analytic mode multiplies each mode by hat(eps |k|) and is exact for
// band-limited fields; the sampled mode convolves with the grid-sampled kernel and
// refuses kernels narrower than four cells across.
GridField mollify(const GridField& u, double eps, MollifierMode mode = MollifierMode::analytic);

struct Trajectory {
  double t0 = 0;
  Vec3 x0{};
  std::vector<double> s;  // decreasing times t0, t0 - ds, ...
  std::vector<Vec3> X;
  std::vector<Vec3> V;  // velocity at the nodes, for Hermite interpolation
  Vec3 at(double time) const;
  Vec3 velocity(double time) const;
};

// RK4 for dX/ds = velocity(s, X) from (t0, x0) to t1 (either direction) in `steps`
// equal steps; returns the node positions and, if requested, the node velocities.
std::vector<Vec3> integrate_path(const FieldSeries& velocity, double t0, const Vec3& x0, double t1, int steps,
                                 std::vector<Vec3>* node_velocity = nullptr);

// dX/ds = u_eps(s, X), X(t) = x, integrated backward by RK4 over [t - 9 eps^2, t].
// `velocity` must already be mollified.
Trajectory integrate_trajectory(const FieldSeries& velocity, double t, const Vec3& x, double eps,
                                int steps = 32);

struct CylinderSample {
  double time;
  Vec3 pos;
  double weight;
};

struct CylinderResolution {
  int n_s = 6;
  int n_r = 6;
  int n_mu = 6;
  int n_phi = 12;
  int trajectory_steps = 32;
};

// Q_eps(t,x) = {(t + eps^2 s, X(t + eps^2 s) + eps y) : -9 <= s <= 0, |y| < 3}.
struct SkewedCylinder {
  double t;
  Vec3 x;
  double epsilon;
  Trajectory trajectory;
  std::vector<CylinderSample> samples;
  bool wraps = false;  // leaves the periodic cell around the base point
  double volume() const;
};

SkewedCylinder build_cylinder(const FieldSeries& mollified_velocity, double t, const Vec3& x, double eps,
                              const CylinderResolution& res = {});

double cylinder_exact_volume(double eps);

// Weighted mean of |f| over the cylinder samples.
double cylinder_average(const FieldSeries& f, const SkewedCylinder& cyl);

// Spatial Hardy-Littlewood maximal function over the radius ladder {0} U {h 2^j <= L/4}.
std::vector<double> hl_radius_ladder(const GridSpec& spec);
GridField ball_average(const GridField& f, double radius);
GridField hl_maximal(const GridField& f);
// Same sup over an explicit ladder (used for refinement checks).
GridField hl_maximal(const GridField& f, const std::vector<double>& radii);
// Average of |f| over lattice points within `radius` of grid point (i, j, k), summed directly.
double ball_average_direct(const GridField& f, int i, int j, int k, double radius);

struct AdmissibilityThresholds {
  double eta0 = 0.05;
  double eta1 = 0.05;
  double eta2 = 0.05;
  double eta3 = 0.05;
};

// eps^2 avg_Q M(|grad u|) <= eta0 and the cylinder lies inside the sampled time range.
double admissibility_statistic(const SkewedCylinder& cyl, const FieldSeries& M_grad_u);
bool admissible(const SkewedCylinder& cyl, const FieldSeries& M_grad_u, double eta0);

// Shared inputs for cylinder based maximal functions. The trajectory of Q_eps follows
// u mollified at the same eps; mollified series are cached per eps (not thread safe).
struct MaximalContext {
  FieldSeries velocity;
  FieldSeries M_grad_u;
  AdmissibilityThresholds thresholds;
  CylinderResolution resolution;
  MollifierMode mode = MollifierMode::analytic;

  const FieldSeries& mollified(double eps) const;
  // Uncached: only the snapshots needed to interpolate on [t_lo, t_hi].
  FieldSeries mollified_window(double eps, double t_lo, double t_hi) const;
  SkewedCylinder cylinder(double t, const Vec3& x, double eps) const;

 private:
  mutable std::map<double, FieldSeries> cache_;
};

// M(|grad u|) per snapshot.
FieldSeries maximal_gradient_series(const FieldSeries& velocity);
MaximalContext make_maximal_context(const FieldSeries& velocity, const AdmissibilityThresholds& th = {},
                                    const CylinderResolution& res = {});
// Zero velocity on the given times (straight cylinders, everything admissible).
FieldSeries zero_series(const GridSpec& spec, int comps, const std::vector<double>& times);

struct QMaximalResult {
  double value = 0;
  int admissible_count = 0;
  double eps_argmax = 0;
  bool fallback = false;  // no admissible ladder entry: smallest-eps average reported
};

std::vector<double> geometric_ladder(double eps_max, int levels, double ratio = 2.0);

// Cylinders for a point over a ladder; entries whose time range is not covered are skipped.
struct LadderCylinders {
  std::vector<SkewedCylinder> cylinders;
  std::vector<bool> admissible;
};
LadderCylinders ladder_cylinders(const MaximalContext& ctx, double t, const Vec3& x,
                                 const std::vector<double>& ladder);

QMaximalResult q_maximal(const FieldSeries& f, const LadderCylinders& lc);
QMaximalResult q_maximal(const FieldSeries& f, const MaximalContext& ctx, double t, const Vec3& x,
                         const std::vector<double>& ladder);

// Largest admissible eps in (0, eps_hi] by bisection on the admissibility statistic.
double admissibility_boundary(const MaximalContext& ctx, double t, const Vec3& x, double eps_hi,
                              int iterations = 30);

struct LebesgueReport {
  std::vector<double> eps;
  std::vector<double> deviation;
  double slope = 0;  // least-squares slope of log deviation against log eps
};

LebesgueReport lebesgue_check(const FieldSeries& f, const MaximalContext& ctx, double t, const Vec3& x,
                              const std::vector<double>& ladder);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct WeakTypeReport {
  double constant = 0;  // sup_alpha alpha |{M_Q f > alpha}| / |f|_{L1}
  double l1 = 0;
  std::vector<double> alphas;
  std::vector<double> measures;
};

// Empirical weak (1,1) constant on a lattice of base points (stride in grid cells)
// at the given times.
WeakTypeReport weak_type_constant(const FieldSeries& f, const MaximalContext& ctx,
                                  const std::vector<double>& times, int stride,
                                  const std::vector<double>& ladder);

}  // namespace vortlab
