#pragma once

#include <limits>
#include <string>
#include <vector>

#include "vortlab/grid.hpp"

namespace vortlab {

// |f| sampled on cells with positive measures.
struct WeightedSamples {
  std::vector<double> values;
  std::vector<double> weights;

  void validate() const;
  double measure() const;
};

// Decreasing step function: f*(lambda) = levels[i] for cut_points[i-1] <= lambda < cut_points[i].
struct RearrangedFunction {
  std::vector<double> levels;
  std::vector<double> cut_points;

  double operator()(double lambda) const;
  // mu(f* > alpha)
  double distribution(double alpha) const;
};

struct LorentzIndex {
  double p = 1.0;
  double q = 1.0;  // may be +infinity
  bool q_infinite() const { return q == std::numeric_limits<double>::infinity(); }
};

RearrangedFunction rearrange(const WeightedSamples& samples);
double lorentz_norm(const RearrangedFunction& f, const LorentzIndex& idx);
double lorentz_norm(const WeightedSamples& samples, const LorentzIndex& idx);
// mu(|f| > alpha) computed directly from the samples.
double distribution(const WeightedSamples& samples, double alpha);

// Interpolated index of the two-space interpolation inequality, theta = 1/(1+nu):
// 1/p = (1-theta)/p0 + theta/p1, same for q.
LorentzIndex interpolated_index(const LorentzIndex& i0, const LorentzIndex& i1, double nu);

struct InterpolationReport {
  double lhs = 0;  // |f|_{p,q}
  double rhs = 0;  // |f0|_{p0,q0}^{1-theta} |f1|_{p1,q1}^theta
  double theta = 0;
  LorentzIndex index;
  bool hypothesis_satisfied = false;
  // Smallest (delta f0 + delta^-nu f1 - 2|f|) found over the tested deltas.
  double hypothesis_margin = 0;
  bool holds = false;
};

// Checks 2|f| <= delta f0 + delta^-nu f1 on delta_grid, at the pointwise delta
// f0^-theta f1^theta, and at the exact minimizer; then evaluates both sides.
InterpolationReport interpolation_check(const WeightedSamples& f, const WeightedSamples& f0,
                                        const WeightedSamples& f1, double nu,
                                        const std::vector<double>& delta_grid, const LorentzIndex& i0,
                                        const LorentzIndex& i1);

// Frobenius magnitude of the n-th spatial derivative tensor of a field.
GridField derivative_magnitude(const GridField& field, int n);

// | |D^n w|^{4/(n+2)} 1{ |D^n w|^{4/(n+2)} > C_n t^-2 } |_{L^{1,q}} over the sampled cylinder.
// deriv_series holds |D^n w| samples, one field per entry of time_grid. Cell weight is
// dx^3 times the dual time cell width.
double theorem_functional(const std::vector<GridField>& deriv_series, int n, double q, double C_n,
                          const std::vector<double>& time_grid);

// (lambda, f*(lambda)) rows.
std::string rearrangement_csv(const RearrangedFunction& f);

}  // namespace vortlab
