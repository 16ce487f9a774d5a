#include "vortlab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vortlab/error.hpp"
#include "vortlab/spectral.hpp"

namespace vortlab {

void WeightedSamples::validate() const {
  if (values.size() != weights.size()) fail(ErrorCode::DimensionMismatch, "values and weights differ in length");
  for (double w : weights)
    if (!(w > 0) || !std::isfinite(w)) fail(ErrorCode::InvalidArgument, "weights must be positive");
  for (double v : values)
    if (!(v >= 0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, "values must be finite and nonnegative");
}

double WeightedSamples::measure() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double RearrangedFunction::operator()(double lambda) const {
  auto it = std::upper_bound(cut_points.begin(), cut_points.end(), lambda);
  if (it == cut_points.end()) return 0.0;
  return levels[std::size_t(it - cut_points.begin())];
}

double RearrangedFunction::distribution(double alpha) const {
  double mu = 0;
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] > alpha) mu = cut_points[i];
  return mu;
}

RearrangedFunction rearrange(const WeightedSamples& samples) {
  samples.validate();
  std::vector<std::size_t> order(samples.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples.values[a] > samples.values[b]; });
  RearrangedFunction r;
  double acc = 0;
  for (std::size_t i : order) {
    acc += samples.weights[i];
    const double v = samples.values[i];
    if (!r.levels.empty() && r.levels.back() == v) {
      r.cut_points.back() = acc;
    } else {
      r.levels.push_back(v);
      r.cut_points.push_back(acc);
    }
  }
  return r;
}

double lorentz_norm(const RearrangedFunction& f, const LorentzIndex& idx) {
  if (!(idx.p > 0) || !std::isfinite(idx.p)) fail(ErrorCode::InvalidArgument, "Lorentz p must lie in (0, inf)");
  if (!(idx.q > 0)) fail(ErrorCode::InvalidArgument, "Lorentz q must be positive");
  if (idx.q_infinite()) {
    double best = 0;
    for (std::size_t i = 0; i < f.levels.size(); ++i)
      best = std::max(best, f.levels[i] * std::pow(f.cut_points[i], 1.0 / idx.p));
    return best;
  }
  const double a = idx.q / idx.p;
  double sum = 0, prev = 0;
  for (std::size_t i = 0; i < f.levels.size(); ++i) {
    const double lam = f.cut_points[i];
    if (f.levels[i] > 0) {
      // lam^a - prev^a without cancellation for thin steps.
      const double diff = prev > 0 ? std::pow(prev, a) * std::expm1(a * std::log1p((lam - prev) / prev))
                                   : std::pow(lam, a);
      sum += std::pow(f.levels[i], idx.q) * (idx.p / idx.q) * diff;
    }
    prev = lam;
  }
  return std::pow(sum, 1.0 / idx.q);
}

double lorentz_norm(const WeightedSamples& samples, const LorentzIndex& idx) {
  return lorentz_norm(rearrange(samples), idx);
}

double distribution(const WeightedSamples& samples, double alpha) {
  double mu = 0;
  for (std::size_t i = 0; i < samples.values.size(); ++i)
    if (std::abs(samples.values[i]) > alpha) mu += samples.weights[i];
  return mu;
}

LorentzIndex interpolated_index(const LorentzIndex& i0, const LorentzIndex& i1, double nu) {
  const double theta = 1.0 / (1.0 + nu);
  LorentzIndex r;
  r.p = 1.0 / ((1 - theta) / i0.p + theta / i1.p);
  const double iq = (1 - theta) / i0.q + theta / i1.q;
  r.q = iq > 0 ? 1.0 / iq : std::numeric_limits<double>::infinity();
  return r;
}

InterpolationReport interpolation_check(const WeightedSamples& f, const WeightedSamples& f0,
                                        const WeightedSamples& f1, double nu,
                                        const std::vector<double>& delta_grid, const LorentzIndex& i0,
                                        const LorentzIndex& i1) {
  f.validate();
  f0.validate();
  f1.validate();
  if (f.values.size() != f0.values.size() || f.values.size() != f1.values.size())
    fail(ErrorCode::DimensionMismatch, "interpolation_check: sample grids differ");
  for (std::size_t i = 0; i < f.weights.size(); ++i)
    if (f.weights[i] != f0.weights[i] || f.weights[i] != f1.weights[i])
      fail(ErrorCode::DimensionMismatch, "interpolation_check: weights differ");
  if (!(nu > 0)) fail(ErrorCode::InvalidArgument, "nu must be positive");

  InterpolationReport rep;
  rep.theta = 1.0 / (1.0 + nu);
  rep.index = interpolated_index(i0, i1, nu);
  const double th = rep.theta;
  double margin = INFINITY;
  bool ok = true;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double a = f0.values[i], b = f1.values[i], two_f = 2.0 * f.values[i];
    const double scale = std::max({two_f, a, b, 1e-300});
    auto test = [&](double d) {
      const double m = d * a + std::pow(d, -nu) * b - two_f;
      margin = std::min(margin, m / scale);
      if (m < -1e-12 * scale) ok = false;
    };
    for (double d : delta_grid) test(d);
    if (a > 0 && b > 0) {
      test(std::pow(a, -th) * std::pow(b, th));
      // argmin of d a + d^-nu b is d = (nu b / a)^{theta}
      test(std::pow(nu * b / a, th));
    } else if (two_f > 0) {
      // inf over delta is 0 when either side vanishes
      margin = std::min(margin, -two_f / scale);
      ok = false;
    }
  }
  rep.hypothesis_satisfied = ok;
  rep.hypothesis_margin = margin;
  rep.lhs = lorentz_norm(f, rep.index);
  rep.rhs = std::pow(lorentz_norm(f0, i0), 1 - th) * std::pow(lorentz_norm(f1, i1), th);
  rep.holds = rep.lhs <= rep.rhs * (1 + 1e-10);
  return rep;
}

GridField derivative_magnitude(const GridField& field, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "derivative order must be nonnegative");
  GridField d = field;
  for (int i = 0; i < n; ++i) d = gradient(d);
  return magnitude(d);
}

double theorem_functional(const std::vector<GridField>& deriv_series, int n, double q, double C_n,
                          const std::vector<double>& time_grid) {
  if (deriv_series.size() != time_grid.size()) fail(ErrorCode::DimensionMismatch, "series and time grid differ");
  if (deriv_series.empty()) return 0.0;
  if (!(q > 1)) fail(ErrorCode::InvalidArgument, "q must exceed 1");
  for (double t : time_grid)
    if (!(t > 0)) fail(ErrorCode::InvalidArgument, "theorem functional needs positive times");
  const std::size_t nt = time_grid.size();
  std::vector<double> dt(nt, 0.0);
  if (nt == 1) {
    dt[0] = 1.0;
  } else {
    for (std::size_t j = 0; j + 1 < nt; ++j) {
      const double h = time_grid[j + 1] - time_grid[j];
      dt[j] += 0.5 * h;
      dt[j + 1] += 0.5 * h;
    }
  }
  const double expo = 4.0 / (n + 2.0);
  WeightedSamples s;
  for (std::size_t j = 0; j < nt; ++j) {
    const GridField& g = deriv_series[j];
    require_components(g, 1, "theorem_functional");
    const double thr = C_n / (time_grid[j] * time_grid[j]);
    const double w = g.spec.cell_volume() * dt[j];
    for (double v : g.data) {
      const double val = std::pow(std::abs(v), expo);
      if (val > thr) {
        s.values.push_back(val);
        s.weights.push_back(w);
      }
    }
  }
  if (s.values.empty()) return 0.0;
  return lorentz_norm(s, LorentzIndex{1.0, q});
}

std::string rearrangement_csv(const RearrangedFunction& f) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,f_star\n";
  for (std::size_t i = 0; i < f.levels.size(); ++i) os << f.cut_points[i] << ',' << f.levels[i] << '\n';
  return os.str();
}

}  // namespace vortlab
