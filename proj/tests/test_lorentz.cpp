#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vortlab/error.hpp"
#include "vortlab/lorentz.hpp"

using namespace vortlab;

namespace {

const double inf = std::numeric_limits<double>::infinity();

// (int_0^mu (t^{1/p} f*(t))^q dt/t)^{1/q}: Simpson in x = log t on each step of f*,
// closed form on the first step.
double lorentz_quadrature(const RearrangedFunction& f, double p, double q) {
  double sum = 0, lo = 0;
  for (std::size_t i = 0; i < f.levels.size(); ++i) {
    const double hi = f.cut_points[i];
    const double a = f.levels[i];
    if (lo == 0) {
      // int_0^hi t^{q/p - 1} dt
      sum += std::pow(a, q) * std::pow(hi, q / p) * p / q;
    } else {
      const int m = 2000;
      const double x0 = std::log(lo), x1 = std::log(hi), h = (x1 - x0) / m;
      double s = 0;
      for (int j = 0; j <= m; ++j) {
        const double g = std::exp((q / p) * (x0 + j * h));
        s += g * (j == 0 || j == m ? 1 : (j % 2 ? 4 : 2));
      }
      sum += std::pow(a, q) * s * h / 3;
    }
    lo = hi;
  }
  return std::pow(sum, 1 / q);
}

WeightedSamples samples(std::vector<double> v, std::vector<double> w) { return {std::move(v), std::move(w)}; }

}  // namespace

TEST_CASE("decreasing rearrangement of a small sample") {
  const WeightedSamples s = samples({3, 1, 2, 3}, {1, 2, 1, 0.5});
  const RearrangedFunction r = rearrange(s);
  CHECK(r.levels == std::vector<double>{3, 2, 1});
  CHECK(r.cut_points == std::vector<double>{1.5, 2.5, 4.5});
  CHECK(r(0.0) == 3);
  CHECK(r(1.5) == 2);
  CHECK(r(4.4) == 1);
  CHECK(r(4.5) == 0);
  for (double a : {0.0, 0.5, 1.0, 1.5, 2.5, 3.0})
    CHECK(r.distribution(a) == doctest::Approx(distribution(s, a)));
  CHECK(s.measure() == doctest::Approx(4.5));
}

TEST_CASE("Lorentz norms against independent oracles") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  WeightedSamples s;
  for (int i = 0; i < 40; ++i) {
    s.values.push_back(U(rng));
    s.weights.push_back(0.1 + U(rng));
  }
  // L^{p,p} = L^p
  for (double p : {1.0, 1.5, 3.0}) {
    double lp = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) lp += s.weights[i] * std::pow(s.values[i], p);
    CHECK(lorentz_norm(s, {p, p}) == doctest::Approx(std::pow(lp, 1 / p)).epsilon(1e-12));
  }
  // L^{p,inf} = sup_alpha alpha mu(|f| > alpha)^{1/p}, probed at every sample value from below.
  double weak = 0;
  for (double v : s.values) {
    const double a = std::nextafter(v, 0.0);
    weak = std::max(weak, a * std::pow(distribution(s, a), 1 / 1.5));
  }
  CHECK(lorentz_norm(s, {1.5, inf}) == doctest::Approx(weak).epsilon(1e-12));
  const RearrangedFunction r = rearrange(s);
  for (auto [p, q] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {1.5, 4.0}})
    CHECK(lorentz_norm(r, {p, q}) == doctest::Approx(lorentz_quadrature(r, p, q)).epsilon(1e-8));
}

TEST_CASE("Lorentz index validation") {
  const WeightedSamples s = samples({1}, {1});
  CHECK_THROWS_AS(lorentz_norm(s, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(lorentz_norm(s, {inf, 1.0}), Error);
  CHECK_THROWS_AS(lorentz_norm(s, {1.0, -1.0}), Error);
  CHECK_THROWS_AS(rearrange(samples({1, 2}, {1})), Error);
  CHECK_THROWS_AS(rearrange(samples({1}, {0})), Error);
  CHECK_THROWS_AS(rearrange(samples({-1}, {1})), Error);
}

TEST_CASE("interpolated index") {
  const LorentzIndex r = interpolated_index({1, 1}, {2, 2}, 1.0);
  CHECK(r.p == doctest::Approx(4.0 / 3));
  CHECK(r.q == doctest::Approx(4.0 / 3));
  const LorentzIndex w = interpolated_index({inf, inf}, {2, inf}, 3.0);
  CHECK(w.p == doctest::Approx(8.0));
  CHECK(w.q_infinite());
}

TEST_CASE("interpolation inequality on co-monotone data") {
  // f0 = x, f1 = x^2 on a uniform sample of (0, 1]; the pointwise minimum over delta of
  // delta f0 + delta^-nu f1 is c f0^{1-theta} f1^theta, so f = c/2 f0^{1-theta} f1^theta is admissible.
  const double nu = 1.0, th = 0.5;
  const double c = 2.0;  // min of d a + b / d is 2 sqrt(ab)
  WeightedSamples f, f0, f1;
  for (int i = 1; i <= 200; ++i) {
    const double x = i / 200.0;
    f0.values.push_back(x);
    f1.values.push_back(x * x);
    f.values.push_back(0.5 * c * std::pow(x, 1 - th) * std::pow(x * x, th));
    for (auto* s : {&f, &f0, &f1}) s->weights.push_back(0.005);
  }
  const std::vector<double> grid{0.1, 0.5, 1, 2, 10};
  const InterpolationReport rep = interpolation_check(f, f0, f1, nu, grid, {1, 2}, {3, 2});
  CHECK(rep.hypothesis_satisfied);
  CHECK(rep.hypothesis_margin >= -1e-12);
  CHECK(rep.theta == doctest::Approx(th));
  CHECK(rep.index.p == doctest::Approx(1.5));
  CHECK(rep.holds);
  CHECK(rep.lhs <= rep.rhs * (1 + 1e-10));

  WeightedSamples big = f;
  for (double& v : big.values) v *= 1.5;
  CHECK_FALSE(interpolation_check(big, f0, f1, nu, grid, {1, 2}, {3, 2}).hypothesis_satisfied);
  CHECK_THROWS_AS(interpolation_check(f, f0, samples({1}, {1}), nu, grid, {1, 2}, {3, 2}), Error);
  CHECK_THROWS_AS(interpolation_check(f, f0, f1, 0.0, grid, {1, 2}, {3, 2}), Error);
}

TEST_CASE("derivative magnitude of a plane wave") {
  GridSpec s;
  s.n = 16;
  const GridField f = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::sin(2 * x[0]); });
  const GridField d1 = derivative_magnitude(f, 1);
  const GridField d2 = derivative_magnitude(f, 2);
  for (std::size_t p = 0; p < s.size(); p += 37) {
    const double x = s.point(int(p % 16), 0, 0)[0];
    CHECK(d1.at(0, p) == doctest::Approx(2 * std::abs(std::cos(2 * x))).epsilon(1e-10));
    CHECK(d2.at(0, p) == doctest::Approx(4 * std::abs(std::sin(2 * x))).epsilon(1e-10));
  }
  CHECK(derivative_magnitude(f, 0).data == magnitude(f).data);
  CHECK_THROWS_AS(derivative_magnitude(f, -1), Error);
}

TEST_CASE("functional of a constant derivative field") {
  GridSpec s;
  s.n = 8;
  // n = 2: exponent 4/(n+2) = 1, so the samples are a on the whole box with time weight 1.
  const double a = 3.0, q = 2.0;
  const GridField g = sample_field(s, 1, [&](const Vec3&, double* o) { o[0] = a; });
  const double m = std::pow(2 * std::numbers::pi, 3);
  // L^{1,q} of a 1_E: a (1/q)^{1/q} |E|.
  CHECK(theorem_functional({g}, 2, q, 1.0, {1.0}) == doctest::Approx(a * std::pow(1 / q, 1 / q) * m));
  CHECK(theorem_functional({g}, 2, q, 4.0, {1.0}) == 0.0);
  // Threshold C t^-2 = 2.5 at t = 2 lets the samples through.
  CHECK(theorem_functional({g}, 2, q, 10.0, {2.0}) > 0.0);
  CHECK(theorem_functional({}, 2, q, 1.0, {}) == 0.0);
  CHECK_THROWS_AS(theorem_functional({g}, 2, 1.0, 1.0, {1.0}), Error);
  CHECK_THROWS_AS(theorem_functional({g}, 2, q, 1.0, {0.0}), Error);
  CHECK_THROWS_AS(theorem_functional({g, g}, 2, q, 1.0, {1.0}), Error);
}

TEST_CASE("rearrangement csv") {
  const std::string csv = rearrangement_csv(rearrange(samples({2, 1}, {1, 1})));
  CHECK(csv == "lambda,f_star\n1,2\n2,1\n");
}
