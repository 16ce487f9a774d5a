#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortlab/error.hpp"
#include "vortlab/flowmap.hpp"
#include "vortlab/quadrature.hpp"
#include "vortlab/spectral.hpp"

using namespace vortlab;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec grid(int n) {
  GridSpec s;
  s.n = n;
  return s;
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int m = 4000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

FieldSeries constant_velocity(const GridSpec& s, const Vec3& c, int slices, double dt) {
  FieldSeries fs;
  for (int i = 0; i < slices; ++i) {
    fs.times.push_back(i * dt);
    fs.fields.push_back(sample_field(s, 3, [&](const Vec3&, double* o) {
      for (int a = 0; a < 3; ++a) o[a] = c[a];
    }, i * dt));
  }
  return fs;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::StageFailure;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  const QuadratureRule r = gauss_legendre(5, 0.0, 2.0);
  double sum = 0, p9 = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    sum += r.weights[i];
    p9 += r.weights[i] * std::pow(r.nodes[i], 9);
  }
  CHECK(sum == doctest::Approx(2.0));
  CHECK(p9 == doctest::Approx(std::pow(2.0, 10) / 10).epsilon(1e-13));
}

TEST_CASE("mollifier mass and transform") {
  const double mass = simpson([](double r) { return 4 * kPi * r * r * mollifier_kernel(r); }, 0.0, 1.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mollifier_kernel(1.0) == 0.0);
  CHECK(mollifier_kernel(1.5) == 0.0);
  CHECK(mollifier_hat(0.0) == doctest::Approx(1.0));
  for (double k : {1.0, 3.0, 7.5}) {
    const double ft = simpson([&](double r) { return r == 0 ? 0.0 : 4 * kPi * r * r * mollifier_kernel(r) * std::sin(k * r) / (k * r); }, 0.0, 1.0);
    CHECK(mollifier_hat(k) == doctest::Approx(ft).epsilon(1e-7));
  }
}

TEST_CASE("mollification of plane waves") {
  const GridSpec s = grid(32);
  const GridField u = sample_field(s, 3, [](const Vec3& x, double* o) {
    o[0] = std::sin(2 * x[1]);
    o[1] = 1.5;
    o[2] = std::cos(x[0] + x[2]);
  });
  const double eps = 0.6;
  const GridField expect = sample_field(s, 3, [&](const Vec3& x, double* o) {
    o[0] = mollifier_hat(2 * eps) * std::sin(2 * x[1]);
    o[1] = 1.5;
    o[2] = mollifier_hat(std::sqrt(2.0) * eps) * std::cos(x[0] + x[2]);
  });
  CHECK(max_norm(mollify(u, eps) - expect) < 1e-12);
  // The sampled kernel is a quadrature of the same convolution.
  CHECK(max_norm(mollify(u, eps, MollifierMode::sampled) - expect) < 5e-3);
  CHECK(code_of([&] { mollify(u, 0.1, MollifierMode::sampled); }) == ErrorCode::UnderResolved);
  CHECK(code_of([&] { mollify(u, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("space-time interpolation") {
  const GridSpec s = grid(16);
  const GridField lin = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::sin(x[0]); });
  const Vec3 p = s.point(3, 4, 5);
  CHECK(trilinear(lin, 0, p) == doctest::Approx(std::sin(p[0])));
  const Vec3 mid{p[0] + 0.5 * s.h(), p[1], p[2]};
  CHECK(trilinear(lin, 0, mid) == doctest::Approx(0.5 * (std::sin(p[0]) + std::sin(p[0] + s.h()))));
  // Periodic wrap.
  CHECK(trilinear(lin, 0, {p[0] + s.L, p[1], p[2]}) == doctest::Approx(std::sin(p[0])));

  // Cubic in time is reproduced exactly.
  FieldSeries fs;
  for (int i = 0; i < 6; ++i) {
    const double t = 0.2 * i;
    fs.times.push_back(t);
    GridField f(s, 1, t);
    for (double& v : f.data) v = t * t * t - t;
    fs.fields.push_back(f);
  }
  CHECK_NOTHROW(fs.validate());
  const double t = 0.53;
  CHECK(fs.sample_scalar(t, {0.1, 0.2, 0.3}) == doctest::Approx(t * t * t - t).epsilon(1e-13));
  CHECK(code_of([&] { fs.sample_scalar(1.5, {0, 0, 0}); }) == ErrorCode::RangeExceeded);
  FieldSeries bad = fs;
  std::swap(bad.times[1], bad.times[2]);
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
  bad = fs;
  bad.times.pop_back();
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("trajectories") {
  const GridSpec s = grid(16);
  const Vec3 c{0.5, -1.0, 0.25};
  const FieldSeries v = constant_velocity(s, c, 11, 0.1);
  const std::vector<Vec3> path = integrate_path(v, 0.8, {0, 0, 0}, 0.2, 8);
  REQUIRE(path.size() == 9);
  for (int a = 0; a < 3; ++a) CHECK(path.back()[a] == doctest::Approx(-0.6 * c[a]));

  // Shear: u = (sin y, 0, 0) moves along x at constant speed.
  FieldSeries shear;
  for (int i = 0; i < 5; ++i) {
    shear.times.push_back(0.25 * i);
    shear.fields.push_back(sample_field(s, 3, [](const Vec3& x, double* o) {
      o[0] = std::sin(x[1]);
      o[1] = 0;
      o[2] = 0;
    }, 0.25 * i));
  }
  const Vec3 y0 = s.point(0, 5, 0);
  const Trajectory tr = integrate_trajectory(shear, 1.0, y0, 0.3, 16);
  REQUIRE(tr.s.size() == 17);
  CHECK(tr.s.front() == doctest::Approx(1.0));
  CHECK(tr.s.back() == doctest::Approx(1.0 - 9 * 0.09));
  CHECK(tr.at(1.0 - 9 * 0.09)[0] == doctest::Approx(y0[0] - 0.81 * std::sin(y0[1])));
  CHECK(tr.velocity(0.5)[0] == doctest::Approx(std::sin(y0[1])));

  CHECK(code_of([&] { integrate_path(v, 0.5, {0, 0, 0}, -1.0, 4); }) == ErrorCode::RangeExceeded);
  CHECK(code_of([&] { integrate_path(v, 0.5, {0, 0, 0}, 0.2, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("skewed cylinder volume and averages") {
  const GridSpec s = grid(16);
  const Vec3 c{0.4, 0.0, 0.0};
  const FieldSeries v = constant_velocity(s, c, 11, 0.1);
  const double eps = 0.1;
  const SkewedCylinder cyl = build_cylinder(v, 0.9, {0, 0, 0}, eps);
  CHECK(cyl.volume() == doctest::Approx(cylinder_exact_volume(eps)).epsilon(1e-12));
  CHECK(cylinder_exact_volume(1.0) == doctest::Approx(9 * 36 * kPi));
  CHECK_FALSE(cyl.wraps);

  // f(t, x) = t: the average over s in [-9, 0] is t - 4.5 eps^2.
  FieldSeries f;
  for (int i = 0; i < 11; ++i) {
    f.times.push_back(0.1 * i);
    GridField g(s, 1, 0.1 * i);
    for (double& x : g.data) x = 0.1 * i;
    f.fields.push_back(g);
  }
  CHECK(cylinder_average(f, cyl) == doctest::Approx(0.9 - 4.5 * eps * eps).epsilon(1e-12));

  // The cylinder is transported: its mean x offset is the backward drift -4.5 eps^2 c.
  double mx = 0;
  for (const auto& q : cyl.samples) mx += q.weight * q.pos[0];
  CHECK(mx / cyl.volume() == doctest::Approx(-4.5 * eps * eps * c[0]).epsilon(1e-10));
}

TEST_CASE("Hardy-Littlewood maximal function") {
  const GridSpec s = grid(16);
  const std::vector<double> ladder = hl_radius_ladder(s);
  REQUIRE(ladder.size() >= 3);
  CHECK(ladder[0] == 0.0);
  CHECK(ladder[1] == doctest::Approx(s.h()));
  CHECK(ladder.back() <= s.L / 4 + 1e-12);
  for (std::size_t i = 2; i < ladder.size(); ++i) CHECK(ladder[i] == doctest::Approx(2 * ladder[i - 1]));

  const GridField f = random_field(s, 1, 3, 17);
  const GridField avg = ball_average(f, 2 * s.h());
  for (auto [i, j, k] : {std::array{0, 0, 0}, {3, 7, 11}, {15, 1, 9}})
    CHECK(avg.at(0, s.index(i, j, k)) == doctest::Approx(ball_average_direct(f, i, j, k, 2 * s.h())).epsilon(1e-12));

  const GridField M = hl_maximal(f);
  const GridField a = magnitude(f);
  for (std::size_t p = 0; p < s.size(); ++p) CHECK(M.at(0, p) >= a.at(0, p) - 1e-14);
  GridField spike(s, 1);
  spike.at(0, s.index(8, 8, 8)) = 1.0;
  CHECK(hl_maximal(spike).at(0, s.index(8, 8, 8)) == 1.0);
}

TEST_CASE("admissibility and cylinder maximal function") {
  const GridSpec s = grid(16);
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(0.1 * i);
  const FieldSeries zero = zero_series(s, 3, times);
  const MaximalContext ctx = make_maximal_context(zero);
  const SkewedCylinder cyl = ctx.cylinder(1.0, {0, 0, 0}, 0.2);
  CHECK(admissibility_statistic(cyl, ctx.M_grad_u) == 0.0);
  CHECK(admissible(cyl, ctx.M_grad_u, 0.05));
  CHECK(admissibility_boundary(ctx, 1.0, {0, 0, 0}, 0.3) == doctest::Approx(0.3));

  const std::vector<double> ladder = geometric_ladder(0.2, 4);
  CHECK(ladder == std::vector<double>{0.2, 0.1, 0.05, 0.025});
  CHECK(code_of([] { geometric_ladder(0.2, 0); }) == ErrorCode::InvalidArgument);

  FieldSeries c;
  for (double t : times) {
    GridField g(s, 1, t);
    for (double& x : g.data) x = -2.0;
    c.times.push_back(t);
    c.fields.push_back(g);
  }
  const QMaximalResult q = q_maximal(c, ctx, 1.0, {0.3, 0, 0}, ladder);
  CHECK(q.value == doctest::Approx(2.0));
  CHECK(q.admissible_count == 4);
  CHECK_FALSE(q.fallback);
  // No ladder entry fits before t = 0.
  CHECK(code_of([&] { q_maximal(c, ctx, 0.0, {0, 0, 0}, ladder); }) == ErrorCode::RangeExceeded);
}

TEST_CASE("Lebesgue differentiation on a smooth field") {
  const GridSpec s = grid(16);
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(0.1 * i);
  const MaximalContext ctx = make_maximal_context(zero_series(s, 3, times));
  FieldSeries f;
  for (double t : times) {
    f.times.push_back(t);
    f.fields.push_back(sample_field(s, 1, [&](const Vec3& x, double* o) { o[0] = std::cos(x[0]) + t; }, t));
  }
  const LebesgueReport r = lebesgue_check(f, ctx, 1.0, {0.4, 0, 0}, geometric_ladder(0.2, 4));
  REQUIRE(r.deviation.size() == 4);
  for (std::size_t i = 1; i < r.deviation.size(); ++i) CHECK(r.deviation[i] < r.deviation[i - 1]);
  CHECK(r.slope > 0.9);
}

TEST_CASE("log-log slope") {
  CHECK(fit_loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
  CHECK(code_of([] { fit_loglog_slope({1}, {1}); }) == ErrorCode::NotEnoughData);
}

TEST_CASE("weak type constant of a constant function") {
  const GridSpec s = grid(8);
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  const MaximalContext ctx = make_maximal_context(zero_series(s, 3, times));
  FieldSeries f;
  for (double t : times) {
    GridField g(s, 1, t);
    for (double& x : g.data) x = 1.0;
    f.times.push_back(t);
    f.fields.push_back(g);
  }
  // M_Q 1 = 1 everywhere, so alpha |{M > alpha}| / |1|_L1 tends to 1 from below.
  const WeakTypeReport w = weak_type_constant(f, ctx, {1.0}, 2, {0.2, 0.1});
  CHECK(w.l1 == doctest::Approx(std::pow(2 * kPi, 3)));
  CHECK(w.constant == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(code_of([&] { weak_type_constant(f, ctx, {1.0}, 0, {0.2}); }) == ErrorCode::InvalidArgument);
}
