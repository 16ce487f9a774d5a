#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vortlab/error.hpp"
#include "vortlab/localization.hpp"
#include "vortlab/ns_solver.hpp"
#include "vortlab/spectral.hpp"

using namespace vortlab;

namespace {

GridSpec grid(int n) {
  GridSpec s;
  s.n = n;
  return s;
}

const std::array<double, 4> kRadii{0.95, 2.05, 2.1, 3.1};

}  // namespace

TEST_CASE("smooth step and radial bump") {
  CHECK(smooth_step(-0.5) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5, 2.0) == doctest::Approx(0.5));
  double prev = 0;
  for (int i = 1; i < 100; ++i) {
    const double v = smooth_step(i / 100.0, 1.4);
    CHECK(v >= prev);
    prev = v;
  }
  // Symmetry g(s) + g(1 - s) = 1.
  CHECK(smooth_step(0.3) + smooth_step(0.7) == doctest::Approx(1.0));
  CHECK(radial_bump(0.5, 1.0, 2.0) == 1.0);
  CHECK(radial_bump(2.5, 1.0, 2.0) == 0.0);
}

TEST_CASE("cut-off pair geometry") {
  const GridSpec s = grid(32);
  const CutoffPair c = make_cutoff_pair(s, kRadii, 1.4);
  for (std::size_t p = 0; p < s.size(); ++p) {
    const int i = int(p % 32), j = int(p / 32 % 32), k = int(p / 1024);
    const Vec3 x = s.point(i, j, k);
    const double r = std::hypot(x[0], x[1], x[2]);
    if (r <= kRadii[0]) CHECK(c.phi.at(0, p) == 1.0);
    if (r >= kRadii[1]) CHECK(c.phi.at(0, p) == 0.0);
    if (r <= kRadii[2]) CHECK(c.phi_sharp.at(0, p) == 1.0);
    if (r >= kRadii[3]) CHECK(c.phi_sharp.at(0, p) == 0.0);
  }
  CHECK(max_norm(multiply(c.phi_sharp, c.phi) - c.phi) == 0.0);
  CHECK(max_gradient(c.phi) > 0.0);

  CHECK_THROWS_AS(make_cutoff_pair(s, {1.0, 0.9, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(make_cutoff_pair(s, {1.0, 1.5, 2.0, 3.2}), Error);
  CHECK_THROWS_AS(make_cutoff_pair(s, kRadii, 0.0), Error);
}

TEST_CASE("localized velocity sees only the vorticity") {
  const GridSpec s = grid(24);
  const CutoffPair c = make_cutoff_pair(s, kRadii, 1.4);
  const GridField u = random_field(s, 3, 4, 21, true, true);
  const GridField constant = sample_field(s, 3, [](const Vec3&, double* o) {
    o[0] = 0.3;
    o[1] = -1;
    o[2] = 2;
  });
  const LocalizedTriple a = localized_velocity(u, c);
  const LocalizedTriple b = localized_velocity(u + constant, c);
  CHECK(max_norm(a.v - b.v) < 1e-12 * max_norm(a.v));
  CHECK(max_norm(localize(constant, c)) < 1e-14);
  CHECK(max_norm(divergence(a.v)) < 1e-10 * max_norm(a.v));
  CHECK(max_norm(localize(2.0 * u, c) - 2.0 * a.v) < 1e-12 * max_norm(a.v));
  CHECK(max_norm(a.v + a.w - multiply(c.phi, u)) < 1e-13);
  CHECK(max_norm(a.varpi + curl(a.v) - multiply(c.phi, curl(u))) < 1e-12);
  CHECK_THROWS_AS(localize(component(u, 0), c), Error);
}

TEST_CASE("harmonicity residual") {
  const GridSpec s = grid(16);
  const GridField omega = sample_field(s, 1, [](const Vec3&, double* o) { o[0] = 1; });
  CHECK(harmonicity_residual(GridField(s, 1), 0.5, omega) == 0.0);
  const GridField wave = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::cos(x[0]); });
  // max |Lap cos x| on B_0.5 is 1 (at x = 0); L1 of 1 on B_2 is the lattice count times h^3.
  long count = 0;
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const Vec3 x = s.point(i, j, k);
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < 4.0) ++count;
      }
  CHECK(harmonicity_residual(wave, 0.5, omega) == doctest::Approx(1.0 / (count * s.cell_volume())));
  CHECK_THROWS_AS(harmonicity_residual(wave, 1.0, omega), Error);
}

TEST_CASE("commutator closed forms on band-limited data") {
  const GridSpec s = grid(32);
  const GridField phi = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = 1 + 0.5 * std::cos(x[0]) * std::cos(x[1]); });
  const GridField u = random_field(s, 3, 3, 8, true, true);
  LocalizationOptions opt;
  opt.dealias_products = true;
  for (CommutatorKind k : {CommutatorKind::cm1, CommutatorKind::cm2, CommutatorKind::cm3, CommutatorKind::cm4}) {
    const CommutatorResult r = commutator(k, phi, u, opt);
    CHECK(r.residual < 1e-12);
    if (k == CommutatorKind::cm2) CHECK(r.alternate_residual < 1e-12);
  }
  GridSpec other = grid(16);
  CHECK_THROWS_AS(commutator(CommutatorKind::cm1, phi, random_field(other, 3, 2, 1), opt), Error);
}

namespace {

VEquationReport v_equation_report(int n, std::vector<Snapshot>* keep = nullptr) {
  SolverConfig c;
  c.grid = grid(n);
  c.dt = 2e-3;
  c.t_end = 0.04;
  c.snapshot_stride = 4;
  const RunResult r = run(c, taylor_green_init(c.grid, 1.0));
  if (keep) *keep = r.snapshots;
  return v_equation_residual(r.snapshots, make_cutoff_pair(c.grid, kRadii, 1.4));
}

}  // namespace

TEST_CASE("v equation closes under spatial refinement") {
  std::vector<Snapshot> snaps;
  const VEquationReport fine = v_equation_report(32, &snaps);
  const VEquationReport coarse = v_equation_report(24);
  CHECK(fine.times.size() == snaps.size() - 4);
  CHECK(fine.dt_v_l2 > 0);
  CHECK(fine.relative < 2e-3);
  CHECK(coarse.relative > 2 * fine.relative);

  std::vector<Snapshot> few(snaps.begin(), snaps.begin() + 4);
  CHECK_THROWS_AS(v_equation_residual(few, make_cutoff_pair(snaps[0].velocity.spec, kRadii, 1.4)), Error);
}

TEST_CASE("boundedness probe is deterministic and monotone") {
  const GridSpec s = grid(16);
  const GridField phi = radial_field(s, [](double r) { return radial_bump(r, 0.8, 1.6, 1.0); });
  const ProbeReport a = boundedness_probe(ProbeKind::di_commutator_Pcurl, phi, 2.0, 6, 3);
  const ProbeReport b = boundedness_probe(ProbeKind::di_commutator_Pcurl, phi, 2.0, 6, 3);
  REQUIRE(a.running_max.size() == 6);
  CHECK(a.running_max == b.running_max);
  for (std::size_t i = 1; i < a.running_max.size(); ++i) CHECK(a.running_max[i] >= a.running_max[i - 1]);
  CHECK(a.estimate == a.running_max.back());
  CHECK(boundedness_probe(ProbeKind::commutator_Pcurl_di, phi, 3.0, 3, 3).estimate > 0);
}

TEST_CASE("smoothing ratio is finite and scale invariant") {
  const GridSpec s = grid(16);
  const GridField phi = radial_field(s, [](double r) { return radial_bump(r, 0.8, 1.6, 1.0); });
  const GridField f = random_field(s, 1, 4, 2);
  const double r1 = smoothing_ratio(phi, f, {2.5, 0, 0}, 0.3);
  CHECK(std::isfinite(r1));
  CHECK(r1 > 0);
  CHECK(smoothing_ratio(phi, 3.0 * f, {2.5, 0, 0}, 0.3) == doctest::Approx(r1));
}
