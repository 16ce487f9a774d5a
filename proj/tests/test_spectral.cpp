#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortlab/error.hpp"
#include "vortlab/grid.hpp"
#include "vortlab/spectral.hpp"

using namespace vortlab;

namespace {

GridSpec grid(int n) {
  GridSpec s;
  s.n = n;
  return s;
}

double max_diff(const GridField& a, const GridField& b) { return max_norm(a - b); }

// f = sin(x) cos(2y) + cos(3z)
GridField scalar_f(const GridSpec& s) {
  return sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::sin(x[0]) * std::cos(2 * x[1]) + std::cos(3 * x[2]); });
}

}  // namespace

TEST_CASE("transform normalization and round trip") {
  const GridSpec s = grid(16);
  GridField c = sample_field(s, 1, [](const Vec3&, double* o) { o[0] = 2.5; });
  const SpectralField hat = transform(c);
  CHECK(hat.comp(0)[0].real() == doctest::Approx(2.5));
  CHECK(std::abs(hat.comp(0)[1]) < 1e-14);

  const GridField f = random_field(s, 3, 5, 11, false);
  CHECK(max_diff(inverse_transform(transform(f)), f) < 1e-13);

  // Parseval against the direct Riemann sum, exact for trigonometric polynomials.
  const GridField g = scalar_f(s);
  CHECK(spectral_norm2(transform(g)) == doctest::Approx(l2_norm(g) * l2_norm(g)).epsilon(1e-12));
}

TEST_CASE("derivatives of a trigonometric polynomial") {
  const GridSpec s = grid(16);
  const GridField f = scalar_f(s);
  const GridField gx = sample_field(s, 3, [](const Vec3& x, double* o) {
    o[0] = std::cos(x[0]) * std::cos(2 * x[1]);
    o[1] = -2 * std::sin(x[0]) * std::sin(2 * x[1]);
    o[2] = -3 * std::sin(3 * x[2]);
  });
  CHECK(max_diff(gradient(f), gx) < 1e-12);
  const GridField lap = sample_field(s, 1, [](const Vec3& x, double* o) {
    o[0] = -5 * std::sin(x[0]) * std::cos(2 * x[1]) - 9 * std::cos(3 * x[2]);
  });
  CHECK(max_diff(laplacian(f), lap) < 1e-11);
  CHECK(max_diff(differential(f, DiffOp::laplacian), lap) < 1e-11);

  // u = (sin y, sin z, sin x): curl = (-cos z, -cos x, -cos y), div = 0.
  const GridField u = sample_field(s, 3, [](const Vec3& x, double* o) {
    o[0] = std::sin(x[1]);
    o[1] = std::sin(x[2]);
    o[2] = std::sin(x[0]);
  });
  const GridField cu = sample_field(s, 3, [](const Vec3& x, double* o) {
    o[0] = -std::cos(x[2]);
    o[1] = -std::cos(x[0]);
    o[2] = -std::cos(x[1]);
  });
  CHECK(max_diff(curl(u), cu) < 1e-12);
  CHECK(max_norm(divergence(u)) < 1e-12);
  CHECK(gradient(u).components == 9);
  CHECK(gradient(u).at(3 * 0 + 1, 0) == doctest::Approx(std::cos(s.point(0, 0, 0)[1])));
  CHECK_THROWS_AS(curl(f), Error);
}

TEST_CASE("vector identities on random band-limited fields") {
  const GridSpec s = grid(24);
  const GridField phi = random_field(s, 1, 6, 3);
  const GridField u = random_field(s, 3, 6, 4);
  const double scale = max_norm(u) * 36;
  CHECK(max_norm(curl(gradient(phi))) < 1e-12 * max_norm(phi) * 36);
  CHECK(max_norm(divergence(curl(u))) < 1e-12 * scale);
  // curl curl = grad div - Lap
  CHECK(max_diff(curl(curl(u)), gradient(divergence(u)) - laplacian(u)) < 1e-11 * scale);
}

TEST_CASE("inverse Laplacian reports the discarded mean") {
  const GridSpec s = grid(16);
  GridField f = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = 0.7 + std::sin(x[0] + x[1]); });
  const InverseLaplacian r = inverse_laplacian(f);
  REQUIRE(r.discarded_mean.size() == 1);
  CHECK(r.discarded_mean[0] == doctest::Approx(0.7));
  const GridField expect = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = -0.5 * std::sin(x[0] + x[1]); });
  CHECK(max_diff(r.field, expect) < 1e-13);
  CHECK(max_diff(inv_lap(f), expect) < 1e-13);
}

TEST_CASE("Helmholtz split recovers planted parts") {
  const GridSpec s = grid(16);
  // grad part: grad(cos x sin 2z); curl part: (sin y, 0, cos x); mean (0.1, 0, -0.2)
  const GridField g = sample_field(s, 3, [](const Vec3& x, double* o) {
    o[0] = -std::sin(x[0]) * std::sin(2 * x[2]);
    o[1] = 0;
    o[2] = 2 * std::cos(x[0]) * std::cos(2 * x[2]);
  });
  const GridField c = sample_field(s, 3, [](const Vec3& x, double* o) {
    o[0] = std::sin(x[1]);
    o[1] = 0;
    o[2] = std::cos(x[0]);
  });
  const GridField m = sample_field(s, 3, [](const Vec3&, double* o) {
    o[0] = 0.1;
    o[1] = 0;
    o[2] = -0.2;
  });
  const HelmholtzParts h = helmholtz_split(g + c + m);
  CHECK(max_diff(h.grad_part, g) < 1e-13);
  CHECK(max_diff(h.curl_part, c) < 1e-13);
  CHECK(h.mean[0] == doctest::Approx(0.1));
  CHECK(h.mean[2] == doctest::Approx(-0.2));
  CHECK(max_norm(project_curl(g)) < 1e-13);
  CHECK(max_diff(project_grad(g + c), g) < 1e-13);
}

TEST_CASE("Riesz-type operator on Hessians and constants") {
  const GridSpec s = grid(16);
  // T = Hess f with f = sin x cos 2y: R(T) = -1/2 Lap f = 5/2 f.
  const GridField f = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::sin(x[0]) * std::cos(2 * x[1]); });
  const GridField hess = gradient(gradient(f));
  REQUIRE(hess.components == 9);
  CHECK(max_diff(riesz_R(hess), 2.5 * f) < 1e-12);

  GridField id(s, 9);
  for (std::size_t p = 0; p < s.size(); ++p)
    for (int a = 0; a < 3; ++a) id.at(4 * a, p) = 1.0;
  CHECK(max_norm(riesz_R(id) - sample_field(s, 1, [](const Vec3&, double* o) { o[0] = 1.5; })) < 1e-14);
}

TEST_CASE("dealiased products are exact for band-limited factors") {
  const GridSpec s = grid(16);
  const GridField a = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::sin(2 * x[0]); });
  const GridField expect = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = 0.5 - 0.5 * std::cos(4 * x[0]); });
  CHECK(max_diff(product(a, a), expect) < 1e-14);
  CHECK(is_band_limited(product(a, a)));
  const GridField hi = sample_field(s, 1, [](const Vec3& x, double* o) { o[0] = std::cos(7 * x[1]); });
  CHECK_FALSE(is_band_limited(hi));
  CHECK(max_norm(dealias(hi)) < 1e-14);

  const GridField e1 = sample_field(s, 3, [](const Vec3&, double* o) { o[0] = 1; o[1] = 0; o[2] = 0; });
  const GridField e2 = sample_field(s, 3, [](const Vec3&, double* o) { o[0] = 0; o[1] = 1; o[2] = 0; });
  CHECK(cross(e1, e2).at(2, 17) == doctest::Approx(1.0));
  CHECK(dot(e1, e2).at(0, 17) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(outer(e1, e2).at(1, 17) == doctest::Approx(1.0));
}

TEST_CASE("random fields are deterministic and band limited") {
  const GridSpec s = grid(16);
  const GridField a = random_field(s, 3, 4, 99, true, true);
  const GridField b = random_field(s, 3, 4, 99, true, true);
  CHECK(a.data == b.data);
  CHECK(max_norm(divergence(a)) < 1e-12 * max_norm(a));
  CHECK(is_band_limited(a));
  CHECK(std::abs(integral(component(a, 0))) < 1e-12);
  CHECK(random_field(s, 3, 4, 100).data != a.data);
}

TEST_CASE("Lp norm of a constant") {
  const GridSpec s = grid(8);
  GridField c = sample_field(s, 1, [](const Vec3&, double* o) { o[0] = -2; });
  const double vol = std::pow(2 * std::numbers::pi, 3);
  CHECK(lp_norm(c, 3) == doctest::Approx(2 * std::cbrt(vol)));
}
