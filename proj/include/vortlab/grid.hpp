#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace vortlab {

using Vec3 = std::array<double, 3>;
using cplx = std::complex<double>;

// Periodic cube [origin, origin + L)^3 sampled at n points per axis.
struct GridSpec {
  int n = 32;
  double L = 2.0 * std::numbers::pi;
  Vec3 origin{-std::numbers::pi, -std::numbers::pi, -std::numbers::pi};

  void validate() const;
  double h() const { return L / n; }
  double cell_volume() const { return h() * h() * h(); }
  std::size_t size() const { return std::size_t(n) * n * n; }
  // Number of stored r2c modes: n * n * (n/2 + 1).
  std::size_t modes() const { return std::size_t(n) * n * (n / 2 + 1); }
  std::size_t index(int i, int j, int k) const { return (std::size_t(k) * n + j) * n + i; }
  Vec3 point(int i, int j, int k) const {
    return {origin[0] + i * h(), origin[1] + j * h(), origin[2] + k * h()};
  }
  // Fourier scale 2*pi/L.
  double k0() const { return 2.0 * std::numbers::pi / L; }
  bool operator==(const GridSpec& o) const { return n == o.n && L == o.L && origin == o.origin; }
};

// Real samples, component-major, x fastest.
struct GridField {
  GridSpec spec;
  int components = 1;
  std::vector<double> data;
  double time = 0.0;

  GridField() = default;
  GridField(const GridSpec& s, int comps, double t = 0.0);

  double* comp(int c) { return data.data() + c * spec.size(); }
  const double* comp(int c) const { return data.data() + c * spec.size(); }
  double& at(int c, std::size_t idx) { return data[c * spec.size() + idx]; }
  double at(int c, std::size_t idx) const { return data[c * spec.size() + idx]; }
  Vec3 vec(std::size_t idx) const;
  void set_vec(std::size_t idx, const Vec3& v);
  void check_finite() const;
};

// r2c coefficients normalized so that a constant c has zero mode c.
// Storage per component: index (kz * n + ky) * (n/2+1) + kx.
struct SpectralField {
  GridSpec spec;
  int components = 1;
  std::vector<cplx> coeffs;

  SpectralField() = default;
  SpectralField(const GridSpec& s, int comps);

  cplx* comp(int c) { return coeffs.data() + c * spec.modes(); }
  const cplx* comp(int c) const { return coeffs.data() + c * spec.modes(); }
};

// Sample f(x, y, z, out) where out has `comps` slots.
GridField sample_field(const GridSpec& spec, int comps,
                       const std::function<void(const Vec3&, double*)>& f, double t = 0.0);

GridField radial_field(const GridSpec& spec, const std::function<double(double)>& f);

void require_same_layout(const GridField& a, const GridField& b, const char* where);
void require_components(const GridField& a, int comps, const char* where);

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& a);
// Pointwise scalar times field (no dealiasing).
GridField multiply(const GridField& scalar, const GridField& a);
GridField component(const GridField& a, int c);
GridField magnitude(const GridField& a);

double l2_norm(const GridField& a);
double max_norm(const GridField& a);
// L2 norm restricted to the ball |x - center| < radius.
double l2_norm_ball(const GridField& a, double radius, const Vec3& center = {0, 0, 0});
double max_norm_ball(const GridField& a, double radius, const Vec3& center = {0, 0, 0});
// sum over grid points in the ball of |a|^p times the cell volume.
double power_integral_ball(const GridField& a, double p, double radius, const Vec3& center = {0, 0, 0});
double integral(const GridField& scalar);
double inner(const GridField& a, const GridField& b);

// VLF1 binary format.
void write_vlf1(const std::string& path, const GridField& f);
GridField read_vlf1(const std::string& path);

}  // namespace vortlab
