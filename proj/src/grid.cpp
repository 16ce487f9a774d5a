#include "vortlab/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vortlab/error.hpp"

namespace vortlab {

void GridSpec::validate() const {
  if (n < 4 || n % 2 != 0) fail(ErrorCode::InvalidArgument, "n must be even and >= 4, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) fail(ErrorCode::InvalidArgument, "domain length must be positive");
  for (double o : origin)
    if (!std::isfinite(o)) fail(ErrorCode::InvalidArgument, "origin must be finite");
}

GridField::GridField(const GridSpec& s, int comps, double t) : spec(s), components(comps), time(t) {
  s.validate();
  if (comps < 1) fail(ErrorCode::ComponentMismatch, "components must be positive");
  data.assign(std::size_t(comps) * s.size(), 0.0);
}

Vec3 GridField::vec(std::size_t idx) const {
  const std::size_t m = spec.size();
  return {data[idx], data[m + idx], data[2 * m + idx]};
}

void GridField::set_vec(std::size_t idx, const Vec3& v) {
  const std::size_t m = spec.size();
  data[idx] = v[0];
  data[m + idx] = v[1];
  data[2 * m + idx] = v[2];
}

void GridField::check_finite() const {
  for (double x : data)
    if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite sample in field");
}

SpectralField::SpectralField(const GridSpec& s, int comps) : spec(s), components(comps) {
  s.validate();
  coeffs.assign(std::size_t(comps) * s.modes(), cplx(0.0, 0.0));
}

GridField sample_field(const GridSpec& spec, int comps,
                       const std::function<void(const Vec3&, double*)>& f, double t) {
  GridField out(spec, comps, t);
  std::vector<double> buf(comps);
  const int n = spec.n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        f(spec.point(i, j, k), buf.data());
        const std::size_t idx = spec.index(i, j, k);
        for (int c = 0; c < comps; ++c) out.at(c, idx) = buf[c];
      }
  return out;
}

GridField radial_field(const GridSpec& spec, const std::function<double(double)>& f) {
  return sample_field(spec, 1, [&](const Vec3& x, double* o) {
    o[0] = f(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
}

void require_same_layout(const GridField& a, const GridField& b, const char* where) {
  if (!(a.spec == b.spec)) fail(ErrorCode::DimensionMismatch, std::string(where) + ": grid mismatch");
  if (a.components != b.components)
    fail(ErrorCode::ComponentMismatch, std::string(where) + ": component mismatch");
}

void require_components(const GridField& a, int comps, const char* where) {
  if (a.components != comps)
    fail(ErrorCode::ComponentMismatch, std::string(where) + ": expected " + std::to_string(comps) +
                                           " components, got " + std::to_string(a.components));
}

GridField operator+(const GridField& a, const GridField& b) {
  require_same_layout(a, b, "add");
  GridField out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

GridField operator-(const GridField& a, const GridField& b) {
  require_same_layout(a, b, "subtract");
  GridField out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

GridField operator*(double s, const GridField& a) {
  GridField out = a;
  for (double& x : out.data) x *= s;
  return out;
}

GridField multiply(const GridField& scalar, const GridField& a) {
  require_components(scalar, 1, "multiply");
  if (!(scalar.spec == a.spec)) fail(ErrorCode::DimensionMismatch, "multiply: grid mismatch");
  GridField out = a;
  const std::size_t m = a.spec.size();
  for (int c = 0; c < a.components; ++c)
    for (std::size_t i = 0; i < m; ++i) out.at(c, i) *= scalar.data[i];
  return out;
}

GridField component(const GridField& a, int c) {
  GridField out(a.spec, 1, a.time);
  std::memcpy(out.data.data(), a.comp(c), sizeof(double) * a.spec.size());
  return out;
}

GridField magnitude(const GridField& a) {
  GridField out(a.spec, 1, a.time);
  const std::size_t m = a.spec.size();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (int c = 0; c < a.components; ++c) s += a.at(c, i) * a.at(c, i);
    out.data[i] = std::sqrt(s);
  }
  return out;
}

double l2_norm(const GridField& a) {
  double s = 0;
  for (double x : a.data) s += x * x;
  return std::sqrt(s * a.spec.cell_volume());
}

double max_norm(const GridField& a) {
  const std::size_t m = a.spec.size();
  double best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (int c = 0; c < a.components; ++c) s += a.at(c, i) * a.at(c, i);
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

namespace {
template <class F>
void for_ball(const GridSpec& spec, double radius, const Vec3& center, F f) {
  const int n = spec.n;
  const double r2 = radius * radius;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 x = spec.point(i, j, k);
        const double d0 = x[0] - center[0], d1 = x[1] - center[1], d2 = x[2] - center[2];
        if (d0 * d0 + d1 * d1 + d2 * d2 < r2) f(spec.index(i, j, k));
      }
}
}  // namespace

double l2_norm_ball(const GridField& a, double radius, const Vec3& center) {
  double s = 0;
  for_ball(a.spec, radius, center, [&](std::size_t idx) {
    for (int c = 0; c < a.components; ++c) s += a.at(c, idx) * a.at(c, idx);
  });
  return std::sqrt(s * a.spec.cell_volume());
}

double max_norm_ball(const GridField& a, double radius, const Vec3& center) {
  double best = 0;
  for_ball(a.spec, radius, center, [&](std::size_t idx) {
    double s = 0;
    for (int c = 0; c < a.components; ++c) s += a.at(c, idx) * a.at(c, idx);
    best = std::max(best, s);
  });
  return std::sqrt(best);
}

double power_integral_ball(const GridField& a, double p, double radius, const Vec3& center) {
  double s = 0;
  for_ball(a.spec, radius, center, [&](std::size_t idx) {
    double m = 0;
    for (int c = 0; c < a.components; ++c) m += a.at(c, idx) * a.at(c, idx);
    s += std::pow(m, 0.5 * p);
  });
  return s * a.spec.cell_volume();
}

double integral(const GridField& scalar) {
  require_components(scalar, 1, "integral");
  double s = 0;
  for (double x : scalar.data) s += x;
  return s * scalar.spec.cell_volume();
}

double inner(const GridField& a, const GridField& b) {
  require_same_layout(a, b, "inner");
  double s = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s * a.spec.cell_volume();
}

namespace {

static_assert(std::endian::native == std::endian::little, "VLF1 io assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorCode::Io, "truncated VLF1 header in " + path);
  return v;
}

}  // namespace

void write_vlf1(const std::string& path, const GridField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  os.write("VLF1", 4);
  put<std::uint32_t>(os, std::uint32_t(f.spec.n));
  put<std::uint32_t>(os, std::uint32_t(f.components));
  put<double>(os, f.spec.L);
  for (double o : f.spec.origin) put<double>(os, o);
  put<double>(os, f.time);
  os.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(f.data.size() * sizeof(double)));
  if (!os) fail(ErrorCode::Io, "write failed for " + path);
}

GridField read_vlf1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "VLF1", 4) != 0) fail(ErrorCode::Io, "bad magic in " + path);
  GridSpec spec;
  spec.n = int(get<std::uint32_t>(is, path));
  const int comps = int(get<std::uint32_t>(is, path));
  spec.L = get<double>(is, path);
  for (double& o : spec.origin) o = get<double>(is, path);
  const double t = get<double>(is, path);
  GridField f(spec, comps, t);
  is.read(reinterpret_cast<char*>(f.data.data()), std::streamsize(f.data.size() * sizeof(double)));
  if (!is) fail(ErrorCode::Io, "truncated VLF1 payload in " + path);
  return f;
}

}  // namespace vortlab
