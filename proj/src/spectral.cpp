#include "vortlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <random>

#include "vortlab/error.hpp"

namespace vortlab {

namespace {

// FFTW_ESTIMATE keeps plans deterministic, so repeated runs are bit identical.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    const std::size_t real_size = std::size_t(n) * n * n;
    const std::size_t cplx_size = std::size_t(n) * n * (n / 2 + 1);
    real_ = fftw_alloc_real(real_size);
    cplx_ = fftw_alloc_complex(cplx_size);
    fwd_ = fftw_plan_dft_r2c_3d(n, n, n, real_, cplx_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_3d(n, n, n, cplx_, real_, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(const double* in, cplx* out) {
    const std::size_t rs = std::size_t(n_) * n_ * n_;
    const std::size_t cs = std::size_t(n_) * n_ * (n_ / 2 + 1);
    std::memcpy(real_, in, rs * sizeof(double));
    fftw_execute(fwd_);
    const double scale = 1.0 / double(rs);
    for (std::size_t i = 0; i < cs; ++i) out[i] = cplx(cplx_[i][0] * scale, cplx_[i][1] * scale);
  }

  void inverse(const cplx* in, double* out) {
    const std::size_t rs = std::size_t(n_) * n_ * n_;
    const std::size_t cs = std::size_t(n_) * n_ * (n_ / 2 + 1);
    std::memcpy(cplx_, in, cs * sizeof(fftw_complex));
    fftw_execute(inv_);
    std::memcpy(out, real_, rs * sizeof(double));
  }

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

FftPlan& plan_for(int n) {
  static std::map<int, std::unique_ptr<FftPlan>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
  return *it->second;
}

const cplx I(0.0, 1.0);

}  // namespace

SpectralField transform(const GridField& field) {
  SpectralField s(field.spec, field.components);
  FftPlan& p = plan_for(field.spec.n);
  for (int c = 0; c < field.components; ++c) p.forward(field.comp(c), s.comp(c));
  return s;
}

GridField inverse_transform(const SpectralField& s, double time) {
  GridField f(s.spec, s.components, time);
  FftPlan& p = plan_for(s.spec.n);
  for (int c = 0; c < s.components; ++c) p.inverse(s.comp(c), f.comp(c));
  return f;
}

double spectral_norm2(const SpectralField& s) {
  double acc = 0;
  for (int c = 0; c < s.components; ++c) {
    const cplx* a = s.comp(c);
    for_each_mode(s.spec, [&](const Mode& md) { acc += md.weight * std::norm(a[md.idx]); });
  }
  const double L = s.spec.L;
  return acc * L * L * L;
}

GridField gradient(const GridField& field) {
  const SpectralField s = transform(field);
  SpectralField out(field.spec, 3 * field.components);
  for (int c = 0; c < field.components; ++c) {
    const cplx* a = s.comp(c);
    cplx* o[3] = {out.comp(3 * c), out.comp(3 * c + 1), out.comp(3 * c + 2)};
    for_each_mode(field.spec, [&](const Mode& md) {
      for (int j = 0; j < 3; ++j) o[j][md.idx] = I * md.keff[j] * a[md.idx];
    });
  }
  return inverse_transform(out, field.time);
}

GridField divergence(const GridField& field) {
  require_components(field, 3, "divergence");
  const SpectralField s = transform(field);
  SpectralField out(field.spec, 1);
  cplx* o = out.comp(0);
  for_each_mode(field.spec, [&](const Mode& md) {
    cplx acc = 0;
    for (int j = 0; j < 3; ++j) acc += I * md.keff[j] * s.comp(j)[md.idx];
    o[md.idx] = acc;
  });
  return inverse_transform(out, field.time);
}

void curl_hat(const SpectralField& in, SpectralField& out) {
  if (in.components != 3) fail(ErrorCode::ComponentMismatch, "curl requires 3 components");
  if (out.components != 3 || !(out.spec == in.spec)) out = SpectralField(in.spec, 3);
  const cplx *a = in.comp(0), *b = in.comp(1), *c = in.comp(2);
  cplx *x = out.comp(0), *y = out.comp(1), *z = out.comp(2);
  for_each_mode(in.spec, [&](const Mode& md) {
    const std::size_t i = md.idx;
    const cplx ax = a[i], by = b[i], cz = c[i];
    x[i] = I * (md.keff[1] * cz - md.keff[2] * by);
    y[i] = I * (md.keff[2] * ax - md.keff[0] * cz);
    z[i] = I * (md.keff[0] * by - md.keff[1] * ax);
  });
}

GridField curl(const GridField& field) {
  require_components(field, 3, "curl");
  SpectralField out;
  curl_hat(transform(field), out);
  return inverse_transform(out, field.time);
}

GridField laplacian(const GridField& field) {
  SpectralField s = transform(field);
  for (int c = 0; c < s.components; ++c) {
    cplx* a = s.comp(c);
    for_each_mode(s.spec, [&](const Mode& md) { a[md.idx] *= -md.k2; });
  }
  return inverse_transform(s, field.time);
}

GridField differential(const GridField& field, DiffOp op) {
  switch (op) {
    case DiffOp::gradient: return gradient(field);
    case DiffOp::divergence: return divergence(field);
    case DiffOp::curl: return curl(field);
    case DiffOp::laplacian: return laplacian(field);
  }
  fail(ErrorCode::InvalidArgument, "unknown differential operator");
}

InverseLaplacian inverse_laplacian(const GridField& field) {
  SpectralField s = transform(field);
  InverseLaplacian r;
  for (int c = 0; c < s.components; ++c) {
    cplx* a = s.comp(c);
    r.discarded_mean.push_back(a[0].real());
    for_each_mode(s.spec, [&](const Mode& md) { a[md.idx] = md.k2 > 0 ? a[md.idx] / (-md.k2) : cplx(0.0); });
  }
  r.field = inverse_transform(s, field.time);
  return r;
}

GridField inv_lap(const GridField& field) { return inverse_laplacian(field).field; }

void project_curl_hat(SpectralField& s) {
  if (s.components != 3) fail(ErrorCode::ComponentMismatch, "P_curl requires 3 components");
  cplx *a = s.comp(0), *b = s.comp(1), *c = s.comp(2);
  for_each_mode(s.spec, [&](const Mode& md) {
    const std::size_t i = md.idx;
    if (md.k2 == 0) {
      a[i] = b[i] = c[i] = 0;
      return;
    }
    if (md.keff2 == 0) return;
    const cplx kd = (md.keff[0] * a[i] + md.keff[1] * b[i] + md.keff[2] * c[i]) / md.keff2;
    a[i] -= md.keff[0] * kd;
    b[i] -= md.keff[1] * kd;
    c[i] -= md.keff[2] * kd;
  });
}

GridField project_curl(const GridField& field) {
  require_components(field, 3, "project_curl");
  SpectralField s = transform(field);
  project_curl_hat(s);
  return inverse_transform(s, field.time);
}

GridField project_grad(const GridField& field) {
  require_components(field, 3, "project_grad");
  SpectralField s = transform(field);
  SpectralField p = s;
  project_curl_hat(p);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] -= p.coeffs[i];
  for (int c = 0; c < 3; ++c) s.comp(c)[0] = 0;
  return inverse_transform(s, field.time);
}

HelmholtzParts helmholtz_split(const GridField& field) {
  require_components(field, 3, "helmholtz_split");
  SpectralField s = transform(field);
  HelmholtzParts parts;
  parts.mean = {s.comp(0)[0].real(), s.comp(1)[0].real(), s.comp(2)[0].real()};
  SpectralField p = s;
  project_curl_hat(p);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] -= p.coeffs[i];
  for (int c = 0; c < 3; ++c) s.comp(c)[0] = 0;
  parts.curl_part = inverse_transform(p, field.time);
  parts.grad_part = inverse_transform(s, field.time);
  return parts;
}

GridField riesz_R(const GridField& tensor9) {
  require_components(tensor9, 9, "riesz_R");
  const SpectralField t = transform(tensor9);
  SpectralField out(tensor9.spec, 1);
  cplx* o = out.comp(0);
  for_each_mode(tensor9.spec, [&](const Mode& md) {
    const std::size_t i = md.idx;
    const cplx tr = t.comp(0)[i] + t.comp(4)[i] + t.comp(8)[i];
    if (md.k2 == 0) {
      o[i] = 0.5 * tr;
      return;
    }
    cplx ktk = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) ktk += md.keff[a] * md.keff[b] * t.comp(3 * a + b)[i];
    o[i] = 0.5 * tr - ktk / md.k2;
  });
  return inverse_transform(out, tensor9.time);
}

void dealias_hat(SpectralField& s) {
  for (int c = 0; c < s.components; ++c) {
    cplx* a = s.comp(c);
    for_each_mode(s.spec, [&](const Mode& md) {
      if (!md.dealiased) a[md.idx] = 0;
    });
  }
}

GridField dealias(const GridField& field) {
  SpectralField s = transform(field);
  dealias_hat(s);
  return inverse_transform(s, field.time);
}

bool is_band_limited(const GridField& field, double tol) {
  const SpectralField s = transform(field);
  double inside = 0, outside = 0;
  for (int c = 0; c < s.components; ++c) {
    const cplx* a = s.comp(c);
    for_each_mode(s.spec, [&](const Mode& md) {
      (md.dealiased ? inside : outside) += md.weight * std::norm(a[md.idx]);
    });
  }
  return outside <= tol * tol * std::max(inside, 1e-300);
}

namespace {
GridField finish(GridField f, bool dealias_out) { return dealias_out ? dealias(f) : f; }
}  // namespace

GridField product(const GridField& scalar, const GridField& f, bool dealias_out) {
  return finish(multiply(scalar, f), dealias_out);
}

GridField cross(const GridField& a, const GridField& b, bool dealias_out) {
  require_components(a, 3, "cross");
  require_components(b, 3, "cross");
  if (!(a.spec == b.spec)) fail(ErrorCode::DimensionMismatch, "cross: grid mismatch");
  GridField out(a.spec, 3, a.time);
  const std::size_t m = a.spec.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3 x = a.vec(i), y = b.vec(i);
    out.set_vec(i, {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]});
  }
  return finish(std::move(out), dealias_out);
}

GridField dot(const GridField& a, const GridField& b, bool dealias_out) {
  require_same_layout(a, b, "dot");
  GridField out(a.spec, 1, a.time);
  const std::size_t m = a.spec.size();
  for (int c = 0; c < a.components; ++c)
    for (std::size_t i = 0; i < m; ++i) out.data[i] += a.at(c, i) * b.at(c, i);
  return finish(std::move(out), dealias_out);
}

GridField outer(const GridField& a, const GridField& b, bool dealias_out) {
  require_components(a, 3, "outer");
  require_components(b, 3, "outer");
  GridField out(a.spec, 9, a.time);
  const std::size_t m = a.spec.size();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (std::size_t p = 0; p < m; ++p) out.at(3 * i + j, p) = a.at(i, p) * b.at(j, p);
  return finish(std::move(out), dealias_out);
}

GridField advect(const GridField& a, const GridField& b, bool dealias_out) {
  require_components(a, 3, "advect");
  require_components(b, 3, "advect");
  const GridField g = gradient(b);
  GridField out(a.spec, 3, a.time);
  const std::size_t m = a.spec.size();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (std::size_t p = 0; p < m; ++p) out.at(i, p) += a.at(j, p) * g.at(3 * i + j, p);
  return finish(std::move(out), dealias_out);
}

GridField random_field(const GridSpec& spec, int comps, int kmax, unsigned long long seed, bool mean_free,
                       bool solenoidal) {
  if (solenoidal && comps != 3) fail(ErrorCode::ComponentMismatch, "solenoidal random field needs 3 components");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  SpectralField s(spec, comps);
  for (int c = 0; c < comps; ++c) {
    cplx* a = s.comp(c);
    for_each_mode(spec, [&](const Mode& md) {
      const bool inside = std::abs(md.m[0]) <= kmax && std::abs(md.m[1]) <= kmax && std::abs(md.m[2]) <= kmax &&
                          2 * std::abs(md.m[0]) < spec.n && 2 * std::abs(md.m[1]) < spec.n &&
                          2 * std::abs(md.m[2]) < spec.n;
      const double re = nd(rng), im = nd(rng);
      a[md.idx] = inside ? cplx(re, im) : cplx(0.0);
    });
  }
  // Round trip through real space enforces Hermitian symmetry on the kx = 0 plane.
  s = transform(inverse_transform(s));
  if (mean_free)
    for (int c = 0; c < comps; ++c) s.comp(c)[0] = 0;
  if (solenoidal) project_curl_hat(s);
  GridField f = inverse_transform(s);
  const double m = max_norm(f);
  if (m > 0)
    for (double& x : f.data) x /= m;
  return f;
}

double lp_norm(const GridField& f, double p) {
  const std::size_t m = f.spec.size();
  double acc = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (int c = 0; c < f.components; ++c) s += f.at(c, i) * f.at(c, i);
    acc += std::pow(std::sqrt(s), p);
  }
  return std::pow(acc * f.spec.cell_volume(), 1.0 / p);
}

}  // namespace vortlab
