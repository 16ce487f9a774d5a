#include "vortlab/flowmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "vortlab/error.hpp"
#include "vortlab/quadrature.hpp"
#include "vortlab/spectral.hpp"

namespace vortlab {

namespace {

constexpr double kPi = std::numbers::pi;

double time_tol(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

// Up to four Lagrange weights in time around t.
int time_stencil(const std::vector<double>& times, double t, int idx[4], double w[4]) {
  const int n = static_cast<int>(times.size());
  if (t < times.front() - time_tol(t) || t > times.back() + time_tol(t))
    fail(ErrorCode::RangeExceeded, "time " + std::to_string(t) + " outside [" + std::to_string(times.front()) +
                                       ", " + std::to_string(times.back()) + "]");
  if (n == 1) {
    idx[0] = 0;
    w[0] = 1;
    return 1;
  }
  const int i = static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
  const int m = std::min(n, 4);
  int lo = std::clamp(i - 1, 0, n - m);
  for (int a = 0; a < m; ++a) {
    idx[a] = lo + a;
    double l = 1;
    for (int b = 0; b < m; ++b)
      if (b != a) l *= (t - times[lo + b]) / (times[lo + a] - times[lo + b]);
    w[a] = l;
  }
  return m;
}

struct SpaceStencil {
  std::size_t idx[8];
  double w[8];
};

SpaceStencil space_stencil(const GridSpec& spec, const Vec3& x) {
  const int n = spec.n;
  const double h = spec.h();
  int i0[3], i1[3];
  double fr[3];
  for (int a = 0; a < 3; ++a) {
    const double xi = (x[a] - spec.origin[a]) / h;
    const double fl = std::floor(xi);
    fr[a] = xi - fl;
    const long long b = static_cast<long long>(fl);
    i0[a] = static_cast<int>(((b % n) + n) % n);
    i1[a] = (i0[a] + 1) % n;
  }
  SpaceStencil s{};
  int c = 0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        s.idx[c] = spec.index(dx ? i1[0] : i0[0], dy ? i1[1] : i0[1], dz ? i1[2] : i0[2]);
        s.w[c] = (dx ? fr[0] : 1 - fr[0]) * (dy ? fr[1] : 1 - fr[1]) * (dz ? fr[2] : 1 - fr[2]);
        ++c;
      }
  return s;
}

const QuadratureRule& radial_rule() {
  static const QuadratureRule q = gauss_legendre(400, 0.0, 1.0);
  return q;
}

double bump(double r) { return r < 1 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

double mollifier_constant() {
  static const double c = [] {
    const auto& q = radial_rule();
    double s = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * bump(q.nodes[i]) * q.nodes[i] * q.nodes[i];
    return 1.0 / (4 * kPi * s);
  }();
  return c;
}

int periodic_offset(int d, int n) {
  d = ((d % n) + n) % n;
  return d > n / 2 ? d - n : d;
}

GridField convolve_periodic(const GridField& f, const GridField& kernel_sum_normalized) {
  // kernel is normalized so that sum K = 1; result(x) = sum_y f(y) K(x - y).
  const SpectralField kh = transform(kernel_sum_normalized);
  SpectralField fh = transform(f);
  const double scale = static_cast<double>(f.spec.size());
  for (int c = 0; c < fh.components; ++c) {
    cplx* d = fh.comp(c);
    for (std::size_t m = 0; m < f.spec.modes(); ++m) d[m] *= scale * kh.coeffs[m];
  }
  return inverse_transform(fh, f.time);
}

}  // namespace

void FieldSeries::validate() const {
  if (fields.empty() || fields.size() != times.size())
    fail(ErrorCode::DimensionMismatch, "FieldSeries: fields/times size");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) fail(ErrorCode::InvalidArgument, "FieldSeries: times not increasing");
    require_same_layout(fields[i], fields[0], "FieldSeries");
  }
}

void FieldSeries::sample(double t, const Vec3& x, double* out) const {
  int ti[4];
  double tw[4];
  const int m = time_stencil(times, t, ti, tw);
  const SpaceStencil s = space_stencil(fields.front().spec, x);
  const int nc = components();
  for (int c = 0; c < nc; ++c) out[c] = 0;
  for (int a = 0; a < m; ++a) {
    const GridField& f = fields[ti[a]];
    for (int c = 0; c < nc; ++c) {
      const double* d = f.comp(c);
      double v = 0;
      for (int q = 0; q < 8; ++q) v += s.w[q] * d[s.idx[q]];
      out[c] += tw[a] * v;
    }
  }
}

double FieldSeries::sample_scalar(double t, const Vec3& x) const {
  if (components() != 1) fail(ErrorCode::ComponentMismatch, "sample_scalar on a vector series");
  double v;
  sample(t, x, &v);
  return v;
}

FieldSeries velocity_series(const std::vector<Snapshot>& snapshots) {
  FieldSeries s;
  for (const auto& sn : snapshots) {
    s.fields.push_back(sn.velocity);
    s.times.push_back(sn.time);
  }
  s.validate();
  return s;
}

double trilinear(const GridField& f, int comp, const Vec3& x) {
  const SpaceStencil s = space_stencil(f.spec, x);
  const double* d = f.comp(comp);
  double v = 0;
  for (int q = 0; q < 8; ++q) v += s.w[q] * d[s.idx[q]];
  return v;
}

double mollifier_kernel(double r) { return mollifier_constant() * bump(r); }

double mollifier_hat(double k) {
  const auto& q = radial_rule();
  double s = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double r = q.nodes[i];
    const double kr = k * r;
    const double sinc = std::abs(kr) < 1e-8 ? 1.0 - kr * kr / 6.0 : std::sin(kr) / kr;
    s += q.weights[i] * bump(r) * r * r * sinc;
  }
  return 4 * kPi * mollifier_constant() * s;
}

GridField mollify(const GridField& u, double eps, MollifierMode mode) {
  if (!(eps > 0)) fail(ErrorCode::InvalidArgument, "mollify: eps must be positive");
  const GridSpec& spec = u.spec;
  if (mode == MollifierMode::analytic) {
    SpectralField s = transform(u);
    std::unordered_map<long long, double> symbol;
    const double k0 = spec.k0();
    for_each_mode(spec, [&](const Mode& md) {
      const long long key = 1LL * md.m[0] * md.m[0] + 1LL * md.m[1] * md.m[1] + 1LL * md.m[2] * md.m[2];
      auto it = symbol.find(key);
      if (it == symbol.end()) it = symbol.emplace(key, mollifier_hat(eps * k0 * std::sqrt(double(key)))).first;
      for (int c = 0; c < s.components; ++c) s.comp(c)[md.idx] *= it->second;
    });
    return inverse_transform(s, u.time);
  }
  const double h = spec.h();
  if (2 * eps / h < 4)
    fail(ErrorCode::UnderResolved, "mollify: kernel spans " + std::to_string(2 * eps / h) + " cells, need >= 4");
  GridField k(spec, 1);
  const int n = spec.n;
  double sum = 0;
  for (int kz = 0; kz < n; ++kz)
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < n; ++kx) {
        const double dx = periodic_offset(kx, n) * h, dy = periodic_offset(ky, n) * h,
                     dz = periodic_offset(kz, n) * h;
        const double v = bump(std::sqrt(dx * dx + dy * dy + dz * dz) / eps);
        k.data[spec.index(kx, ky, kz)] = v;
        sum += v;
      }
  for (double& v : k.data) v /= sum;
  return convolve_periodic(u, k);
}

Vec3 Trajectory::at(double time) const {
  const int m = static_cast<int>(s.size()) - 1;
  if (m == 0) return X.front();
  const double ds = s[0] - s[1];
  int j = static_cast<int>(std::floor((t0 - time) / ds));
  j = std::clamp(j, 0, m - 1);
  const double hstep = s[j + 1] - s[j];
  const double tau = (time - s[j]) / hstep;
  const double h00 = 2 * tau * tau * tau - 3 * tau * tau + 1, h10 = tau * tau * tau - 2 * tau * tau + tau,
               h01 = -2 * tau * tau * tau + 3 * tau * tau, h11 = tau * tau * tau - tau * tau;
  Vec3 r;
  for (int a = 0; a < 3; ++a)
    r[a] = h00 * X[j][a] + h10 * hstep * V[j][a] + h01 * X[j + 1][a] + h11 * hstep * V[j + 1][a];
  return r;
}

Vec3 Trajectory::velocity(double time) const {
  const int m = static_cast<int>(s.size()) - 1;
  if (m == 0) return V.front();
  const double ds = s[0] - s[1];
  int j = std::clamp(static_cast<int>(std::floor((t0 - time) / ds)), 0, m - 1);
  const double hstep = s[j + 1] - s[j];
  const double tau = (time - s[j]) / hstep;
  const double d00 = 6 * tau * tau - 6 * tau, d10 = 3 * tau * tau - 4 * tau + 1, d01 = -6 * tau * tau + 6 * tau,
               d11 = 3 * tau * tau - 2 * tau;
  Vec3 r;
  for (int a = 0; a < 3; ++a)
    r[a] = (d00 * X[j][a] + d01 * X[j + 1][a]) / hstep + d10 * V[j][a] + d11 * V[j + 1][a];
  return r;
}

std::vector<Vec3> integrate_path(const FieldSeries& velocity, double t0, const Vec3& x0, double t1, int steps,
                                 std::vector<Vec3>* node_velocity) {
  if (steps < 1) fail(ErrorCode::InvalidArgument, "integrate_path: steps >= 1");
  if (velocity.components() != 3) fail(ErrorCode::ComponentMismatch, "integrate_path: need 3 components");
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  if (lo < velocity.t_min() - time_tol(lo) || hi > velocity.t_max() + time_tol(hi))
    fail(ErrorCode::RangeExceeded, "integrate_path: time interval outside snapshot range");
  auto u = [&](double s, const Vec3& p) {
    Vec3 r;
    velocity.sample(std::clamp(s, velocity.t_min(), velocity.t_max()), p, r.data());
    return r;
  };
  auto axpy = [](const Vec3& a, double c, const Vec3& b) {
    return Vec3{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
  };
  const double hh = (t1 - t0) / steps;
  std::vector<Vec3> X{x0};
  std::vector<Vec3> V{u(t0, x0)};
  Vec3 p = x0;
  for (int j = 0; j < steps; ++j) {
    const double s = t0 + j * hh;
    const Vec3 k1 = V.back();
    const Vec3 k2 = u(s + hh / 2, axpy(p, hh / 2, k1));
    const Vec3 k3 = u(s + hh / 2, axpy(p, hh / 2, k2));
    const Vec3 k4 = u(s + hh, axpy(p, hh, k3));
    for (int a = 0; a < 3; ++a) p[a] += hh / 6 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
    X.push_back(p);
    V.push_back(u(t0 + (j + 1) * hh, p));
  }
  if (node_velocity) *node_velocity = std::move(V);
  return X;
}

Trajectory integrate_trajectory(const FieldSeries& velocity, double t, const Vec3& x, double eps, int steps) {
  if (!(eps > 0)) fail(ErrorCode::InvalidArgument, "integrate_trajectory: eps > 0");
  const double span = 9 * eps * eps;
  Trajectory tr;
  tr.t0 = t;
  tr.x0 = x;
  tr.X = integrate_path(velocity, t, x, t - span, steps, &tr.V);
  for (int j = 0; j <= steps; ++j) tr.s.push_back(t - j * span / steps);
  return tr;
}

double SkewedCylinder::volume() const {
  double v = 0;
  for (const auto& q : samples) v += q.weight;
  return v;
}

double cylinder_exact_volume(double eps) { return 9 * eps * eps * (4 * kPi / 3) * 27 * eps * eps * eps; }

SkewedCylinder build_cylinder(const FieldSeries& mollified_velocity, double t, const Vec3& x, double eps,
                              const CylinderResolution& res) {
  if (res.n_s < 1 || res.n_r < 1 || res.n_mu < 1 || res.n_phi < 1)
    fail(ErrorCode::InvalidArgument, "build_cylinder: resolution must be positive");
  SkewedCylinder cyl;
  cyl.t = t;
  cyl.x = x;
  cyl.epsilon = eps;
  cyl.trajectory = integrate_trajectory(mollified_velocity, t, x, eps, res.trajectory_steps);
  const QuadratureRule qs = gauss_legendre(res.n_s, -9.0, 0.0);
  const QuadratureRule qr = gauss_legendre(res.n_r, 0.0, 3.0);
  const QuadratureRule qm = gauss_legendre(res.n_mu, -1.0, 1.0);
  const double wphi = 2 * kPi / res.n_phi;
  const double e5 = eps * eps * eps * eps * eps;
  const double half_box = 0.5 * mollified_velocity.fields.front().spec.L;
  cyl.samples.reserve(std::size_t(res.n_s) * res.n_r * res.n_mu * res.n_phi);
  for (int is = 0; is < res.n_s; ++is) {
    const double time = t + eps * eps * qs.nodes[is];
    const Vec3 X = cyl.trajectory.at(time);
    for (int a = 0; a < 3; ++a)
      if (std::abs(X[a] - x[a]) + 3 * eps > half_box) cyl.wraps = true;
    for (int ir = 0; ir < res.n_r; ++ir) {
      const double r = qr.nodes[ir];
      for (int im = 0; im < res.n_mu; ++im) {
        const double mu = qm.nodes[im], st = std::sqrt(1 - mu * mu);
        for (int ip = 0; ip < res.n_phi; ++ip) {
          const double ph = (ip + 0.5) * wphi;
          const Vec3 y{r * st * std::cos(ph), r * st * std::sin(ph), r * mu};
          cyl.samples.push_back({time,
                                 {X[0] + eps * y[0], X[1] + eps * y[1], X[2] + eps * y[2]},
                                 e5 * qs.weights[is] * qr.weights[ir] * r * r * qm.weights[im] * wphi});
        }
      }
    }
  }
  return cyl;
}

double cylinder_average(const FieldSeries& f, const SkewedCylinder& cyl) {
  const int nc = f.components();
  std::vector<double> buf(nc);
  double num = 0, den = 0;
  for (const auto& q : cyl.samples) {
    f.sample(q.time, q.pos, buf.data());
    double m = 0;
    for (double v : buf) m += v * v;
    num += q.weight * std::sqrt(m);
    den += q.weight;
  }
  return num / den;
}

std::vector<double> hl_radius_ladder(const GridSpec& spec) {
  std::vector<double> r{0.0};
  for (double rr = spec.h(); rr <= spec.L / 4 * (1 + 1e-12); rr *= 2) r.push_back(rr);
  return r;
}

GridField ball_average(const GridField& f, double radius) {
  require_components(f, 1, "ball_average");
  GridField a = f;
  for (double& v : a.data) v = std::abs(v);
  if (radius <= 0) return a;
  const GridSpec& spec = f.spec;
  const int n = spec.n;
  const double h = spec.h(), r2 = radius * radius * (1 + 1e-12);
  GridField k(spec, 1);
  double count = 0;
  for (int kz = 0; kz < n; ++kz)
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < n; ++kx) {
        const double dx = periodic_offset(kx, n) * h, dy = periodic_offset(ky, n) * h,
                     dz = periodic_offset(kz, n) * h;
        if (dx * dx + dy * dy + dz * dz <= r2) {
          k.data[spec.index(kx, ky, kz)] = 1;
          count += 1;
        }
      }
  for (double& v : k.data) v /= count;
  return convolve_periodic(a, k);
}

double ball_average_direct(const GridField& f, int i, int j, int k, double radius) {
  const GridSpec& spec = f.spec;
  const int n = spec.n;
  const double h = spec.h(), r2 = radius * radius * (1 + 1e-12);
  const int R = static_cast<int>(std::ceil(radius / h));
  double sum = 0, count = 0;
  for (int dz = -R; dz <= R; ++dz)
    for (int dy = -R; dy <= R; ++dy)
      for (int dx = -R; dx <= R; ++dx) {
        if ((dx * dx + dy * dy + dz * dz) * h * h > r2) continue;
        sum += std::abs(f.data[spec.index(((i + dx) % n + n) % n, ((j + dy) % n + n) % n, ((k + dz) % n + n) % n)]);
        count += 1;
      }
  return sum / count;
}

GridField hl_maximal(const GridField& f, const std::vector<double>& radii) {
  require_components(f, 1, "hl_maximal");
  GridField m(f.spec, 1, f.time);
  for (std::size_t i = 0; i < f.data.size(); ++i) m.data[i] = std::abs(f.data[i]);
  for (double r : radii) {
    if (r <= 0) continue;
    const GridField a = ball_average(f, r);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = std::max(m.data[i], a.data[i]);
  }
  return m;
}

GridField hl_maximal(const GridField& f) { return hl_maximal(f, hl_radius_ladder(f.spec)); }

double admissibility_statistic(const SkewedCylinder& cyl, const FieldSeries& M_grad_u) {
  return cyl.epsilon * cyl.epsilon * cylinder_average(M_grad_u, cyl);
}

bool admissible(const SkewedCylinder& cyl, const FieldSeries& M_grad_u, double eta0) {
  const double lo = cyl.t - 9 * cyl.epsilon * cyl.epsilon;
  if (lo < M_grad_u.t_min() - time_tol(cyl.t) || cyl.t > M_grad_u.t_max() + time_tol(cyl.t)) return false;
  return admissibility_statistic(cyl, M_grad_u) <= eta0;
}

const FieldSeries& MaximalContext::mollified(double eps) const {
  auto it = cache_.find(eps);
  if (it != cache_.end()) return it->second;
  FieldSeries s;
  s.times = velocity.times;
  for (const auto& f : velocity.fields) s.fields.push_back(mollify(f, eps, mode));
  return cache_.emplace(eps, std::move(s)).first->second;
}

FieldSeries MaximalContext::mollified_window(double eps, double t_lo, double t_hi) const {
  const auto& T = velocity.times;
  const int n = static_cast<int>(T.size());
  int a = static_cast<int>(std::upper_bound(T.begin(), T.end(), t_lo) - T.begin()) - 3;
  int b = static_cast<int>(std::lower_bound(T.begin(), T.end(), t_hi) - T.begin()) + 2;
  a = std::max(a, 0);
  b = std::min(b, n - 1);
  FieldSeries s;
  for (int i = a; i <= b; ++i) {
    s.times.push_back(T[i]);
    s.fields.push_back(mollify(velocity.fields[i], eps, mode));
  }
  return s;
}

SkewedCylinder MaximalContext::cylinder(double t, const Vec3& x, double eps) const {
  return build_cylinder(mollified(eps), t, x, eps, resolution);
}

FieldSeries maximal_gradient_series(const FieldSeries& velocity) {
  FieldSeries m;
  m.times = velocity.times;
  for (const auto& u : velocity.fields) m.fields.push_back(hl_maximal(magnitude(gradient(u))));
  return m;
}

MaximalContext make_maximal_context(const FieldSeries& velocity, const AdmissibilityThresholds& th,
                                    const CylinderResolution& res) {
  velocity.validate();
  MaximalContext ctx;
  ctx.velocity = velocity;
  ctx.M_grad_u = maximal_gradient_series(velocity);
  ctx.thresholds = th;
  ctx.resolution = res;
  return ctx;
}

FieldSeries zero_series(const GridSpec& spec, int comps, const std::vector<double>& times) {
  FieldSeries s;
  s.times = times;
  for (double t : times) s.fields.emplace_back(spec, comps, t);
  return s;
}

std::vector<double> geometric_ladder(double eps_max, int levels, double ratio) {
  if (!(eps_max > 0) || levels < 1 || !(ratio > 1)) fail(ErrorCode::InvalidArgument, "geometric_ladder");
  std::vector<double> l;
  for (int j = 0; j < levels; ++j) l.push_back(eps_max / std::pow(ratio, j));
  return l;
}

LadderCylinders ladder_cylinders(const MaximalContext& ctx, double t, const Vec3& x,
                                 const std::vector<double>& ladder) {
  LadderCylinders lc;
  for (double eps : ladder) {
    if (t - 9 * eps * eps < ctx.velocity.t_min() - time_tol(t)) continue;
    lc.cylinders.push_back(ctx.cylinder(t, x, eps));
    lc.admissible.push_back(admissible(lc.cylinders.back(), ctx.M_grad_u, ctx.thresholds.eta0));
  }
  return lc;
}

QMaximalResult q_maximal(const FieldSeries& f, const LadderCylinders& lc) {
  if (lc.cylinders.empty()) fail(ErrorCode::RangeExceeded, "q_maximal: no ladder entry fits the time range");
  QMaximalResult r;
  r.value = -1;
  for (std::size_t i = 0; i < lc.cylinders.size(); ++i) {
    if (!lc.admissible[i]) continue;
    ++r.admissible_count;
    const double a = cylinder_average(f, lc.cylinders[i]);
    if (a > r.value) {
      r.value = a;
      r.eps_argmax = lc.cylinders[i].epsilon;
    }
  }
  if (r.admissible_count == 0) {
    auto it = std::min_element(lc.cylinders.begin(), lc.cylinders.end(),
                               [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
    r.value = cylinder_average(f, *it);
    r.eps_argmax = it->epsilon;
    r.fallback = true;
  }
  return r;
}

QMaximalResult q_maximal(const FieldSeries& f, const MaximalContext& ctx, double t, const Vec3& x,
                         const std::vector<double>& ladder) {
  return q_maximal(f, ladder_cylinders(ctx, t, x, ladder));
}

double admissibility_boundary(const MaximalContext& ctx, double t, const Vec3& x, double eps_hi, int iterations) {
  const double cap = std::sqrt(std::max(0.0, t - ctx.velocity.t_min()) / 9);
  eps_hi = std::min(eps_hi, cap);
  if (!(eps_hi > 0)) fail(ErrorCode::RangeExceeded, "admissibility_boundary: no room before t_min");
  // Uncached mollification: bisection visits many distinct eps.
  auto ok = [&](double eps) {
    const FieldSeries s = ctx.mollified_window(eps, t - 9 * eps * eps, t);
    const SkewedCylinder c = build_cylinder(s, t, x, eps, ctx.resolution);
    return admissible(c, ctx.M_grad_u, ctx.thresholds.eta0);
  };
  if (ok(eps_hi)) return eps_hi;
  double hi = eps_hi, lo = eps_hi / 2;
  for (int i = 0; i < 60 && !ok(lo); ++i) {
    hi = lo;
    lo /= 2;
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::NotEnoughData, "fit_loglog_slope");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LebesgueReport lebesgue_check(const FieldSeries& f, const MaximalContext& ctx, double t, const Vec3& x,
                              const std::vector<double>& ladder) {
  if (f.components() != 1) fail(ErrorCode::ComponentMismatch, "lebesgue_check: scalar series");
  const double f0 = f.sample_scalar(t, x);
  LebesgueReport rep;
  for (double eps : ladder) {
    if (t - 9 * eps * eps < ctx.velocity.t_min() - time_tol(t)) continue;
    const SkewedCylinder c = ctx.cylinder(t, x, eps);
    double num = 0, den = 0;
    for (const auto& q : c.samples) {
      num += q.weight * std::abs(f.sample_scalar(q.time, q.pos) - f0);
      den += q.weight;
    }
    rep.eps.push_back(eps);
    rep.deviation.push_back(num / den);
  }
  bool positive = rep.eps.size() >= 2;
  for (double d : rep.deviation) positive = positive && d > 0;
  rep.slope = positive ? fit_loglog_slope(rep.eps, rep.deviation) : 0.0;
  return rep;
}

WeakTypeReport weak_type_constant(const FieldSeries& f, const MaximalContext& ctx, const std::vector<double>& times,
                                  int stride, const std::vector<double>& ladder) {
  if (stride < 1 || times.empty()) fail(ErrorCode::InvalidArgument, "weak_type_constant");
  const GridSpec& spec = f.fields.front().spec;
  const double cell = std::pow(stride * spec.h(), 3);
  WeakTypeReport rep;
  std::vector<double> values;
  for (double t : times) {
    GridField slice(spec, 1);
    int ti[4];
    double tw[4];
    const int m = time_stencil(f.times, t, ti, tw);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double v = 0;
      for (int a = 0; a < m; ++a) v += tw[a] * f.fields[ti[a]].data[i];
      slice.data[i] = std::abs(v);
    }
    rep.l1 += integral(slice);
    for (int k = 0; k < spec.n; k += stride)
      for (int j = 0; j < spec.n; j += stride)
        for (int i = 0; i < spec.n; i += stride) values.push_back(q_maximal(f, ctx, t, spec.point(i, j, k), ladder).value);
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rep.alphas.push_back(values[i]);
    rep.measures.push_back(cell * double(i + 1));
    rep.constant = std::max(rep.constant, values[i] * cell * double(i + 1) / rep.l1);
  }
  return rep;
}

}  // namespace vortlab
