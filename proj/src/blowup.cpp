#include "vortlab/blowup.hpp"

#include <algorithm>
#include <cmath>

#include "vortlab/error.hpp"
#include "vortlab/spectral.hpp"

namespace vortlab {

namespace {

Vec3 lagrange4(const std::vector<double>& T, const std::vector<Vec3>& f, double t) {
  const int n = static_cast<int>(T.size());
  const double ds = T[1] - T[0];
  const int m = std::min(n, 4);
  const int i = static_cast<int>(std::floor((t - T[0]) / ds));
  const int lo = std::clamp(i - 1, 0, n - m);
  Vec3 r{0, 0, 0};
  for (int a = 0; a < m; ++a) {
    double l = 1;
    for (int b = 0; b < m; ++b)
      if (b != a) l *= (t - T[lo + b]) / (T[lo + a] - T[lo + b]);
    for (int c = 0; c < 3; ++c) r[c] += l * f[lo + a][c];
  }
  return r;
}

bool uniform_times(const std::vector<double>& t) {
  if (t.size() < 2) return false;
  const double d = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - d) > 1e-6 * d) return false;
  return true;
}

// Trapezoid weights for the slices with times in [lo, hi].
std::vector<std::pair<std::size_t, double>> slice_weights(const std::vector<double>& T, double lo, double hi) {
  const double tol = 1e-9 * std::max(1.0, std::abs(hi - lo));
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < T.size(); ++i)
    if (T[i] >= lo - tol && T[i] <= hi + tol) in.push_back(i);
  if (in.size() < 2) fail(ErrorCode::RangeExceeded, "slice window holds fewer than two slices");
  const double d = T[in[1]] - T[in[0]];
  if (T[in.front()] - lo > 0.5 * d || hi - T[in.back()] > 0.5 * d)
    fail(ErrorCode::RangeExceeded, "slices do not cover the requested time window");
  std::vector<std::pair<std::size_t, double>> w;
  for (std::size_t a = 0; a < in.size(); ++a) {
    double wt = 0;
    if (a > 0) wt += 0.5 * (T[in[a]] - T[in[a - 1]]);
    if (a + 1 < in.size()) wt += 0.5 * (T[in[a + 1]] - T[in[a]]);
    w.emplace_back(in[a], wt);
  }
  return w;
}

GridField central_dt(const FieldSeries& s, std::size_t j) {
  const double d = s.times[1] - s.times[0];
  GridField r = (1.0 / (12 * d)) * (s.fields[j - 2] - 8.0 * s.fields[j - 1] + 8.0 * s.fields[j + 1] - s.fields[j + 2]);
  r.time = s.times[j];
  return r;
}

// Averages of M^p and M^2 over a cylinder, interpolating M first.
std::pair<double, double> power_averages(const FieldSeries& M, const SkewedCylinder& cyl, double p) {
  double ap = 0, a2 = 0, den = 0;
  for (const auto& q : cyl.samples) {
    const double m = std::abs(M.sample_scalar(q.time, q.pos));
    ap += q.weight * std::pow(m, p);
    a2 += q.weight * m * m;
    den += q.weight;
  }
  return {ap / den, a2 / den};
}

double functional_value(const PivotConfig& cfg, double eps, double avg_p, double avg_2) {
  const double nu = cfg.nu_value();
  return std::pow(eps, 4) * (std::pow(cfg.delta, -2 * nu) * std::pow(avg_p, 2 / cfg.p) + cfg.delta * avg_2);
}

}  // namespace

Vec3 RescaleFrame::position(double t) const {
  const int n = static_cast<int>(times.size());
  const double ds = times[1] - times[0];
  const int j = std::clamp(static_cast<int>(std::floor((t - times[0]) / ds)), 0, n - 2);
  const double tau = (t - times[j]) / ds;
  const double h00 = 2 * tau * tau * tau - 3 * tau * tau + 1, h10 = tau * tau * tau - 2 * tau * tau + tau,
               h01 = -2 * tau * tau * tau + 3 * tau * tau, h11 = tau * tau * tau - tau * tau;
  Vec3 r;
  for (int a = 0; a < 3; ++a)
    r[a] = h00 * X[j][a] + h10 * ds * u_eps[j][a] + h01 * X[j + 1][a] + h11 * ds * u_eps[j + 1][a];
  return r;
}

Vec3 RescaleFrame::velocity(double t) const {
  const int n = static_cast<int>(times.size());
  const double ds = times[1] - times[0];
  const int j = std::clamp(static_cast<int>(std::floor((t - times[0]) / ds)), 0, n - 2);
  const double tau = (t - times[j]) / ds;
  const double d00 = 6 * tau * tau - 6 * tau, d10 = 3 * tau * tau - 4 * tau + 1, d01 = -6 * tau * tau + 6 * tau,
               d11 = 3 * tau * tau - 2 * tau;
  Vec3 r;
  for (int a = 0; a < 3; ++a)
    r[a] = (d00 * X[j][a] + d01 * X[j + 1][a]) / ds + d10 * u_eps[j][a] + d11 * u_eps[j + 1][a];
  return r;
}

Vec3 RescaleFrame::acceleration(double t) const { return lagrange4(times, differentiate_uniform(Xdot, times[1] - times[0]), t); }

std::vector<Vec3> differentiate_uniform(const std::vector<Vec3>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 5) fail(ErrorCode::NotEnoughData, "differentiate_uniform: need >= 5 samples");
  std::vector<Vec3> d(n);
  for (int c = 0; c < 3; ++c) {
    auto F = [&](int i) { return f[i][c]; };
    d[0][c] = (-25 * F(0) + 48 * F(1) - 36 * F(2) + 16 * F(3) - 3 * F(4)) / (12 * h);
    d[1][c] = (-3 * F(0) - 10 * F(1) + 18 * F(2) - 6 * F(3) + F(4)) / (12 * h);
    for (int i = 2; i < n - 2; ++i) d[i][c] = (F(i - 2) - 8 * F(i - 1) + 8 * F(i + 1) - F(i + 2)) / (12 * h);
    d[n - 2][c] = (3 * F(n - 1) + 10 * F(n - 2) - 18 * F(n - 3) + 6 * F(n - 4) - F(n - 5)) / (12 * h);
    d[n - 1][c] = (25 * F(n - 1) - 48 * F(n - 2) + 36 * F(n - 3) - 16 * F(n - 4) + 3 * F(n - 5)) / (12 * h);
  }
  return d;
}

namespace {

void frame_nodes(RescaleFrame& f, double t0, double t_lo, double t_hi, int steps, double& ds, int& nb, int& nf) {
  if (!(t_lo <= t0 && t0 <= t_hi && t_hi > t_lo)) fail(ErrorCode::InvalidArgument, "frame: need t_lo <= t0 <= t_hi");
  if (steps < 4) fail(ErrorCode::InvalidArgument, "frame: steps >= 4");
  const double span = t_hi - t_lo;
  nb = static_cast<int>(std::lround(steps * (t0 - t_lo) / span));
  if (t0 > t_lo) nb = std::max(nb, 1);
  ds = nb > 0 ? (t0 - t_lo) / nb : span / steps;
  nf = static_cast<int>(std::floor((t_hi - t0) / ds + 1e-9));
  f.times.clear();
  for (int j = -nb; j <= nf; ++j) f.times.push_back(t0 + j * ds);
  if (f.times.size() < 5) fail(ErrorCode::NotEnoughData, "frame: fewer than five nodes");
}

}  // namespace

RescaleFrame make_frame(const MaximalContext& ctx, double t0, const Vec3& x0, double eps, double t_lo, double t_hi,
                        int steps) {
  RescaleFrame f;
  f.t0 = t0;
  f.x0 = x0;
  f.epsilon = eps;
  double ds;
  int nb, nf;
  frame_nodes(f, t0, t_lo, t_hi, steps, ds, nb, nf);
  const FieldSeries u = ctx.mollified_window(eps, t_lo, t_hi);
  std::vector<Vec3> vb, vf;
  std::vector<Vec3> xb = nb > 0 ? integrate_path(u, t0, x0, t0 - nb * ds, nb, &vb) : std::vector<Vec3>{x0};
  std::vector<Vec3> xf = nf > 0 ? integrate_path(u, t0, x0, t0 + nf * ds, nf, &vf) : std::vector<Vec3>{x0};
  if (nb == 0) u.sample(t0, x0, vb.emplace_back().data());
  if (nf == 0) u.sample(t0, x0, vf.emplace_back().data());
  for (int j = nb; j >= 1; --j) {
    f.X.push_back(xb[j]);
    f.u_eps.push_back(vb[j]);
  }
  for (int j = 0; j <= nf; ++j) {
    f.X.push_back(xf[j]);
    f.u_eps.push_back(vf[j]);
  }
  f.Xdot = differentiate_uniform(f.X, ds);
  return f;
}

RescaleFrame straight_frame(double t0, const Vec3& x0, const Vec3& c, double eps, double t_lo, double t_hi, int steps) {
  RescaleFrame f;
  f.t0 = t0;
  f.x0 = x0;
  f.epsilon = eps;
  double ds;
  int nb, nf;
  frame_nodes(f, t0, t_lo, t_hi, steps, ds, nb, nf);
  for (double t : f.times) {
    f.X.push_back({x0[0] + c[0] * (t - t0), x0[1] + c[1] * (t - t0), x0[2] + c[2] * (t - t0)});
    f.u_eps.push_back(c);
  }
  f.Xdot = differentiate_uniform(f.X, ds);
  return f;
}

GridField spectral_shift(const GridField& u, const Vec3& d) {
  SpectralField s = transform(u);
  for_each_mode(u.spec, [&](const Mode& md) {
    const double ph = md.keff[0] * d[0] + md.keff[1] * d[1] + md.keff[2] * d[2];
    const cplx e(std::cos(ph), std::sin(ph));
    for (int c = 0; c < s.components; ++c) s.comp(c)[md.idx] *= e;
  });
  return inverse_transform(s, u.time);
}

FieldSeries rescale(const FieldSeries& velocity, const RescaleFrame& frame) {
  velocity.validate();
  if (velocity.components() != 3) fail(ErrorCode::ComponentMismatch, "rescale: velocity needs 3 components");
  const double eps = frame.epsilon;
  const GridSpec& spec = velocity.fields.front().spec;
  GridSpec target;
  target.n = spec.n;
  target.L = spec.L / eps;
  target.origin = {-0.5 * target.L, -0.5 * target.L, -0.5 * target.L};
  if (0.5 * target.L < 3) fail(ErrorCode::RangeExceeded, "rescale: box of side L/eps does not contain B_3");
  const double ds = frame.times[1] - frame.times[0];
  const double lo = frame.times.front() - 1e-9, hi = frame.times.back() + ds;
  FieldSeries out;
  for (std::size_t i = 0; i < velocity.times.size(); ++i) {
    const double t = velocity.times[i];
    if (t < lo || t > hi) continue;
    const Vec3 X = frame.position(t);
    const Vec3 V = frame.velocity(t);
    Vec3 d;
    for (int a = 0; a < 3; ++a) d[a] = X[a] + eps * target.origin[a] - spec.origin[a];
    GridField sh = spectral_shift(velocity.fields[i], d);
    GridField r(target, 3, (t - frame.t0) / (eps * eps));
    for (int c = 0; c < 3; ++c) {
      const double* src = sh.comp(c);
      double* dst = r.comp(c);
      for (std::size_t k = 0; k < spec.size(); ++k) dst[k] = eps * (src[k] - V[c]);
    }
    out.times.push_back(r.time);
    out.fields.push_back(std::move(r));
  }
  if (out.fields.empty()) fail(ErrorCode::RangeExceeded, "rescale: no snapshot inside the frame");
  return out;
}

GridField ns_residual_field(const GridField& u, const GridField& dt_u, double viscosity) {
  const GridField nl = project_curl(cross(curl(u), u));
  return project_curl(dt_u + nl - viscosity * laplacian(u));
}

NsResidual ns_residual(const FieldSeries& series, double viscosity, const Vec3& center, double radius, double t_lo,
                       double t_hi) {
  series.validate();
  if (series.fields.size() < 5) fail(ErrorCode::NotEnoughData, "ns_residual: need >= 5 slices");
  if (!uniform_times(series.times)) fail(ErrorCode::InvalidArgument, "ns_residual: slices must be uniform");
  const double d = series.times[1] - series.times[0];
  const double tol = 1e-9 * std::max(1.0, std::abs(t_hi));
  double r2 = 0, a2 = 0, b2 = 0, c2 = 0;
  NsResidual out;
  for (std::size_t j = 2; j + 2 < series.fields.size(); ++j) {
    const double t = series.times[j];
    if (t < t_lo - tol || t > t_hi + tol) continue;
    const GridField& u = series.fields[j];
    const GridField a = project_curl(central_dt(series, j));
    const GridField b = project_curl(cross(curl(u), u));
    const GridField c = viscosity * laplacian(u);
    const GridField r = project_curl(a + b - c);
    auto sq = [&](const GridField& f) {
      const double v = l2_norm_ball(f, radius, center);
      return v * v * d;
    };
    r2 += sq(r);
    a2 += sq(a);
    b2 += sq(b);
    c2 += sq(c);
    ++out.slices;
  }
  if (out.slices == 0) fail(ErrorCode::NotEnoughData, "ns_residual: no interior slice inside the window");
  out.residual = std::sqrt(r2);
  out.scale = std::sqrt(a2) + std::sqrt(b2) + std::sqrt(c2);
  out.relative = out.scale > 0 ? out.residual / out.scale : 0.0;
  return out;
}

GalileanReport galilean_check(const FieldSeries& series, const Vec3& c, double viscosity) {
  series.validate();
  if (series.fields.size() < 5 || !uniform_times(series.times))
    fail(ErrorCode::NotEnoughData, "galilean_check: need >= 5 uniform slices");
  const double t_ref = series.times.front();
  double diff2 = 0, r2 = 0, rb2 = 0;
  Vec3 scale{0, 0, 0}, scale_bar{0, 0, 0};
  auto terms = [&](const GridField& u, const GridField& dtu, Vec3& acc) {
    const GridField a = project_curl(dtu);
    const GridField b = project_curl(cross(curl(u), u));
    const GridField l = viscosity * laplacian(u);
    const double na = l2_norm(a), nb = l2_norm(b), nl = l2_norm(l);
    acc[0] += na * na;
    acc[1] += nb * nb;
    acc[2] += nl * nl;
    return project_curl(a + b - l);
  };
  for (std::size_t j = 2; j + 2 < series.fields.size(); ++j) {
    const GridField& u = series.fields[j];
    const GridField dtu = central_dt(series, j);
    const GridField R = terms(u, dtu, scale);
    const double tau = series.times[j] - t_ref;
    const Vec3 shift{-c[0] * tau, -c[1] * tau, -c[2] * tau};
    const GridField su = spectral_shift(u, shift);
    GridField ubar = su;
    for (int a = 0; a < 3; ++a)
      for (double* p = ubar.comp(a); p != ubar.comp(a) + u.spec.size(); ++p) *p += c[a];
    const GridField g = gradient(su);
    GridField dt_bar = spectral_shift(dtu, shift);
    for (int i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < u.spec.size(); ++k)
        dt_bar.at(i, k) -= c[0] * g.at(3 * i, k) + c[1] * g.at(3 * i + 1, k) + c[2] * g.at(3 * i + 2, k);
    const GridField Rbar = terms(ubar, dt_bar, scale_bar);
    const double dn = l2_norm(Rbar - spectral_shift(R, shift)), rn = l2_norm(R), rbn = l2_norm(Rbar);
    diff2 += dn * dn;
    r2 += rn * rn;
    rb2 += rbn * rbn;
  }
  auto total = [](const Vec3& s) { return std::sqrt(s[0]) + std::sqrt(s[1]) + std::sqrt(s[2]); };
  GalileanReport rep;
  const double sc = total(scale), sb = total(scale_bar);
  if (sc > 0) {
    rep.relative_before = std::sqrt(r2) / sc;
    rep.residual_change = std::sqrt(diff2) / sc;
  }
  if (sb > 0) rep.relative_after = std::sqrt(rb2) / sb;
  return rep;
}

GridField sampled_mollifier(const GridSpec& spec) {
  GridField phi = radial_field(spec, [](double r) { return mollifier_kernel(r); });
  const double m = integral(phi);
  if (!(m > 0)) fail(ErrorCode::UnderResolved, "sampled_mollifier: grid misses the unit ball");
  return (1.0 / m) * phi;
}

double mean_zero_residual(const FieldSeries& series, const GridField& phi) {
  require_components(phi, 1, "mean_zero_residual");
  double best = 0;
  for (const auto& u : series.fields) {
    require_same_layout(component(u, 0), phi, "mean_zero_residual");
    double m2 = 0;
    for (int c = 0; c < u.components; ++c) {
      const double v = inner(component(u, c), phi);
      m2 += v * v;
    }
    best = std::max(best, std::sqrt(m2));
  }
  return best;
}

void PivotConfig::validate() const {
  if (!(p > 11.0 / 6.0 && p < 2.0)) fail(ErrorCode::InvalidArgument, "PivotConfig: need 11/6 < p < 2");
  const double v = nu_value();
  if (!(v > nu_lower() && v <= nu_upper() * (1 + 1e-12)))
    fail(ErrorCode::InvalidArgument, "PivotConfig: nu outside ((2-p)/(p-1), (7p-12)/(6-p)]");
  if (!(delta > 0) || !(eta > 0)) fail(ErrorCode::InvalidArgument, "PivotConfig: delta, eta must be positive");
}

PivotQuantities pivot_quantities(const FieldSeries& series, const PivotConfig& cfg) {
  cfg.validate();
  const double nu = cfg.nu_value();
  PivotQuantities q;
  double ip = 0, i2 = 0;
  for (const auto& [j, w] : slice_weights(series.times, -9.0, 0.0)) {
    const GridField g = magnitude(gradient(series.fields[j]));
    ip += w * power_integral_ball(g, cfg.p, 3.0);
    i2 += w * power_integral_ball(g, 2.0, 3.0);
  }
  q.lp_term = std::pow(cfg.delta, -nu) * std::pow(ip, 1 / cfg.p);
  q.l2_term = cfg.delta * i2;
  for (const auto& [j, w] : slice_weights(series.times, -4.0, 0.0)) {
    (void)w;
    q.linf_l1 = std::max(q.linf_l1, power_integral_ball(curl(series.fields[j]), 1.0, 2.0));
  }
  q.linf_l1 *= cfg.delta;
  return q;
}

InterpolationBound vorticity_interpolation(const FieldSeries& series, const PivotConfig& cfg) {
  cfg.validate();
  const double th = cfg.theta(), p2 = cfg.p2(), q2 = cfg.q2();
  double mixed = 0, lp = 0, linf = 0;
  for (const auto& [j, w] : slice_weights(series.times, -4.0, 0.0)) {
    const GridField om = curl(series.fields[j]);
    mixed += w * std::pow(power_integral_ball(om, q2, 2.0), p2 / q2);
    lp += w * power_integral_ball(om, cfg.p, 2.0);
    linf = std::max(linf, power_integral_ball(om, 1.0, 2.0));
  }
  return {std::pow(mixed, 1 / p2), std::pow(std::pow(lp, 1 / cfg.p), th) * std::pow(linf, 1 - th)};
}

double selection_functional(const MaximalContext& ctx, double t, const Vec3& x, double eps, const PivotConfig& cfg,
                            SkewedCylinder* cyl) {
  const FieldSeries u = ctx.mollified_window(eps, t - 9 * eps * eps, t);
  SkewedCylinder c = build_cylinder(u, t, x, eps, ctx.resolution);
  const auto [ap, a2] = power_averages(ctx.M_grad_u, c, cfg.p);
  if (cyl) *cyl = std::move(c);
  return functional_value(cfg, eps, ap, a2);
}

SelectionResult epsilon_selection(const MaximalContext& ctx, double t, const Vec3& x, const PivotConfig& cfg,
                                  int ladder_levels, double ladder_ratio, int bisection_iterations) {
  cfg.validate();
  const double age = t - ctx.velocity.t_min();
  if (!(age > 0)) fail(ErrorCode::RangeExceeded, "epsilon_selection: t must exceed the series start");
  const double cap = std::sqrt(age) / 3;
  std::vector<double> ladder = geometric_ladder(cap, ladder_levels, ladder_ratio);
  std::reverse(ladder.begin(), ladder.end());

  SelectionResult r;
  r.t = t;
  r.x = x;
  double lo = 0, hi = 0;
  bool crossed = false;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (selection_functional(ctx, t, x, ladder[i], cfg) >= cfg.eta) {
      hi = ladder[i];
      lo = i > 0 ? ladder[i - 1] : 0;
      crossed = true;
      break;
    }
  }
  if (crossed && lo == 0) {
    lo = hi;
    for (int k = 0; k < 60 && selection_functional(ctx, t, x, lo, cfg) >= cfg.eta; ++k) {
      hi = lo;
      lo /= 2;
    }
  }
  if (crossed) {
    for (int k = 0; k < bisection_iterations; ++k) {
      const double mid = 0.5 * (lo + hi);
      (selection_functional(ctx, t, x, mid, cfg) >= cfg.eta ? hi : lo) = mid;
    }
    r.eps_star = hi;
    r.case_tag = 1;
  } else {
    r.eps_star = cap;
    r.case_tag = 2;
  }
  SkewedCylinder star;
  r.I_value = selection_functional(ctx, t, x, r.eps_star, cfg, &star);

  // M_Q over the ladder and the selected scale.
  std::vector<SkewedCylinder> cyls;
  for (double e : ladder) {
    const FieldSeries u = ctx.mollified_window(e, t - 9 * e * e, t);
    cyls.push_back(build_cylinder(u, t, x, e, ctx.resolution));
  }
  cyls.push_back(std::move(star));
  for (std::size_t i = 0; i < cyls.size(); ++i) {
    const bool adm = admissible(cyls[i], ctx.M_grad_u, ctx.thresholds.eta0);
    if (i + 1 == cyls.size()) r.admissible_at_star = adm;
    if (!adm) continue;
    const auto [ap, a2] = power_averages(ctx.M_grad_u, cyls[i], cfg.p);
    r.mq_p = std::max(r.mq_p, ap);
    r.mq_2 = std::max(r.mq_2, a2);
  }
  const double nu = cfg.nu_value();
  r.bound_lhs = std::pow(r.eps_star, -4);
  const double first = (std::pow(cfg.delta, -2 * nu) * std::pow(r.mq_p, 2 / cfg.p) + cfg.delta * r.mq_2) / cfg.eta;
  r.bound_rhs = std::max(first, 81 / (age * age));
  r.violated = r.bound_lhs > r.bound_rhs * (1 + 1e-12);
  return r;
}

}  // namespace vortlab
