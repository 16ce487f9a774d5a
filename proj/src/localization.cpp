#include "vortlab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vortlab/error.hpp"
#include "vortlab/spectral.hpp"

namespace vortlab {

double smooth_step(double s, double sharpness) {
  if (s <= 0) return 0.0;
  if (s >= 1) return 1.0;
  const double a = std::exp(-sharpness / s), b = std::exp(-sharpness / (1.0 - s));
  return a / (a + b);
}

double radial_bump(double r, double inner, double outer, double sharpness) {
  return smooth_step((outer - r) / (outer - inner), sharpness);
}

CutoffPair make_cutoff_pair(const GridSpec& spec, const std::array<double, 4>& radii, double sharpness) {
  spec.validate();
  for (int i = 0; i < 3; ++i)
    if (!(radii[i] < radii[i + 1])) fail(ErrorCode::InvalidArgument, "cut-off radii must be strictly increasing");
  if (!(radii[0] > 0)) fail(ErrorCode::InvalidArgument, "cut-off radii must be positive");
  if (!(sharpness > 0)) fail(ErrorCode::InvalidArgument, "sharpness must be positive");
  double room = INFINITY;
  for (int a = 0; a < 3; ++a) room = std::min({room, -spec.origin[a], spec.origin[a] + spec.L});
  if (!(radii[3] < room))
    fail(ErrorCode::InvalidArgument, "cut-off support B_" + std::to_string(radii[3]) + " reaches the periodic boundary");
  CutoffPair c;
  c.radii = radii;
  c.sharpness = sharpness;
  c.phi = radial_field(spec, [&](double r) { return radial_bump(r, radii[0], radii[1], sharpness); });
  c.phi_sharp = radial_field(spec, [&](double r) { return radial_bump(r, radii[2], radii[3], sharpness); });
  return c;
}

double max_gradient(const GridField& f) {
  require_components(f, 1, "max_gradient");
  return max_norm(gradient(f));
}

namespace {

struct Ops {
  bool dealias;
  GridField mul(const GridField& s, const GridField& f) const { return product(s, f, dealias); }
  GridField crs(const GridField& a, const GridField& b) const { return cross(a, b, dealias); }
  GridField one_minus(const GridField& s) const {
    GridField o = s;
    for (double& x : o.data) x = 1.0 - x;
    return o;
  }
  // [a, Lap] g = a Lap g - Lap(a g)
  GridField comm_lap(const GridField& a, const GridField& g) const {
    return mul(a, laplacian(g)) - laplacian(mul(a, g));
  }
  // [a, curl] F = a curl F - curl(a F)
  GridField comm_curl(const GridField& a, const GridField& F) const { return mul(a, curl(F)) - curl(mul(a, F)); }
};

GridField remove_mean(GridField f) {
  const std::size_t m = f.spec.size();
  for (int c = 0; c < f.components; ++c) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += f.at(c, i);
    s /= double(m);
    for (std::size_t i = 0; i < m; ++i) f.at(c, i) -= s;
  }
  return f;
}

double rel_diff(const GridField& a, const GridField& b) {
  const double scale = std::max({l2_norm(a), l2_norm(b), 1e-300});
  return l2_norm(a - b) / scale;
}

}  // namespace

GridField localize(const GridField& u, const CutoffPair& cut, const LocalizationOptions& opt) {
  require_components(u, 3, "localize");
  const Ops op{opt.dealias_products};
  const GridField omega = curl(u);
  return -1.0 * curl(op.mul(cut.phi_sharp, inv_lap(op.mul(cut.phi, omega))));
}

LocalizedTriple localized_velocity(const GridField& u, const CutoffPair& cut, const LocalizationOptions& opt) {
  require_components(u, 3, "localized_velocity");
  const Ops op{opt.dealias_products};
  const GridField omega = curl(u);
  LocalizedTriple t;
  t.v = -1.0 * curl(op.mul(cut.phi_sharp, inv_lap(op.mul(cut.phi, omega))));
  t.w = op.mul(cut.phi, u) - t.v;
  t.varpi = op.mul(cut.phi, omega) - curl(t.v);
  t.v.time = t.w.time = t.varpi.time = u.time;
  return t;
}

double harmonicity_residual(const GridField& field, double region_radius, const GridField& omega) {
  if (!(region_radius < 1.0)) fail(ErrorCode::InvalidArgument, "harmonicity region radius must be < 1");
  const GridField lap = laplacian(field);
  double worst = 0;
  for (int c = 0; c < field.components; ++c) worst = std::max(worst, max_norm_ball(component(lap, c), region_radius));
  const GridField mag = magnitude(omega);
  double l1 = 0;
  const GridSpec& s = omega.spec;
  for (int k = 0; k < s.n; ++k)
    for (int j = 0; j < s.n; ++j)
      for (int i = 0; i < s.n; ++i) {
        const Vec3 x = s.point(i, j, k);
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < 4.0) l1 += mag.data[s.index(i, j, k)];
      }
  l1 *= s.cell_volume();
  return l1 > 0 ? worst / l1 : worst;
}

CommutatorResult commutator(CommutatorKind kind, const GridField& phi, const GridField& u,
                            const LocalizationOptions& opt) {
  require_components(phi, 1, "commutator phi");
  if (!(phi.spec == u.spec)) fail(ErrorCode::DimensionMismatch, "commutator: grid mismatch");
  const Ops op{opt.dealias_products};
  CommutatorResult r;
  const GridField gphi = gradient(phi);
  const GridField lphi = laplacian(phi);
  switch (kind) {
    case CommutatorKind::cm1: {
      require_components(u, 3, "cm1");
      r.direct = op.comm_curl(phi, u);
      r.closed_form = -1.0 * op.crs(gphi, u);
      break;
    }
    case CommutatorKind::cm2: {
      r.direct = op.comm_lap(phi, u);
      // -2 grad phi . grad u - (Lap phi) u
      const GridField gu = gradient(u);
      GridField dots(u.spec, u.components);
      GridField divs(u.spec, u.components);
      for (int c = 0; c < u.components; ++c) {
        GridField acc(u.spec, 1);
        GridField flux(u.spec, 3);
        const GridField uc = component(u, c);
        for (int j = 0; j < 3; ++j) {
          const GridField gj = component(gphi, j);
          acc = acc + op.mul(gj, component(gu, 3 * c + j));
          const GridField prod = op.mul(gj, uc);
          std::copy(prod.data.begin(), prod.data.end(), flux.comp(j));
        }
        const GridField dv = divergence(flux);
        std::copy(acc.data.begin(), acc.data.end(), dots.comp(c));
        std::copy(dv.data.begin(), dv.data.end(), divs.comp(c));
      }
      const GridField lu = op.mul(lphi, u);
      r.closed_form = -2.0 * dots - lu;
      r.alternate = -2.0 * divs + lu;
      r.alternate_residual = rel_diff(r.closed_form, r.alternate);
      break;
    }
    case CommutatorKind::cm3: {
      r.direct = remove_mean(op.mul(phi, inv_lap(u)) - inv_lap(op.mul(phi, u)));
      const GridField iu = inv_lap(u);
      const GridField giu = gradient(iu);
      GridField inner(u.spec, u.components);
      for (int c = 0; c < u.components; ++c) {
        GridField acc(u.spec, 1);
        for (int j = 0; j < 3; ++j) acc = acc + op.mul(component(gphi, j), component(giu, 3 * c + j));
        std::copy(acc.data.begin(), acc.data.end(), inner.comp(c));
      }
      inner = 2.0 * inner + op.mul(lphi, iu);
      r.closed_form = remove_mean(inv_lap(inner));
      break;
    }
    case CommutatorKind::cm4: {
      require_components(u, 3, "cm4");
      r.direct = op.mul(phi, project_curl(u)) - project_curl(op.mul(phi, u));
      const GridField iu = inv_lap(u);
      const GridField giu = gradient(iu);
      const GridField hphi = gradient(gphi);  // d_j d_i phi at 3*i + j
      GridField t1 = op.crs(gphi, curl(iu));
      GridField t2 = op.mul(divergence(iu), gphi);
      GridField t3 = op.mul(lphi, iu);
      GridField t4(u.spec, 3), t5(u.spec, 3), inner(u.spec, 3);
      for (int i = 0; i < 3; ++i) {
        GridField a4(u.spec, 1), a5(u.spec, 1), ai(u.spec, 1);
        for (int j = 0; j < 3; ++j) {
          a4 = a4 + op.mul(component(iu, j), component(hphi, 3 * i + j));
          const GridField gj = component(gphi, j);
          const GridField prod = op.mul(gj, component(giu, 3 * i + j));
          a5 = a5 + prod;
        }
        ai = 2.0 * a5;
        std::copy(a4.data.begin(), a4.data.end(), t4.comp(i));
        std::copy(a5.data.begin(), a5.data.end(), t5.comp(i));
        std::copy(ai.data.begin(), ai.data.end(), inner.comp(i));
      }
      inner = inner + t3;
      r.closed_form = t1 + t2 - t3 + t4 - t5 + project_curl(inner);
      break;
    }
  }
  r.residual = rel_diff(r.direct, r.closed_form);
  return r;
}

SourceTerms source_terms(const GridField& u, const CutoffPair& cut, const LocalizationOptions& opt) {
  require_components(u, 3, "source_terms");
  const Ops op{opt.dealias_products};
  const GridField omega = curl(u);
  const GridField F = op.crs(omega, u);
  const GridField& phi = cut.phi;
  const GridField& phs = cut.phi_sharp;
  SourceTerms s;

  // B = -curl (1 - phi#) Lap^{-1} phi curl F + curl Lap^{-1} [phi, curl] F
  s.B = -1.0 * curl(op.mul(op.one_minus(phs), inv_lap(op.mul(phi, curl(F))))) + curl(inv_lap(op.comm_curl(phi, F)));

  // L = -curl [phi#, Lap] Lap^{-1} phi omega - curl phi# Lap^{-1} [phi, Lap] omega
  const GridField g = inv_lap(op.mul(phi, omega));
  s.L = -1.0 * curl(op.comm_lap(phs, g)) - curl(op.mul(phs, inv_lap(op.comm_lap(phi, omega))));

  // W = -omega x w + 1/2 P_grad(varpi x u + omega x w), P_grad = Id - P_curl
  const LocalizedTriple t = localized_velocity(u, cut, opt);
  const GridField ow = op.crs(omega, t.w);
  const GridField inner = op.crs(t.varpi, u) + ow;
  s.W = -1.0 * ow + 0.5 * (inner - project_curl(inner));
  s.B.time = s.L.time = s.W.time = u.time;
  return s;
}

VEquationTerms v_equation_terms(const GridField& u, const GridField& dt_v, const CutoffPair& cut,
                                const LocalizationOptions& opt) {
  const Ops op{opt.dealias_products};
  VEquationTerms t;
  const GridField omega = curl(u);
  const GridField v = localize(u, cut, opt);
  t.dt_v = dt_v;
  t.omega_cross_v = op.crs(omega, v);
  t.grad_R = gradient(riesz_R(outer(u, v, opt.dealias_products)));
  t.lap_v = laplacian(v);
  t.src = source_terms(u, cut, opt);
  t.residual = t.dt_v + t.omega_cross_v + t.grad_R - t.src.B - t.src.L - t.src.W - t.lap_v;
  return t;
}

VEquationReport v_equation_residual(const std::vector<Snapshot>& snapshots, const CutoffPair& cut,
                                    const LocalizationOptions& opt, double region_radius) {
  const std::size_t n = snapshots.size();
  if (n < 5) fail(ErrorCode::NotEnoughData, "v equation residual needs at least 5 snapshots");
  const double h = snapshots[1].time - snapshots[0].time;
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs((snapshots[j].time - snapshots[j - 1].time) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      fail(ErrorCode::InvalidArgument, "v equation residual needs uniformly spaced snapshots");
  std::vector<GridField> v;
  v.reserve(n);
  for (const Snapshot& s : snapshots) v.push_back(localize(s.velocity, cut, opt));

  VEquationReport rep;
  double r2 = 0, d2 = 0;
  for (std::size_t j = 2; j + 2 < n; ++j) {
    GridField dtv = (1.0 / (12.0 * h)) * (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]);
    const VEquationTerms t = v_equation_terms(snapshots[j].velocity, dtv, cut, opt);
    const double a = l2_norm_ball(t.residual, region_radius), b = l2_norm_ball(dtv, region_radius);
    r2 += a * a;
    d2 += b * b;
    rep.times.push_back(snapshots[j].time);
  }
  rep.residual_l2 = std::sqrt(r2 * h);
  rep.dt_v_l2 = std::sqrt(d2 * h);
  rep.relative = rep.dt_v_l2 > 0 ? rep.residual_l2 / rep.dt_v_l2 : rep.residual_l2;
  return rep;
}

double v_local_energy_residual(const std::vector<Snapshot>& snapshots, const CutoffPair& cut,
                               const TestFunction& psi, const LocalizationOptions& opt) {
  if (snapshots.size() < 3) fail(ErrorCode::NotEnoughData, "local energy residual needs at least 3 snapshots");
  const GridField& phi = psi.space;
  const GridField gphi = gradient(phi);
  const GridField lphi = laplacian(phi);
  const std::size_t m = phi.spec.size();
  const double dv = phi.spec.cell_volume();
  std::vector<double> vals;
  for (const Snapshot& s : snapshots) {
    const double chi = psi.chi(s.time), chid = psi.chi_dot(s.time);
    if (chi == 0.0 && chid == 0.0) {
      vals.push_back(0.0);
      continue;
    }
    const GridField& u = s.velocity;
    const GridField v = localize(u, cut, opt);
    const GridField R = riesz_R(outer(u, v, opt.dealias_products));
    const GridField gv = gradient(v);
    const SourceTerms src = source_terms(u, cut, opt);
    const GridField force = src.B + src.L + src.W;
    double acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3 vv = v.vec(i), f = force.vec(i);
      const double e = 0.5 * (vv[0] * vv[0] + vv[1] * vv[1] + vv[2] * vv[2]);
      double g2 = 0;
      for (int c = 0; c < 9; ++c) g2 += gv.at(c, i) * gv.at(c, i);
      const double vdg = vv[0] * gphi.at(0, i) + vv[1] * gphi.at(1, i) + vv[2] * gphi.at(2, i);
      const double vf = vv[0] * f[0] + vv[1] * f[1] + vv[2] * f[2];
      acc += -e * chid * phi.data[i] - R.data[i] * vdg * chi + g2 * chi * phi.data[i] - e * chi * lphi.data[i] -
             vf * chi * phi.data[i];
    }
    vals.push_back(acc * dv);
  }
  double total = 0;
  for (std::size_t j = 0; j + 1 < snapshots.size(); ++j)
    total += 0.5 * (snapshots[j + 1].time - snapshots[j].time) * (vals[j] + vals[j + 1]);
  return total;
}

ProbeReport boundedness_probe(ProbeKind kind, const GridField& phi, double p, int trials, unsigned seed) {
  if (!(p > 1) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "probe exponent must lie in (1, inf)");
  require_components(phi, 1, "boundedness_probe");
  ProbeReport rep;
  const int kmax = phi.spec.n / 4;
  auto comm = [&](const GridField& f) { return multiply(phi, project_curl(f)) - project_curl(multiply(phi, f)); };
  for (int t = 0; t < trials; ++t) {
    GridField u = random_field(phi.spec, 3, kmax, seed * 7919ULL + t, true, false);
    u = (1.0 / lp_norm(u, p)) * u;
    double best = 0;
    if (kind == ProbeKind::di_commutator_Pcurl) {
      const GridField g = gradient(comm(u));
      for (int i = 0; i < 3; ++i) {
        GridField di(u.spec, 3);
        for (int c = 0; c < 3; ++c) std::copy(g.comp(3 * c + i), g.comp(3 * c + i) + u.spec.size(), di.comp(c));
        best = std::max(best, lp_norm(di, p));
      }
    } else {
      const GridField g = gradient(u);
      for (int i = 0; i < 3; ++i) {
        GridField di(u.spec, 3);
        for (int c = 0; c < 3; ++c) std::copy(g.comp(3 * c + i), g.comp(3 * c + i) + u.spec.size(), di.comp(c));
        best = std::max(best, lp_norm(comm(di), p));
      }
    }
    const double prev = rep.running_max.empty() ? 0.0 : rep.running_max.back();
    rep.running_max.push_back(std::max(prev, best));
  }
  rep.estimate = rep.running_max.empty() ? 0.0 : rep.running_max.back();
  return rep;
}

double smoothing_ratio(const GridField& phi, const GridField& f, const Vec3& center, double probe_radius) {
  require_components(phi, 1, "smoothing_ratio");
  require_components(f, 1, "smoothing_ratio");
  const GridField g = inv_lap(multiply(phi, f));
  const GridField d1 = gradient(g);
  const GridField d2 = gradient(d1);
  double c2 = max_norm_ball(g, probe_radius, center);
  for (int c = 0; c < 3; ++c) c2 = std::max(c2, max_norm_ball(component(d1, c), probe_radius, center));
  for (int c = 0; c < 9; ++c) c2 = std::max(c2, max_norm_ball(component(d2, c), probe_radius, center));
  double l1 = 0;
  for (std::size_t i = 0; i < f.data.size(); ++i)
    if (phi.data[i] != 0.0) l1 += std::abs(f.data[i]);
  l1 *= f.spec.cell_volume();
  return l1 > 0 ? c2 / l1 : 0.0;
}

}  // namespace vortlab
