#include "vortlab/ns_solver.hpp"

#include <cmath>
#include <sstream>

#include "vortlab/error.hpp"
#include "vortlab/spectral.hpp"

namespace vortlab {

void SolverConfig::validate() const {
  grid.validate();
  if (!(viscosity > 0)) fail(ErrorCode::InvalidArgument, "viscosity must be positive");
  if (!(dt > 0)) fail(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(t_end >= 0)) fail(ErrorCode::InvalidArgument, "t_end must be nonnegative");
  if (snapshot_stride < 1) fail(ErrorCode::InvalidArgument, "snapshot_stride must be >= 1");
}

GridField taylor_green_init(const GridSpec& spec, double amplitude) {
  return sample_field(spec, 3, [&](const Vec3& x, double* o) {
    o[0] = amplitude * std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]);
    o[1] = -amplitude * std::cos(x[0]) * std::sin(x[1]) * std::cos(x[2]);
    o[2] = 0.0;
  });
}

namespace {

double enstrophy_hat(const SpectralField& s) {
  double acc = 0;
  for (int c = 0; c < s.components; ++c) {
    const cplx* a = s.comp(c);
    for_each_mode(s.spec, [&](const Mode& md) { acc += md.weight * md.k2 * std::norm(a[md.idx]); });
  }
  const double L = s.spec.L;
  return acc * L * L * L;
}

Snapshot snapshot_from_hat(const SpectralField& uh, double t) {
  Snapshot s;
  s.velocity = inverse_transform(uh, t);
  s.time = t;
  s.kinetic_energy = 0.5 * spectral_norm2(uh);
  s.enstrophy = enstrophy_hat(uh);
  return s;
}

class Stepper {
 public:
  explicit Stepper(const SolverConfig& cfg) : cfg_(cfg) {
    const std::size_t m = cfg.grid.modes();
    e_full_.resize(m);
    e_half_.resize(m);
    for_each_mode(cfg.grid, [&](const Mode& md) {
      e_full_[md.idx] = std::exp(-cfg.viscosity * md.k2 * cfg.dt);
      e_half_[md.idx] = std::exp(-cfg.viscosity * md.k2 * cfg.dt * 0.5);
    });
  }

  // -P_curl(omega x u), truncated by the 2/3 rule when dealiasing is on.
  SpectralField nonlinear(const SpectralField& uh) const {
    SpectralField wh;
    curl_hat(uh, wh);
    const GridField u = inverse_transform(uh);
    const GridField w = inverse_transform(wh);
    const GridField f = cross(w, u, false);
    SpectralField fh = transform(f);
    if (cfg_.dealias) dealias_hat(fh);
    project_curl_hat(fh);
    for (cplx& c : fh.coeffs) c = -c;
    return fh;
  }

  void apply(std::vector<cplx>& v, const std::vector<double>& e) const {
    const std::size_t m = e.size();
    for (std::size_t c = 0; c < v.size() / m; ++c)
      for (std::size_t i = 0; i < m; ++i) v[c * m + i] *= e[i];
  }

  SpectralField step(const SpectralField& un) const {
    const double dt = cfg_.dt;
    const std::size_t total = un.coeffs.size();
    const SpectralField a = nonlinear(un);

    SpectralField ua = un;
    for (std::size_t i = 0; i < total; ++i) ua.coeffs[i] += 0.5 * dt * a.coeffs[i];
    apply(ua.coeffs, e_half_);
    const SpectralField b = nonlinear(ua);

    SpectralField uhalf = un;
    apply(uhalf.coeffs, e_half_);
    SpectralField ub = uhalf;
    for (std::size_t i = 0; i < total; ++i) ub.coeffs[i] += 0.5 * dt * b.coeffs[i];
    const SpectralField c = nonlinear(ub);

    SpectralField ec = c;
    apply(ec.coeffs, e_half_);
    SpectralField uc = un;
    apply(uc.coeffs, e_full_);
    for (std::size_t i = 0; i < total; ++i) uc.coeffs[i] += dt * ec.coeffs[i];
    const SpectralField d = nonlinear(uc);

    // u_{n+1} = E u_n + dt/6 (E a + 2 E_half (b + c) + d)
    SpectralField ea = a;
    apply(ea.coeffs, e_full_);
    SpectralField bc = b;
    for (std::size_t i = 0; i < total; ++i) bc.coeffs[i] += c.coeffs[i];
    apply(bc.coeffs, e_half_);
    SpectralField out = un;
    apply(out.coeffs, e_full_);
    for (std::size_t i = 0; i < total; ++i)
      out.coeffs[i] += dt / 6.0 * (ea.coeffs[i] + 2.0 * bc.coeffs[i] + d.coeffs[i]);
    return out;
  }

 private:
  SolverConfig cfg_;
  std::vector<double> e_full_, e_half_;
};

double max_abs(const SpectralField& s) {
  double m = 0;
  for (const cplx& c : s.coeffs) {
    const double a = std::abs(c);
    if (!std::isfinite(a)) return INFINITY;
    m = std::max(m, a);
  }
  return m;
}

SpectralField prepare_state(const GridField& u, const SolverConfig& cfg) {
  require_components(u, 3, "solver state");
  if (!(u.spec == cfg.grid)) fail(ErrorCode::DimensionMismatch, "state grid differs from solver grid");
  SpectralField uh = transform(u);
  if (cfg.dealias) dealias_hat(uh);
  return uh;
}

}  // namespace

Snapshot make_snapshot(const GridField& u) {
  require_components(u, 3, "make_snapshot");
  Snapshot s = snapshot_from_hat(transform(u), u.time);
  s.velocity = u;
  return s;
}

NavierStokes::NavierStokes(const SolverConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

GridField NavierStokes::rhs(const GridField& u) const {
  Stepper st(cfg_);
  SpectralField uh = prepare_state(u, cfg_);
  SpectralField n = st.nonlinear(uh);
  for_each_mode(cfg_.grid, [&](const Mode& md) {
    for (int c = 0; c < 3; ++c) n.comp(c)[md.idx] -= cfg_.viscosity * md.k2 * uh.comp(c)[md.idx];
  });
  return inverse_transform(n, u.time);
}

Snapshot NavierStokes::step(const Snapshot& state) const {
  Stepper st(cfg_);
  const SpectralField uh = prepare_state(state.velocity, cfg_);
  const SpectralField next = st.step(uh);
  const double t = state.time + cfg_.dt;
  if (!std::isfinite(max_abs(next))) {
    std::ostringstream os;
    os << "non-finite state at t=" << t;
    fail(ErrorCode::BlowUp, os.str());
  }
  return snapshot_from_hat(next, t);
}

RunResult NavierStokes::run(const GridField& u0) const {
  Stepper st(cfg_);
  SpectralField uh = prepare_state(u0, cfg_);
  const double initial_max = max_abs(uh);
  const long nsteps = std::lround(cfg_.t_end / cfg_.dt);

  RunResult res;
  std::vector<double> ke, z;
  ke.reserve(nsteps + 1);
  z.reserve(nsteps + 1);
  auto record = [&](const SpectralField& s, long step) {
    const double t = u0.time + step * cfg_.dt;
    ke.push_back(0.5 * spectral_norm2(s));
    z.push_back(enstrophy_hat(s));
    if (step % cfg_.snapshot_stride == 0 || step == nsteps) res.snapshots.push_back(snapshot_from_hat(s, t));
  };
  record(uh, 0);
  for (long n = 1; n <= nsteps; ++n) {
    uh = st.step(uh);
    const double m = max_abs(uh);
    if (!std::isfinite(m) || m > 1e6 * std::max(initial_max, 1e-300)) {
      std::ostringstream os;
      os << "blow-up detected at t=" << u0.time + n * cfg_.dt << " (max coefficient " << m << ")";
      fail(ErrorCode::BlowUp, os.str());
    }
    record(uh, n);
  }

  std::vector<double> dissipation(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) dissipation[i] = cfg_.viscosity * z[i];
  const std::vector<double> cum = cumulative_quadrature(dissipation, cfg_.dt);
  res.energy.reserve(ke.size());
  for (std::size_t i = 0; i < ke.size(); ++i)
    res.energy.push_back({u0.time + double(i) * cfg_.dt, ke[i], z[i], ke[i] + cum[i] - ke[0]});
  return res;
}

Snapshot step(const Snapshot& state, const SolverConfig& cfg) { return NavierStokes(cfg).step(state); }

RunResult run(const SolverConfig& cfg, const GridField& u0) { return NavierStokes(cfg).run(u0); }

std::vector<double> cumulative_quadrature(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double seg;
    if (n < 4) {
      seg = 0.5 * h * (f[j] + f[j + 1]);
    } else if (j == 0) {
      seg = h / 24.0 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    } else if (j + 2 == n) {
      seg = h / 24.0 * (f[j - 2] - 5 * f[j - 1] + 19 * f[j] + 9 * f[j + 1]);
    } else {
      seg = h / 24.0 * (-f[j - 1] + 13 * f[j] + 13 * f[j + 1] - f[j + 2]);
    }
    out[j + 1] = out[j] + seg;
  }
  return out;
}

GridField pressure(const GridField& velocity) {
  require_components(velocity, 3, "pressure");
  const SpectralField t = transform(outer(velocity, velocity, false));
  SpectralField out(velocity.spec, 1);
  cplx* o = out.comp(0);
  for_each_mode(velocity.spec, [&](const Mode& md) {
    if (md.k2 == 0) return;
    cplx ktk = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) ktk += md.keff[a] * md.keff[b] * t.comp(3 * a + b)[md.idx];
    o[md.idx] = -ktk / md.k2;
  });
  return inverse_transform(out, velocity.time);
}

TestFunction make_test_function(const GridField& space, double a, double b) {
  if (!(b > a)) fail(ErrorCode::InvalidArgument, "time window must be nonempty");
  TestFunction tf;
  tf.space = space;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  tf.chi = [=](double t) {
    const double x = (t - mid) / half;
    if (std::abs(x) >= 1) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
  };
  tf.chi_dot = [=](double t) {
    const double x = (t - mid) / half;
    if (std::abs(x) >= 1) return 0.0;
    const double q = 1.0 - x * x;
    return std::exp(1.0 - 1.0 / q) * (-2.0 * x / (q * q)) / half;
  };
  return tf;
}

double local_energy_residual(const std::vector<Snapshot>& snapshots, const TestFunction& psi, double viscosity) {
  if (snapshots.size() < 3) fail(ErrorCode::NotEnoughData, "local energy residual needs at least 3 snapshots");
  const GridField& phi = psi.space;
  require_components(phi, 1, "local_energy_residual test function");
  const GridField gphi = gradient(phi);
  const GridField lphi = laplacian(phi);
  const std::size_t m = phi.spec.size();
  const double dv = phi.spec.cell_volume();

  std::vector<double> vals;
  vals.reserve(snapshots.size());
  for (const Snapshot& s : snapshots) {
    const double t = s.time;
    const double chi = psi.chi(t), chid = psi.chi_dot(t);
    if (chi == 0.0 && chid == 0.0) {
      vals.push_back(0.0);
      continue;
    }
    const GridField& u = s.velocity;
    const GridField p = pressure(u);
    const GridField gu = gradient(u);
    double acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3 v = u.vec(i);
      const double e = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      double g2 = 0;
      for (int c = 0; c < 9; ++c) g2 += gu.at(c, i) * gu.at(c, i);
      const double udg = v[0] * gphi.at(0, i) + v[1] * gphi.at(1, i) + v[2] * gphi.at(2, i);
      acc += -e * chid * phi.data[i] - (e + p.data[i]) * udg * chi + viscosity * g2 * chi * phi.data[i] -
             viscosity * e * chi * lphi.data[i];
    }
    vals.push_back(acc * dv);
  }
  double total = 0;
  for (std::size_t j = 0; j + 1 < snapshots.size(); ++j)
    total += 0.5 * (snapshots[j + 1].time - snapshots[j].time) * (vals[j] + vals[j + 1]);
  return total;
}

}  // namespace vortlab
