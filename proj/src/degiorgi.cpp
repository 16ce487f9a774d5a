#include "vortlab/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vortlab/error.hpp"
#include "vortlab/localization.hpp"
#include "vortlab/spectral.hpp"

namespace vortlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Slices {
  std::vector<std::size_t> idx;
  std::vector<double> w;
};

// Slices with t - t_top in [-T, 0], trapezoid weights among them.
Slices window(const DeGiorgiInput& in, double T) {
  const auto& t = in.v.times;
  const double tol = 1e-9 * std::max(1.0, std::abs(in.t_top));
  Slices s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double rel = t[i] - in.t_top;
    if (rel >= -T - tol && rel <= tol) s.idx.push_back(i);
  }
  if (s.idx.empty()) fail(ErrorCode::RangeExceeded, "degiorgi: no slice inside the cylinder time window");
  s.w.assign(s.idx.size(), 0.0);
  for (std::size_t a = 0; a + 1 < s.idx.size(); ++a) {
    const double h = t[s.idx[a + 1]] - t[s.idx[a]];
    s.w[a] += 0.5 * h;
    s.w[a + 1] += 0.5 * h;
  }
  return s;
}

double slice_norm(const GridField& f, double r, double b) {
  if (std::isinf(b)) return max_norm_ball(f, r);
  return std::pow(power_integral_ball(f, b, r), 1 / b);
}

double mixed(const std::vector<double>& slice_norms, const std::vector<double>& w, double a) {
  if (std::isinf(a)) return *std::max_element(slice_norms.begin(), slice_norms.end());
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(slice_norms[i], a);
  return std::pow(s, 1 / a);
}

GridField scalar_like(const GridField& v) { return GridField(v.spec, 1, v.time); }

}  // namespace

TruncationLevel truncate(const GridField& v, int k) {
  require_components(v, 3, "truncate");
  if (k < 0) fail(ErrorCode::InvalidArgument, "truncate: k >= 0");
  TruncationLevel L;
  L.k = k;
  L.c = level_c(k);
  const GridField g = gradient(v);
  L.abs_v = scalar_like(v);
  L.v_k = scalar_like(v);
  L.beta = scalar_like(v);
  L.alpha = scalar_like(v);
  L.indicator = scalar_like(v);
  L.grad_abs_v = scalar_like(v);
  L.grad_v = scalar_like(v);
  L.d = scalar_like(v);
  L.grad_v_k = scalar_like(v);
  L.grad_beta_v = scalar_like(v);
  const std::size_t N = v.spec.size();
  for (std::size_t x = 0; x < N; ++x) {
    const double vi[3] = {v.at(0, x), v.at(1, x), v.at(2, x)};
    const double m = std::sqrt(vi[0] * vi[0] + vi[1] * vi[1] + vi[2] * vi[2]);
    double ga[3] = {0, 0, 0};
    double gv2 = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gv2 += g.at(3 * i + j, x) * g.at(3 * i + j, x);
    if (m > 0)
      for (int j = 0; j < 3; ++j) ga[j] = (vi[0] * g.at(j, x) + vi[1] * g.at(3 + j, x) + vi[2] * g.at(6 + j, x)) / m;
    const double gam = std::sqrt(ga[0] * ga[0] + ga[1] * ga[1] + ga[2] * ga[2]);
    const double vk = std::max(m - L.c, 0.0);
    const double beta = m > 0 ? vk / m : 0.0;
    const double alpha = 1 - beta;
    const double ind = vk > 0 ? 1.0 : 0.0;
    L.abs_v.data[x] = m;
    L.v_k.data[x] = vk;
    L.beta.data[x] = beta;
    L.alpha.data[x] = alpha;
    L.indicator.data[x] = ind;
    L.grad_abs_v.data[x] = gam;
    L.grad_v.data[x] = std::sqrt(gv2);
    L.d.data[x] = std::sqrt(ind * (alpha * gam * gam + beta * gv2));
    L.grad_v_k.data[x] = ind * gam;
    if (ind > 0) {
      // d_j (beta v)_i = beta d_j v_i + alpha (v_i / |v|) d_j |v| on Omega_k.
      double s = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double e = beta * g.at(3 * i + j, x) + alpha * vi[i] / m * ga[j];
          s += e * e;
        }
      L.grad_beta_v.data[x] = std::sqrt(s);
    }
  }
  return L;
}

ShrinkingCylinders shrinking_cylinders(int k) {
  const double e = std::pow(8.0, -k);
  ShrinkingCylinders c;
  c.k = k;
  c.r_flat = 0.5 * (1 + e);
  c.r_nat = 0.5 * (1 + 2 * e);
  c.r_sharp = 0.5 * (1 + 4 * e);
  return c;
}

namespace {

GridField space_time_cutoff(const GridSpec& spec, double r_in, double r_out, double T_in, double T_out, double t,
                            double sharpness) {
  double chi = 0;
  if (t >= -T_in) chi = 1;
  else if (t > -T_out) chi = smooth_step((t + T_out) / (T_out - T_in), sharpness);
  GridField f = radial_field(spec, [&](double r) { return radial_bump(r, r_in, r_out, sharpness); });
  return chi * f;
}

}  // namespace

GridField rho_cutoff(const GridSpec& spec, int k, double t, double sharpness) {
  const auto c = shrinking_cylinders(k);
  return space_time_cutoff(spec, c.r_flat, c.r_nat, c.T_flat(), c.T_nat(), t, sharpness);
}

GridField rho_sharp_cutoff(const GridSpec& spec, int k, double t, double sharpness) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "rho_sharp_cutoff: k >= 1");
  const auto c = shrinking_cylinders(k), p = shrinking_cylinders(k - 1);
  return space_time_cutoff(spec, c.r_sharp, p.r_flat, c.T_sharp(), p.T_flat(), t, sharpness);
}

EnergyTerms energy_on(const DeGiorgiInput& in, int k, int cylinder_index) {
  in.v.validate();
  const auto cyl = shrinking_cylinders(cylinder_index);
  const double r = cyl.r_flat;
  const Slices s = window(in, cyl.T_flat());
  EnergyTerms e;
  for (std::size_t a = 0; a < s.idx.size(); ++a) {
    const TruncationLevel L = truncate(in.v.fields[s.idx[a]], k);
    e.sup_l2 = std::max(e.sup_l2, power_integral_ball(L.v_k, 2.0, r));
    e.d_l2 += s.w[a] * power_integral_ball(L.d, 2.0, r);
  }
  e.slices = static_cast<int>(s.idx.size());
  e.U = e.sup_l2 + e.d_l2;
  return e;
}

EnergyTerms energy(const DeGiorgiInput& in, int k) { return energy_on(in, k, k); }

TruncationReport truncation_lemma_check(const DeGiorgiInput& in, int k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "truncation_lemma_check: k >= 1");
  in.v.validate();
  TruncationReport rep;
  rep.k = k;
  rep.U_prev = energy_on(in, k - 1, k - 1).U;
  const auto cyl = shrinking_cylinders(k - 1);
  const double r = cyl.r_flat;
  const Slices s = window(in, cyl.T_flat());
  const double c = level_c(k);
  double max_alpha_v = 0, grad_sq = 0, sup_bv = 0;
  double ind_sup = 0, ind_l6 = 0, vprev_sup = 0, vprev_l6 = 0;
  rep.grad_vk_excess = -kInf;
  rep.grad_bv_excess = -kInf;
  for (std::size_t a = 0; a < s.idx.size(); ++a) {
    const GridField& v = in.v.fields[s.idx[a]];
    const TruncationLevel L = truncate(v, k);
    const TruncationLevel P = truncate(v, k - 1);
    for (std::size_t x = 0; x < v.spec.size(); ++x) {
      max_alpha_v = std::max(max_alpha_v, L.alpha.data[x] * L.abs_v.data[x]);
      rep.grad_vk_excess = std::max(rep.grad_vk_excess, L.grad_v_k.data[x] - L.d.data[x]);
      rep.grad_bv_excess = std::max(rep.grad_bv_excess, L.grad_beta_v.data[x] - 3 * L.d.data[x]);
    }
    sup_bv = std::max(sup_bv, power_integral_ball(L.v_k, 2.0, r));
    grad_sq += s.w[a] * power_integral_ball(L.grad_beta_v, 2.0, r);
    const double meas = power_integral_ball(L.indicator, 1.0, r);
    ind_sup = std::max(ind_sup, meas);
    ind_l6 += s.w[a] * std::cbrt(meas);
    vprev_sup = std::max(vprev_sup, power_integral_ball(P.v_k, 2.0, r));
    vprev_l6 += s.w[a] * std::cbrt(power_integral_ball(P.v_k, 6.0, r));
  }
  rep.alpha_margin = c - max_alpha_v;
  rep.beta_E2 = sup_bv + grad_sq;
  rep.beta_margin = 9 * rep.U_prev - rep.beta_E2;
  rep.ind_linf_l2 = ind_sup;
  rep.ind_l2_l6 = ind_l6;
  const double four_k = std::ldexp(1.0, 2 * k);
  rep.chain_linf_margin = four_k * vprev_sup - ind_sup;
  rep.chain_l6_margin = four_k * vprev_l6 - ind_l6;
  const double lhs = ind_sup + ind_l6;
  rep.realized_C = rep.U_prev > 0 ? std::pow(lhs / rep.U_prev, 1.0 / k) : 0.0;
  const double tol = 1e-12 * std::max(1.0, rep.U_prev);
  rep.holds = rep.alpha_margin >= -1e-14 && c <= 1 && rep.grad_vk_excess <= 1e-8 && rep.grad_bv_excess <= 1e-8 &&
              rep.beta_margin >= -tol && rep.chain_linf_margin >= -tol && rep.chain_l6_margin >= -tol;
  return rep;
}

double mixed_norm(const FieldSeries& f, double t_top, double T, double r, double a, double b) {
  DeGiorgiInput in{f, t_top};
  const Slices s = window(in, T);
  std::vector<double> norms;
  for (std::size_t i : s.idx) norms.push_back(slice_norm(f.fields[i], r, b));
  return mixed(norms, s.w, a);
}

NonlinearizeReport nonlinearize_check(const DeGiorgiInput& in, const FieldSeries& f, int k, double theta, double sigma,
                                      double gamma) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "nonlinearize_check: k >= 1");
  if (!(theta >= 0 && theta <= 1) || !(sigma > 0) || !(sigma <= gamma))
    fail(ErrorCode::ExponentRelation, "nonlinearize_check: need 0 <= theta <= 1 and 0 < sigma <= gamma");
  const double inv_p = 1 - gamma * theta / 2;
  const double inv_q = 1 - gamma * (theta / 6 + (1 - theta) / 2);
  if (inv_p < 0 || inv_p > 1 || inv_q < 0 || inv_q > 1)
    fail(ErrorCode::ExponentRelation, "nonlinearize_check: relations give p or q below 1");
  if (f.times != in.v.times) fail(ErrorCode::DimensionMismatch, "nonlinearize_check: f and v on different times");
  NonlinearizeReport rep;
  rep.p = inv_p > 0 ? 1 / inv_p : kInf;
  rep.q = inv_q > 0 ? 1 / inv_q : kInf;
  rep.p_theta = theta > 0 ? 2 / theta : kInf;
  rep.q_theta = 1 / (theta / 6 + (1 - theta) / 2);
  const auto cyl = shrinking_cylinders(k - 1);
  const double r = cyl.r_flat;
  const Slices s = window(in, cyl.T_flat());
  std::vector<double> nf, nb, ni;
  for (std::size_t a = 0; a < s.idx.size(); ++a) {
    const TruncationLevel L = truncate(in.v.fields[s.idx[a]], k);
    const GridField fm = magnitude(f.fields[s.idx[a]]);
    GridField integrand = scalar_like(fm);
    for (std::size_t x = 0; x < fm.data.size(); ++x)
      integrand.data[x] = std::pow(L.v_k.data[x], sigma) * fm.data[x];
    rep.lhs += s.w[a] * power_integral_ball(integrand, 1.0, r);
    nf.push_back(slice_norm(fm, r, rep.q));
    nb.push_back(slice_norm(L.v_k, r, rep.q_theta));
    ni.push_back(slice_norm(L.indicator, r, rep.q_theta));
  }
  const double F = mixed(nf, s.w, rep.p);
  rep.holder = F * std::pow(mixed(nb, s.w, rep.p_theta), sigma) * std::pow(mixed(ni, s.w, rep.p_theta), gamma - sigma);
  rep.rhs = F * std::pow(energy_on(in, k - 1, k - 1).U, gamma / 2);
  rep.realized_C = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

}  // namespace vortlab
