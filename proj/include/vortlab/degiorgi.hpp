#pragma once

#include <cmath>
#include <vector>

#include "vortlab/flowmap.hpp"
#include "vortlab/grid.hpp"

namespace vortlab {

inline double level_c(int k) { return 1.0 - std::ldexp(1.0, -k); }

// Truncation of one time slice of v at level c_k. Gradients of |v| and of beta_k v use the
// chain rule (grad|v| = (grad v)^T v / |v|, zero where v = 0); both are only Lipschitz across
// the level set, where spectral differentiation would ring.
struct TruncationLevel {
  int k = 0;
  double c = 0;
  GridField abs_v;        // |v|
  GridField v_k;          // (|v| - c_k)_+
  GridField beta;         // v_k / |v|, 0 where |v| = 0
  GridField alpha;        // 1 - beta
  GridField indicator;    // 1 on {v_k > 0}
  GridField grad_abs_v;   // |grad |v||
  GridField grad_v;       // |grad v| (Frobenius)
  GridField d;            // d_k
  GridField grad_v_k;     // |grad v_k| = 1_k |grad |v||
  GridField grad_beta_v;  // |grad (beta_k v)|
};

TruncationLevel truncate(const GridField& v, int k);

// r_flat = (1 + 8^-k)/2, r_nat = (1 + 2 8^-k)/2, r_sharp = (1 + 4 8^-k)/2, T = r^2,
// Q = (-T, 0) x B_r relative to the top time.
struct ShrinkingCylinders {
  int k = 0;
  double r_flat = 1, r_nat = 1, r_sharp = 1;
  double T_flat() const { return r_flat * r_flat; }
  double T_nat() const { return r_nat * r_nat; }
  double T_sharp() const { return r_sharp * r_sharp; }
};

ShrinkingCylinders shrinking_cylinders(int k);

// Space-time cutoffs 1_{Q_k^flat} <= rho_k <= 1_{Q_k^nat} and 1_{Q_k^sharp} <= rho_k^sharp <= 1_{Q_{k-1}^flat},
// evaluated at time t (relative to the top time, t <= 0).
GridField rho_cutoff(const GridSpec& spec, int k, double t, double sharpness = 1.0);
GridField rho_sharp_cutoff(const GridSpec& spec, int k, double t, double sharpness = 1.0);

// Series of v with a top time: cylinder times are measured as t - t_top.
struct DeGiorgiInput {
  FieldSeries v;
  double t_top = 0;
};

struct EnergyTerms {
  double sup_l2 = 0;  // sup_t |v_k|^2_{L2(B_k^flat)}
  double d_l2 = 0;    // |d_k|^2_{L2(Q_k^flat)}
  double U = 0;
  int slices = 0;
};

// U_k on Q_k^flat, or on Q_{m}^flat when cylinder_index is given (used for Q_{k-1}).
EnergyTerms energy(const DeGiorgiInput& in, int k);
EnergyTerms energy_on(const DeGiorgiInput& in, int k, int cylinder_index);

struct TruncationReport {
  int k = 0;
  double U_prev = 0;
  // alpha_k |v| <= c_k <= 1
  double alpha_margin = 0;  // c_k - max alpha_k |v|
  // |grad v_k| <= d_k and |grad(beta_k v)| <= 3 d_k pointwise
  double grad_vk_excess = 0;  // max(|grad v_k| - d_k)
  double grad_bv_excess = 0;  // max(|grad(beta_k v)| - 3 d_k)
  // |beta_k v|^2_E(Q_{k-1}^flat) <= 9 U_{k-1}
  double beta_E2 = 0;
  double beta_margin = 0;  // 9 U_{k-1} - beta_E2
  // |1_k|^2 in L^inf L^2 and L^2 L^6 on Q_{k-1}^flat, with the 2^k chain against v_{k-1}
  double ind_linf_l2 = 0;
  double ind_l2_l6 = 0;
  double chain_linf_margin = 0;  // 4^k |v_{k-1}|^2_{L^inf L^2} - |1_k|^2_{L^inf L^2}
  double chain_l6_margin = 0;    // 4^k |v_{k-1}|^2_{L^2 L^6} - |1_k|^2_{L^2 L^6}
  double realized_C = 0;         // ((ind_linf_l2 + ind_l2_l6) / U_{k-1})^{1/k}
  bool holds = false;
};

TruncationReport truncation_lemma_check(const DeGiorgiInput& in, int k);

struct NonlinearizeReport {
  double p = 0, q = 0;            // f in L^p_t L^q_x
  double p_theta = 0, q_theta = 0;
  double lhs = 0;                 // int int |beta_k v|^sigma |f| over Q_{k-1}^flat
  double holder = 0;              // |f| |beta_k v|^sigma |1_k|^{gamma - sigma} in the mixed norms
  double rhs = 0;                 // |f|_{L^p L^q} U_{k-1}^{gamma/2}
  double realized_C = 0;          // lhs / rhs
};

// Exponent relations 1/p + gamma theta/2 = 1, 1/q + gamma (theta/6 + (1-theta)/2) = 1 with
// p, q >= 1, 0 <= theta <= 1, 0 < sigma <= gamma.
NonlinearizeReport nonlinearize_check(const DeGiorgiInput& in, const FieldSeries& f, int k, double theta, double sigma,
                                      double gamma);

// Mixed norm (int (int |f|^b dx)^{a/b} dt)^{1/a} over [t_top - T, t_top] x B_r; a or b may be infinite.
double mixed_norm(const FieldSeries& f, double t_top, double T, double r, double a, double b);

}  // namespace vortlab
