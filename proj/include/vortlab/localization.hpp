#pragma once

#include <array>
#include <vector>

#include "vortlab/grid.hpp"
#include "vortlab/ns_solver.hpp"

namespace vortlab {

// Smooth monotone step: 0 for s <= 0, 1 for s >= 1, built from g(t) = exp(-sharpness/t).
double smooth_step(double s, double sharpness = 1.0);
// 1 on |x| <= inner, 0 on |x| >= outer.
double radial_bump(double r, double inner, double outer, double sharpness = 1.0);

// phi: plateau radius radii[0], support radius radii[1];
// phi_sharp: plateau radii[2], support radii[3].
struct CutoffPair {
  GridField phi;
  GridField phi_sharp;
  std::array<double, 4> radii{1.2, 1.25, 4.0 / 3.0, 1.5};
  double sharpness = 1.0;
};

inline constexpr std::array<double, 4> kDefaultCutoffRadii{1.2, 1.25, 4.0 / 3.0, 1.5};

CutoffPair make_cutoff_pair(const GridSpec& spec, const std::array<double, 4>& radii = kDefaultCutoffRadii,
                            double sharpness = 1.0);

// max |grad f| computed spectrally.
double max_gradient(const GridField& f);

struct LocalizationOptions {
  // Truncate pointwise products by the 2/3 rule. Sampled cut-offs are not band
  // limited, so this only pays off together with band-limited cut-offs.
  bool dealias_products = false;
};

struct LocalizedTriple {
  GridField v;
  GridField w;
  GridField varpi;
};

// v = -curl phi_sharp Lap^{-1} phi curl u (linear in u).
GridField localize(const GridField& u, const CutoffPair& cut, const LocalizationOptions& opt = {});
LocalizedTriple localized_velocity(const GridField& u, const CutoffPair& cut, const LocalizationOptions& opt = {});

// max |Lap field| over B_radius divided by |omega|_{L1(B_2)}.
double harmonicity_residual(const GridField& field, double region_radius, const GridField& omega);

enum class CommutatorKind { cm1, cm2, cm3, cm4 };

struct CommutatorResult {
  GridField direct;       // [phi, A] u as an operator difference
  GridField closed_form;  // expanded right side
  GridField alternate;    // second closed form (cm2 only; empty otherwise)
  double residual = 0;    // |direct - closed| / max(|direct|, |closed|)
  double alternate_residual = 0;
};

// cm3 and cm4 involve Lap^{-1}; inputs are expected mean free and the comparison
// ignores the zero mode, which the periodic inverse cannot see.
CommutatorResult commutator(CommutatorKind kind, const GridField& phi, const GridField& u,
                            const LocalizationOptions& opt = {});

struct SourceTerms {
  GridField B;
  GridField L;
  GridField W;
};

SourceTerms source_terms(const GridField& u, const CutoffPair& cut, const LocalizationOptions& opt = {});

// Pieces of the v equation at one time level, given d_t v.
struct VEquationTerms {
  GridField dt_v;
  GridField omega_cross_v;
  GridField grad_R;  // grad R(u (x) v)
  GridField lap_v;
  SourceTerms src;
  GridField residual;  // dt_v + omega x v + grad R - B - L - W - lap v
};

VEquationTerms v_equation_terms(const GridField& u, const GridField& dt_v, const CutoffPair& cut,
                                const LocalizationOptions& opt = {});

struct VEquationReport {
  double residual_l2 = 0;  // L2 over (window) x B_1
  double dt_v_l2 = 0;
  double relative = 0;
  std::vector<double> times;
};

// Evaluates the v equation at interior snapshots using fourth-order central
// differences of v in time (requires uniform spacing and >= 5 snapshots).
VEquationReport v_equation_residual(const std::vector<Snapshot>& snapshots, const CutoffPair& cut,
                                    const LocalizationOptions& opt = {}, double region_radius = 1.0);

// Weak form of the local energy inequality for v:
// int int [ -|v|^2/2 d_t psi - (v R(u (x) v)).grad psi + |grad v|^2 psi - |v|^2/2 Lap psi - v.(B+L+W) psi ].
double v_local_energy_residual(const std::vector<Snapshot>& snapshots, const CutoffPair& cut,
                               const TestFunction& psi, const LocalizationOptions& opt = {});

enum class ProbeKind { di_commutator_Pcurl, commutator_Pcurl_di };

struct ProbeReport {
  std::vector<double> running_max;  // after each trial
  double estimate = 0;
};

// Random probing of the L^p operator norm of d_i [phi, P_curl] or [phi, P_curl] d_i.
ProbeReport boundedness_probe(ProbeKind kind, const GridField& phi, double p, int trials, unsigned seed);

// |Lap^{-1}(phi f)|_{C^2(B_probe_radius(center))} / |f|_{L1(supp phi)} for one f.
double smoothing_ratio(const GridField& phi, const GridField& f, const Vec3& center, double probe_radius);

}  // namespace vortlab
