#pragma once

#include <cstdlib>

#include "vortlab/grid.hpp"

namespace vortlab {

// One stored r2c mode. m is the signed integer wavenumber, k = (2 pi / L) m.
// keff zeroes the Nyquist component so first derivatives of real fields stay real;
// k2 is the true |k|^2 used by the Laplacian and its inverse.
struct Mode {
  std::size_t idx;
  int m[3];
  double k[3];
  double keff[3];
  double k2;
  double keff2;
  // Hermitian multiplicity: 1 on the kx = 0 and kx = n/2 planes, 2 otherwise.
  double weight;
  bool dealiased;  // inside the 2/3-rule box
};

template <class F>
void for_each_mode(const GridSpec& spec, F&& f) {
  const int n = spec.n, nh = n / 2 + 1;
  const double k0 = spec.k0();
  Mode md{};
  for (int kz = 0; kz < n; ++kz) {
    const int mz = kz <= n / 2 ? kz : kz - n;
    for (int ky = 0; ky < n; ++ky) {
      const int my = ky <= n / 2 ? ky : ky - n;
      for (int kx = 0; kx < nh; ++kx) {
        const int mx = kx;
        md.idx = (std::size_t(kz) * n + ky) * nh + kx;
        md.m[0] = mx;
        md.m[1] = my;
        md.m[2] = mz;
        md.k2 = 0;
        md.keff2 = 0;
        md.dealiased = true;
        for (int a = 0; a < 3; ++a) {
          md.k[a] = k0 * md.m[a];
          md.keff[a] = (std::abs(md.m[a]) * 2 == n) ? 0.0 : md.k[a];
          md.k2 += md.k[a] * md.k[a];
          md.keff2 += md.keff[a] * md.keff[a];
          if (3 * std::abs(md.m[a]) >= n) md.dealiased = false;
        }
        md.weight = (kx == 0 || 2 * kx == n) ? 1.0 : 2.0;
        f(static_cast<const Mode&>(md));
      }
    }
  }
}

SpectralField transform(const GridField& field);
GridField inverse_transform(const SpectralField& s, double time = 0.0);

// Sum of |c|^2 over the full (Hermitian-completed) spectrum times L^3,
// i.e. the continuum L2 norm squared of the trigonometric interpolant.
double spectral_norm2(const SpectralField& s);

enum class DiffOp { gradient, divergence, curl, laplacian };

GridField differential(const GridField& field, DiffOp op);
// Scalar -> 3 components; vector -> 9 components with index 3*i + j holding d_j u_i.
GridField gradient(const GridField& field);
GridField divergence(const GridField& field);
GridField curl(const GridField& field);
GridField laplacian(const GridField& field);

struct InverseLaplacian {
  GridField field;
  std::vector<double> discarded_mean;  // per component
};
// Zero mode is discarded and reported.
InverseLaplacian inverse_laplacian(const GridField& field);
GridField inv_lap(const GridField& field);

// P_curl has symbol I - keff keff^T / |keff|^2; on modes where keff vanishes but
// k does not (pure Nyquist directions) it is the identity. The zero mode is removed.
GridField project_curl(const GridField& field);
// Id - P_curl - mean.
GridField project_grad(const GridField& field);

struct HelmholtzParts {
  GridField grad_part;
  GridField curl_part;
  Vec3 mean;
};
HelmholtzParts helmholtz_split(const GridField& field);

// R(T) = 1/2 tr T - Laplacian^{-1} div div T, symbol 1/2 tr T - (k.T.k)/|k|^2.
// Zero mode is 1/2 tr of the mean.
GridField riesz_R(const GridField& tensor9);

// Spectral-space kernels (in place / out of place) used by the solver hot path.
void curl_hat(const SpectralField& in, SpectralField& out);
void project_curl_hat(SpectralField& s);
void dealias_hat(SpectralField& s);

// 2/3-rule truncation of a field.
GridField dealias(const GridField& field);
bool is_band_limited(const GridField& field, double tol = 1e-13);

// Products. With dealias = true the pointwise product is truncated by the
// 2/3 rule, which is exact (alias free) when both factors are band limited.
GridField product(const GridField& scalar, const GridField& f, bool dealias_out = true);
GridField cross(const GridField& a, const GridField& b, bool dealias_out = true);
GridField dot(const GridField& a, const GridField& b, bool dealias_out = true);
GridField outer(const GridField& a, const GridField& b, bool dealias_out = true);
// (a . grad) b for vector fields.
GridField advect(const GridField& a, const GridField& b, bool dealias_out = true);

// Random real field whose modes satisfy |m_a| <= kmax on every axis. Deterministic in seed.
GridField random_field(const GridSpec& spec, int comps, int kmax, unsigned long long seed,
                       bool mean_free = true, bool solenoidal = false);

// L^p norm of the pointwise magnitude.
double lp_norm(const GridField& f, double p);

}  // namespace vortlab
