#pragma once

// Ingham-type inequality certification for the oscillatory eigenvalue
// branches: the shifted frequency family, its asymptotic gap, numerical
// frame constants of the exponential family on (0, T), and least-squares
// recovery of modal coefficients from windowed density observations.

#include "maxns/modal_basis.hpp"
#include "maxns/params.hpp"
#include "maxns/spectrum.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace maxns {

// mu_n = -i lambda_n^(2) for n >= M, mu_{-n} = -i lambda_n^(3); sorted by
// increasing real part.  delta measures Re mu_n - n c_wave, eps the gap of
// Im mu_n below its limit (omega0 + 1/kappa)/2.
struct FrequencyFamily {
  int M = 0;
  int n_max = 0;
  double gap_required = 0.0;  // asymptotic half-gap c_wave / 2
  double min_gap = 0.0;       // smallest consecutive Re spacing observed
  std::vector<int> index;     // signed mode indices, ascending in Re mu
  std::vector<std::complex<double>> mu;
  std::vector<double> delta, eps;
};

FrequencyFamily frequencies(int M, int n_max, const PhysicalParams& p);

// Frame constants of {e^{i mu_j t}} on (0, T): extreme eigenvalues of the
// Gram matrix G_lj = integral_0^T e^{i(mu_j - conj(mu_l)) t} dt (closed
// form).  Requires T > 2 pi / gap_required.
struct InghamConstants {
  double T = 0.0;
  double C_low = 0.0;
  double C_high = 0.0;
  Eigen::MatrixXcd gram;
};
InghamConstants ingham_constants(const FrequencyFamily& fam, double T);

// Composite-Simpson evaluation of the same Gram matrix (cross-check oracle).
Eigen::MatrixXcd ingham_gram_quadrature(const FrequencyFamily& fam, double T, int points);

// Least-squares recovery of the modal expansion of an adjoint density trace
// sigma(t, x) observed on a space-time sample grid: columns are
// e^{conj(lambda_{n,l}) t} xi*_{n,l,rho} cos(n x) for n = 1..n_max plus the
// constant mode, solved by truncated SVD.
struct RecoveryResult {
  Eigen::VectorXcd alpha;  // 3 n_max eigen coefficients, then alpha0
  double residual = 0.0;
  double sigma_min = 0.0, sigma_max = 0.0;  // design-matrix singular values
};
RecoveryResult coefficient_recovery(const Eigen::MatrixXcd& sigma_obs,
                                    const std::vector<double>& times,
                                    const Eigen::VectorXd& xs, int n_max,
                                    const std::vector<BasisPair>& bases,
                                    const PhysicalParams& p, double sv_cutoff = 1e-10);

}  // namespace maxns
