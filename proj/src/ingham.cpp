#include "maxns/ingham.hpp"

#include "maxns/errors.hpp"
#include "maxns/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace maxns {

namespace {

using Cplx = std::complex<double>;

Cplx phi_div(Cplx z, double T) {
  if (std::abs(z) < 1e-12) return Cplx(T, 0.0);
  return (std::exp(z * T) - 1.0) / z;
}

}  // namespace

FrequencyFamily frequencies(int M, int n_max, const PhysicalParams& p) {
  if (M < 1) throw ValidationError("ingham.M: need M >= 1");
  if (n_max < M) throw ValidationError("ingham.n_max: need n_max >= M");
  FrequencyFamily fam;
  fam.M = M;
  fam.n_max = n_max;
  fam.gap_required = 0.5 * p.c_wave;

  const double im_limit = 0.5 * (p.omega0 + 1.0 / p.kappa);
  const Cplx rot(0.0, -1.0);  // mu = -i lambda

  std::vector<Cplx> osc(static_cast<size_t>(n_max - M) + 1);
  for (int n = M; n <= n_max; ++n)
    osc[static_cast<size_t>(n - M)] = solve_mode(n, p).lambda[1];

  // Negative branch first (ascending real part), then the positive branch.
  for (int n = n_max; n >= M; --n) {
    fam.index.push_back(-n);
    fam.mu.push_back(rot * std::conj(osc[static_cast<size_t>(n - M)]));
  }
  for (int n = M; n <= n_max; ++n) {
    fam.index.push_back(n);
    fam.mu.push_back(rot * osc[static_cast<size_t>(n - M)]);
  }
  for (size_t j = 0; j < fam.mu.size(); ++j) {
    fam.delta.push_back(fam.mu[j].real() - fam.index[j] * p.c_wave);
    fam.eps.push_back(im_limit - fam.mu[j].imag());
  }

  fam.min_gap = std::numeric_limits<double>::infinity();
  int worst = 0;
  for (size_t j = 1; j < fam.mu.size(); ++j) {
    const double g = fam.mu[j].real() - fam.mu[j - 1].real();
    if (g < fam.min_gap) {
      fam.min_gap = g;
      worst = fam.index[j];
    }
  }
  if (!(fam.min_gap > fam.gap_required - 1e-12))
    throw NumericalError("ingham: frequency gap below c_wave/2 at mode " +
                         std::to_string(worst));
  return fam;
}

InghamConstants ingham_constants(const FrequencyFamily& fam, double T) {
  const double t_min = 2.0 * kPi / fam.gap_required;
  if (!(T > t_min))
    throw ValidationError("ingham.T: horizon must exceed the critical time 2 pi / gap");
  const int m = static_cast<int>(fam.mu.size());
  InghamConstants out;
  out.T = T;
  out.gram.resize(m, m);
  for (int l = 0; l < m; ++l)
    for (int j = 0; j < m; ++j) {
      const Cplx z = Cplx(0.0, 1.0) * (fam.mu[static_cast<size_t>(j)] -
                                       std::conj(fam.mu[static_cast<size_t>(l)]));
      out.gram(l, j) = phi_div(z, T);
    }
  // Rounding can break Hermitian symmetry in the last bit; restore it.
  out.gram = 0.5 * (out.gram + out.gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.gram);
  out.C_low = es.eigenvalues()(0);
  out.C_high = es.eigenvalues()(m - 1);
  return out;
}

Eigen::MatrixXcd ingham_gram_quadrature(const FrequencyFamily& fam, double T, int points) {
  if (points < 3 || points % 2 == 0)
    throw ValidationError("ingham.quad: points must be odd and >= 3");
  const int m = static_cast<int>(fam.mu.size());
  const double h = T / (points - 1);
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(m, m);
  for (int l = 0; l < m; ++l)
    for (int j = 0; j < m; ++j) {
      const Cplx z = Cplx(0.0, 1.0) * (fam.mu[static_cast<size_t>(j)] -
                                       std::conj(fam.mu[static_cast<size_t>(l)]));
      // Incremental exponential with periodic refresh against drift.
      const Cplx stepf = std::exp(z * h);
      Cplx e = 1.0;
      Cplx acc = 0.0;
      for (int t = 0; t < points; ++t) {
        if (t % 512 == 0) e = std::exp(z * (t * h));
        const double w = (t == 0 || t == points - 1) ? 1.0 : (t % 2 == 1 ? 4.0 : 2.0);
        acc += w * e;
        e *= stepf;
      }
      G(l, j) = acc * (h / 3.0);
    }
  return G;
}

RecoveryResult coefficient_recovery(const Eigen::MatrixXcd& sigma_obs,
                                    const std::vector<double>& times,
                                    const Eigen::VectorXd& xs, int n_max,
                                    const std::vector<BasisPair>& bases,
                                    const PhysicalParams& p, double sv_cutoff) {
  const int nt = static_cast<int>(times.size());
  const int nx = static_cast<int>(xs.size());
  if (sigma_obs.rows() != nt || sigma_obs.cols() != nx)
    throw ValidationError("recovery: observation matrix must be times x nodes");
  if (n_max < 1 || static_cast<int>(bases.size()) < n_max)
    throw ValidationError("recovery: basis family does not cover n_max");
  const int n_cols = 3 * n_max + 1;
  const int n_rows = nt * nx;
  if (n_rows < n_cols)
    throw ValidationError("recovery: need at least as many samples as unknowns");

  Eigen::MatrixXcd A(n_rows, n_cols);
  Eigen::VectorXcd rhs(n_rows);
  for (int it = 0; it < nt; ++it)
    for (int ix = 0; ix < nx; ++ix) {
      const int row = it * nx + ix;
      rhs(row) = sigma_obs(it, ix);
      for (int n = 1; n <= n_max; ++n) {
        const BasisPair& basis = bases[static_cast<size_t>(n - 1)];
        const double cosx = std::cos(n * xs(ix));
        for (int l = 0; l < 3; ++l) {
          const Cplx decay =
              std::exp(std::conj(basis.mode.lambda[static_cast<size_t>(l)]) *
                       times[static_cast<size_t>(it)]);
          A(row, 3 * (n - 1) + l) = decay * basis.xi_star[static_cast<size_t>(l)].rho * cosx;
        }
      }
      A(row, n_cols - 1) = 1.0 / std::sqrt(p.b * kPi);
    }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  RecoveryResult out;
  out.sigma_max = sv(0);
  out.sigma_min = sv(sv.size() - 1);
  Eigen::VectorXcd y = svd.matrixU().adjoint() * rhs;
  for (int j = 0; j < sv.size(); ++j)
    y(j) = sv(j) > sv_cutoff * out.sigma_max ? y(j) / sv(j) : Cplx(0.0);
  out.alpha = svd.matrixV() * y;
  out.residual = (A * out.alpha - rhs).norm();
  return out;
}

}  // namespace maxns
