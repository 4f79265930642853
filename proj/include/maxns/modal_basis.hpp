#pragma once

// Biorthogonal eigenfamilies per trigonometric mode.  A mode-n element of the
// state space is spanned by (cos nx, sin nx, cos nx) profiles in the
// (density, velocity, stress) slots; this module builds the generator's
// eigenvectors (plus Jordan generalized vectors for Double/Triple structures),
// the adjoint family normalized so <xi_l, xi*_p> = delta_lp in the weighted
// pairing, and the change of basis to the orthonormal trigonometric frame.

#include "maxns/params.hpp"
#include "maxns/spectrum.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace maxns {

// Coefficients of the mode-n profile (rho cos nx, u sin nx, S cos nx); for
// n = 0 the profile is (rho, 0, S) constant in x and u must stay zero.
struct CoefVector {
  int n = 0;
  std::complex<double> rho{}, u{}, S{};
};

// Weighted pairing restricted to one trigonometric mode:
//   b * I(rho rho') + rho_s * I(u u') + (kappa/mu) * I(S S'),
// where I = pi for n = 0 and pi/2 otherwise (integrals of cos^2/sin^2).
// Throws ValidationError if x and y live on different modes.
std::complex<double> pairing(const CoefVector& x, const CoefVector& y,
                             const PhysicalParams& p);

// Unit-norm mode-0 eigenvector (1/sqrt(b pi), 0, 0); it is its own adjoint.
CoefVector xi_zero(const PhysicalParams& p);

// Orthonormal trigonometric frame of the mode-n component: density, velocity
// and stress slots scaled so each has unit weighted norm.
std::array<CoefVector, 3> fourier_frame(int n, const PhysicalParams& p);

// Action of the generator (resp. its adjoint) on mode-n coefficient triples.
Eigen::Matrix3cd coef_generator(int n, const PhysicalParams& p);
Eigen::Matrix3cd coef_generator_adjoint(int n, const PhysicalParams& p);

struct BasisPair {
  ModeSpectrum mode;
  std::array<CoefVector, 3> xi;       // eigen / generalized family
  std::array<CoefVector, 3> xi_star;  // biorthogonal adjoint family
  std::array<std::complex<double>, 3> theta;  // forward normalizers
  std::array<std::complex<double>, 3> psi;    // adjoint normalizers (post-repair)
};

// Builds the eigen/adjoint families for one mode.  Simple structure follows
// the closed-form normalizers; Double/Triple structures use the Jordan-chain
// families.  Throws NumericalError when a normalizer degenerates (an
// eigenvalue within 1e-12 of the relaxation pole, or |psi| below 1e-12 in the
// Simple case — a violated simplicity assumption).
BasisPair build_basis(const ModeSpectrum& m, const PhysicalParams& p);

// Convenience: spectra + bases for modes 1..n_max (index i holds n = i + 1).
std::vector<BasisPair> build_family(int n_max, const PhysicalParams& p);

// Change of basis between trigonometric frame coordinates c and eigen
// coordinates d on one mode: d = from_frame * c with entries <phi_p, xi*_l>,
// and the explicit inverse c = to_frame * d with entries <xi_l, phi_p>.
struct GammaMatrix {
  Eigen::Matrix3cd from_frame;  // frame coords -> eigen coords
  Eigen::Matrix3cd to_frame;    // eigen coords -> frame coords (explicit inverse)
  double norm = 0.0;      // operator 2-norm of from_frame
  double inv_norm = 0.0;  // operator 2-norm of to_frame
};
GammaMatrix gamma_matrix(const BasisPair& basis, const PhysicalParams& p);

// Hermitian Gram matrix of the forward family, G[p][l] = <xi_l, xi_p>; used
// for exact weighted norms of modal coefficient vectors.
Eigen::Matrix3cd xi_gram(const BasisPair& basis, const PhysicalParams& p);

// Pairing table P(l, m) = <xi_l, xi*_m>: closed form (should equal the
// identity) and a composite-Simpson cross-check on nx grid points.
Eigen::Matrix3cd pairing_table(const BasisPair& basis, const PhysicalParams& p);
Eigen::Matrix3cd pairing_table_quadrature(const BasisPair& basis, const PhysicalParams& p,
                                          int nx);

}  // namespace maxns
