#pragma once

// Per-mode controllability machinery: projected (A_n, B_n) pairs for a
// density-slot control, Hautus rank checks, controllability Gramians with
// closed-form entries, exact minimum-energy mode controls and their
// superposition, plus the Tikhonov-regularized control localized on a
// subinterval.

#include "maxns/modal_basis.hpp"
#include "maxns/params.hpp"
#include "maxns/state_space.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace maxns {

// Mode-n dynamics in eigen coordinates: d' = A d + B g(t), where g(t) is the
// coefficient of the unit-norm cosine profile of the control in the density
// slot.  dim = 1 on the mode-0 line (A = 0, B = sqrt(b)); otherwise dim = 3
// with A diagonal for Simple structure and a Jordan block otherwise.
struct ProjectedPair {
  int n = 0;
  int dim = 3;
  RootStructure structure = RootStructure::Simple;
  Eigen::Matrix3cd A = Eigen::Matrix3cd::Zero();
  Eigen::Vector3cd B = Eigen::Vector3cd::Zero();
};

ProjectedPair mode_matrices(const BasisPair& basis, const PhysicalParams& p);
ProjectedPair zero_mode_matrices(const PhysicalParams& p);

// Closed-form e^{tA} (diagonal or Jordan exponential; identity outside the
// active dim x dim block).
Eigen::Matrix3cd mode_exp(const ProjectedPair& pp, double t);

// Hautus test: rank [y I - A, B] = dim at every eigenvalue y of A.  min_sv
// holds the smallest singular value seen at each eigenvalue slot.
struct HautusReport {
  bool ok = false;
  std::array<double, 3> min_sv{};
};
HautusReport hautus_check(const ProjectedPair& pp);

// Controllability Gramian W_T = integral_0^T e^{tA} B B^* e^{tA^*} dt.
// Simple structure uses the closed-form entries
//   W_ij = B_i conj(B_j) (e^{T(y_i + conj y_j)} - 1)/(y_i + conj y_j),
// with the limit value T on resonant denominators; Jordan structures fall
// back to composite-Simpson quadrature of the closed-form integrand.
struct GramianBlock {
  int n = 0;
  int dim = 3;
  double T = 0.0;
  Eigen::Matrix3cd W = Eigen::Matrix3cd::Zero();
  Eigen::Matrix3cd W_inv = Eigen::Matrix3cd::Zero();
  double norm = 0.0;      // largest eigenvalue (Hermitian PD)
  double inv_norm = 0.0;  // 1 / smallest eigenvalue
  double min_eig = 0.0;
};
GramianBlock gramian(const ProjectedPair& pp, double T, int quad_points = 4097);

// Quadrature-only evaluation (the cross-check oracle and the Jordan path).
Eigen::Matrix3cd gramian_quadrature(const ProjectedPair& pp, double T, int points);

// Minimum-energy control of one mode: g(t) = -B^* e^{(T-t)A^*} q with seed
// q = W^{-1} e^{TA} d0.  The closed-form trajectory of the controlled mode is
// d(t) = e^{tA} d0 - X(t) q, X(t) = integral_0^t e^{(t-s)A} B B^* e^{(T-s)A^*} ds.
Eigen::Vector3cd control_seed(const ProjectedPair& pp, const GramianBlock& gb,
                              const Eigen::Vector3cd& d0);
std::complex<double> control_value(const ProjectedPair& pp, const Eigen::Vector3cd& seed,
                                   double T, double t);
Eigen::Matrix3cd controlled_transfer(const ProjectedPair& pp, double T, double t,
                                     int quad_points = 1025);  // X(t)

// Exact forced response integral_a^b e^{(T-s)A} B g(s) ds for g linear on
// [a, b] with g(a) = ga, g(b) = gb (closed form via moment integrals).
Eigen::Vector3cd forced_response(const ProjectedPair& pp, double T, double a, double b,
                                 std::complex<double> ga, std::complex<double> gb);

// A sampled control of the density equation.  Everywhere-supported controls
// carry the coefficients g_n(t_j) of the orthonormal cosine profiles
// (e_0 = 1/sqrt(pi), e_n = sqrt(2/pi) cos nx) plus, when synthesized by
// assemble_control, the exact per-mode seeds.  Localized controls carry a
// tent-function tensor grid on [x_lo, x_hi].
struct ControlSignal {
  double T = 0.0;
  std::vector<double> times;      // sample instants (uniform, 0..T)
  Eigen::MatrixXcd modal_series;  // (n_modes+1) x times.size(); row n = g_n
  std::vector<Eigen::Vector3cd> seeds;  // index n-1
  std::complex<double> seed0{};
  bool has_seeds = false;

  bool localized = false;
  double x_lo = 0.0, x_hi = 0.0;
  std::vector<double> hat_times, hat_nodes;
  Eigen::MatrixXcd hat_weights;  // hat_times.size() x hat_nodes.size()

  int n_modes() const {
    return localized ? -1 : static_cast<int>(modal_series.rows()) - 1;
  }
};

// Pointwise value of a localized control.
std::complex<double> localized_value(const ControlSignal& f, double t, double x);

// Exact cosine-profile coefficient series of a localized control, evaluated
// on its own hat-time grid (the control is piecewise linear in t there).
Eigen::MatrixXcd localized_modal_series(const ControlSignal& f, int n_max,
                                        const PhysicalParams& p);

// L^2((0,T); L^2) energy of the control.  Everywhere signals integrate the
// sampled series (trapezoid in t); localized signals use the exact
// tent-function mass matrices.
double control_energy(const ControlSignal& f);

// Superposition of the per-mode minimum-energy controls steering z0 to zero
// at time T.  mode_energy[n] = Re(q_n^* W_n q_n) is the exact energy spent on
// mode n.
struct NullControlReport {
  ControlSignal signal;
  double energy = 0.0;
  std::vector<double> mode_energy;
  double z0_norm = 0.0;
};
NullControlReport assemble_control(const ModalState& z0, double T,
                                   const PhysicalParams& p,
                                   const std::vector<BasisPair>& bases, int nt = 512);

// Tikhonov-regularized least squares for a control supported on
// (x_lo, x_hi) c (0, pi): tent functions in t and x, exact modal
// input-to-state map on modes 0..n_max, weighted so the residual norm is the
// weighted state-space norm of the projected terminal mismatch.
struct ApproxControlOptions {
  double reg = 1e-8;
  int nt_hats = 64;
  int nx_hats = 16;
  int nt_samples = 512;
};
struct ApproxControlReport {
  ControlSignal signal;
  double terminal_error = 0.0;
  double energy = 0.0;
  double z0_norm = 0.0;
};
ApproxControlReport approx_control(const ModalState& z0, const ModalState& zT,
                                   double x_lo, double x_hi, double T,
                                   const PhysicalParams& p,
                                   const std::vector<BasisPair>& bases,
                                   const ApproxControlOptions& opt = {});

}  // namespace maxns
