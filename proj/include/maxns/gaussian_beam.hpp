#pragma once

// Gaussian-beam quasi-solutions of the adjoint system: a frequency-k wave
// packet launched along the zero-group-velocity branch, concentrated near x0
// by a smooth bump, decaying like e^{omega0 t}.  Provides the packet fields,
// the residual they leave in the adjoint equations, concentration and decay
// diagnostics, and the observability-quotient experiment that drives the
// corrected packet through the finite-difference adjoint solver.

#include "maxns/dynamics.hpp"
#include "maxns/params.hpp"
#include "maxns/state_space.hpp"

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace maxns {

struct BeamFamily {
  double k = 0.0;       // frequency parameter (>= 1)
  double x0 = 0.0;      // packet center
  double r = 0.0;       // bump radius; support [x0-r, x0+r] inside (0, pi)
  double amplitude = 1.0;
  PhysicalParams p;
};

BeamFamily build_beam(double k, double x0, double r, const PhysicalParams& p,
                      double amplitude = 1.0);

// Smooth bump zeta (1 at x0, supported on |x-x0| < r) and its derivative.
double beam_bump(const BeamFamily& beam, double x);
double beam_bump_deriv(const BeamFamily& beam, double x);

// Packet fields (sigma_k, v_k, S_k) at time t on the nodes xs.  Every field
// factors as e^{omega0 t} times a t-independent shape.
GridField beam_fields(const BeamFamily& beam, double t, const Eigen::VectorXd& xs);

// Residual the packet leaves in the adjoint equations.  The density and
// stress slots vanish identically; only the velocity slot survives and it is
// returned (again e^{omega0 t} times a fixed shape).
Eigen::VectorXcd beam_residual(const BeamFamily& beam, double t, const Eigen::VectorXd& xs);

struct BeamIntegrals {
  double sigma_sq = 0.0;   // integral over (0,pi) of |sigma_k|^2
  double v_sq = 0.0;       // same for the velocity slot
  double stress_sq = 0.0;  // same for the stress slot
  double sigma_tail = 0.0; // |sigma_k|^2 mass outside |x-x0| <= k^{-1/4}
  std::complex<double> sigma_mean;   // integral of sigma_k
  std::complex<double> stress_mean;  // integral of S_k
};
BeamIntegrals beam_integrals(const BeamFamily& beam, double t, int nx = 4097);

// L^2 norm of the residual (velocity slot) at time t.
double beam_residual_norm(const BeamFamily& beam, double t, int nx = 4097);

// Observation windows (a, b) in (0, pi) for the three slots.
struct ObservationWindows {
  std::pair<double, double> density{0.0, 0.0};
  std::pair<double, double> velocity{0.0, 0.0};
  std::pair<double, double> stress{0.0, 0.0};
};

// Drive the packet plus its finite-difference correction over [0, T] and
// form the quotient N(k)/D(k) of terminal energy to windowed observation.
struct BeamExperimentReport {
  double k = 0.0;
  int nx = 0, nt = 0;
  double terminal_energy = 0.0;    // N(k): full-domain terminal L^2 energy
  double observed_energy = 0.0;    // D(k): windowed space-time observation
  double quotient = 0.0;           // N/D
  double residual_norm0 = 0.0;     // residual L^2 norm at t = 0
  double correction_norm = 0.0;    // max_t weighted norm of the correction
  double sigma_sq_T = 0.0;         // terminal |sigma|^2 mass
  double sigma_tail_T = 0.0;       // terminal tail mass
  double sigma_mean_max = 0.0;     // max_t |integral sigma_k| (fine grid)
  double stress_mean_max = 0.0;
};
BeamExperimentReport observability_experiment(const BeamFamily& beam,
                                              const ObservationWindows& windows,
                                              double T, int nx = 0, int nt = 0,
                                              int snapshots = 9);

}  // namespace maxns
