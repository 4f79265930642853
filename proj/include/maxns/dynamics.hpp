#pragma once

// Time evolution: exact modal propagation (with or without a density control)
// and a finite-difference RK4 solver for the forward and adjoint systems on a
// collocated uniform grid over [0, pi].

#include "maxns/control.hpp"
#include "maxns/modal_basis.hpp"
#include "maxns/params.hpp"
#include "maxns/state_space.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace maxns {

struct ModalTrajectory {
  std::vector<double> times;
  std::vector<ModalState> states;
};

struct GridTrajectory {
  std::vector<double> times;
  std::vector<GridField> states;
};

// Exact evolution of the modal coefficients under the control f (nullptr for
// free evolution).  Signals with seeds use closed-form controlled transfers;
// sampled or localized signals are integrated cell-exactly against their
// piecewise-linear interpolant via the moment integrals.
ModalTrajectory evolve_modal(const ModalState& z0, const ControlSignal* f, double T,
                             const PhysicalParams& p,
                             const std::vector<BasisPair>& bases, int snapshots = 33);

// Smallest step count satisfying dt <= cfl * dx / c_wave.
int fd_min_steps(double T, int nx, const PhysicalParams& p, double cfl = 0.4);

// Called after every accepted step (including step 0) with the current state.
using StepObserver = std::function<void(int step, double t, const GridField& z)>;

// Forward solve: Dirichlet velocity, density-slot control f (nullptr = free).
// Space: 2nd-order central differences with one-sided 2nd-order closures at
// the endpoints; time: classical RK4.  Throws ValidationError if nt violates
// the CFL bound.
GridTrajectory fd_solve(const GridField& z0, const ControlSignal* f, double T, int nt,
                        const PhysicalParams& p, int snapshots = 33,
                        const StepObserver& observer = {});

// Sources of the adjoint equations, each separable as e^{rate t} * shape(x).
// Empty shape vectors mean a vanishing source.
struct SeparableSource {
  double rate = 0.0;
  Eigen::VectorXcd s_rho, s_u, s_S;
};

using BoundaryFn = std::function<std::complex<double>(double t)>;

// Adjoint solve: velocity boundary data v(t,0) = h0(t), v(t,pi) = hpi(t)
// (empty functions = homogeneous), separable interior sources.
GridTrajectory adjoint_solve(const GridField& q0, const SeparableSource& src,
                             const BoundaryFn& h0, const BoundaryFn& hpi, double T,
                             int nt, const PhysicalParams& p, int snapshots = 33,
                             const StepObserver& observer = {});

}  // namespace maxns
