#pragma once

// The weighted state space on (0, pi): uniform-grid snapshots of
// (density, velocity, stress), the weighted inner product
//   <z, z'> = b I(rho rho') + rho_s I(u u') + (kappa/mu) I(S S'),
// modal projection / reconstruction through the biorthogonal families, and
// the conserved-mean probes.

#include "maxns/modal_basis.hpp"
#include "maxns/params.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace maxns {

struct GridField {
  Eigen::VectorXcd rho, u, S;

  int nx() const { return static_cast<int>(rho.size()); }
  static GridField zero(int nx);
};

// Composite-Simpson weighted inner product (odd nx required).
std::complex<double> inner_product(const GridField& x, const GridField& y,
                                   const PhysicalParams& p);
double z_norm(const GridField& x, const PhysicalParams& p);

// dst += amount * (profile of c) rendered on the grid xs.
void add_profile(GridField& dst, const CoefVector& c, std::complex<double> amount,
                 const Eigen::VectorXd& xs);

// Eigen-coordinate representation: alpha0 on the mode-0 line plus, for each
// n >= 1, the triple of coefficients along xi_{n,1..3}.  Index i of d holds
// mode n = i + 1.
struct ModalState {
  std::complex<double> alpha0{};
  std::vector<std::array<std::complex<double>, 3>> d;

  int n_max() const { return static_cast<int>(d.size()); }
};

// Quadrature pairings with the adjoint family.  Requires odd nx >= 8 n_max
// so the trigonometric profiles are resolved.
ModalState project(const GridField& x, int n_max, const PhysicalParams& p,
                   const std::vector<BasisPair>& bases);

// alpha0 xi_0 + sum_n sum_l d_{n,l} xi_{n,l} rendered on nx points.
GridField reconstruct(const ModalState& s, int nx, const PhysicalParams& p,
                      const std::vector<BasisPair>& bases);

// Integrals over (0, pi) of density and stress (composite Simpson); the
// uncontrolled flow keeps the first constant and the second proportional
// to e^{-t/kappa}.
struct FieldMeans {
  std::complex<double> rho_integral, S_integral;
};
FieldMeans mean_checks(const GridField& x);

// Exact weighted norm of a modal state through the per-mode Gram matrices.
double modal_z_norm(const ModalState& s, const std::vector<BasisPair>& bases,
                    const PhysicalParams& p);

// Reproducible random state: complex Gaussian coefficients with component
// variance 1/(1 + n^2), drawn in a fixed order from a seeded mt19937_64.
ModalState random_state(int n_max, std::uint64_t seed);

}  // namespace maxns
