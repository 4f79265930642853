#pragma once

// Modal spectrum of the generator.  For trigonometric mode n >= 1 the three
// eigenvalue branches are the roots of the cubic
//
//   F_n(y) = y^3 + (1/kappa) y^2 + (mu/(kappa rho_s) + b rho_s) n^2 y
//          + (b rho_s / kappa) n^2,
//
// one real branch converging to omega0 and a conjugate pair whose imaginary
// parts grow like +- n c_wave.

#include "maxns/params.hpp"

#include <array>
#include <complex>
#include <string>

namespace maxns {

enum class RootStructure { Simple, Double, Triple };

const char* to_string(RootStructure s);

// Slot conventions:
//   Simple: lambda[0] = the real root in (-1/kappa, 0) nearest omega0 (ties
//           toward 0); lambda[1] = remaining root with Im >= 0 (larger real
//           part if both are real); lambda[2] = the other.
//   Double: lambda[0] = the simple root, lambda[1] = lambda[2] = the double
//           root (all real).
//   Triple: lambda[0] = lambda[1] = lambda[2] = -1/(3 kappa).
struct ModeSpectrum {
  int n = 0;
  std::array<std::complex<double>, 3> lambda{};
  RootStructure structure = RootStructure::Simple;
};

// F_n evaluated at y (n >= 1).
std::complex<double> charpoly_eval(int n, std::complex<double> y,
                                   const PhysicalParams& p);

// d/dy F_n(y).
std::complex<double> charpoly_deriv(int n, std::complex<double> y,
                                    const PhysicalParams& p);

// Degeneracy indicator q_n(y) = -b + y^2/(rho_s n^2)
//                              - mu kappa y^2 / (rho_s^2 (1 + kappa y)^2).
// A root of F_n is multiple exactly when q_n vanishes on it, so |q_n| also
// measures how close the biorthogonal normalizer psi is to degenerating.
std::complex<double> degeneracy_indicator(int n, std::complex<double> y,
                                          const PhysicalParams& p);

// Companion-matrix roots, Newton polish, cluster refinement onto exact
// stationary points for Double/Triple structures, bisection fallback for the
// real branch.  Throws NumericalError if a root's polynomial residual exceeds
// 1e-9 (1 + n^3) or the real branch cannot be located.
ModeSpectrum solve_mode(int n, const PhysicalParams& p);

// Large-n predictions: lambda1 -> omega0, lambda2/3 ~ -(omega0 + 1/kappa)/2
// +- i n c_wave.
struct AsymptoticRoots {
  std::complex<double> lambda1, lambda2, lambda3;
};
AsymptoticRoots asymptotic_prediction(int n, const PhysicalParams& p);

}  // namespace maxns
