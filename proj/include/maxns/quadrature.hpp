#pragma once

// Uniform-grid helpers on [0, pi]: composite-Simpson weights and the
// exponential moment integrals that back the exact variation-of-constants
// time steppers.

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace maxns {

inline constexpr double kPi = 3.14159265358979323846;

// Uniform grid of nx points on [0, pi], endpoints included.  nx >= 2.
Eigen::VectorXd grid_points(int nx);

// Composite-Simpson quadrature weights for that grid.  nx must be odd, >= 3.
Eigen::VectorXd simpson_weights(int nx);

// Weighted discrete L^2 pairing  sum_j w_j f_j conj(g_j).
std::complex<double> weighted_inner(const Eigen::VectorXcd& f,
                                    const Eigen::VectorXcd& g,
                                    const Eigen::VectorXd& w);

// K_m(h, z) = integral_0^h u^m e^{z u} du for m = 0..3.  Uses the upward
// recurrence K_m = (h^m e^{zh} - m K_{m-1})/z away from z h = 0 and a Taylor
// series near it, so the values stay accurate for any |z h|.
std::array<std::complex<double>, 4> exp_moments(double h, std::complex<double> z);

}  // namespace maxns
