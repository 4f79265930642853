#pragma once

// Material/steady-state constants of the linearized isothermal flow model with
// stress relaxation, together with the derived quantities every other module
// consumes.

namespace maxns {

struct PhysicalParams {
  // Raw constants (all strictly positive):
  double rho_s = 1.0;   // background density
  double a = 1.0;       // pressure scale, p(rho) = a rho^gamma
  double gamma = 1.0;   // adiabatic exponent
  double mu = 1.0;      // viscosity
  double kappa = 1.0;   // stress relaxation time

  // Derived constants:
  double b = 1.0;       // a * gamma * rho_s^(gamma - 2)
  double omega0 = 0.0;  // -b rho_s^2 / (mu + kappa b rho_s^2), low-mode decay rate
  double c_wave = 0.0;  // sqrt(b rho_s + mu / (kappa rho_s)), asymptotic wave speed
  double T_star = 0.0;  // 4 pi / c_wave, critical time horizon
};

// Validates the raw constants (finite and > 0; throws ValidationError naming
// the field, e.g. "params.kappa: must be a positive finite number") and fills
// in the derived block.
PhysicalParams derive_constants(double rho_s, double a, double gamma, double mu,
                                double kappa);

// Reference configuration: every raw constant equal to 1.  There b = 1,
// omega0 = -1/2, c_wave = sqrt(2), T_star = 2 sqrt(2) pi.
PhysicalParams reference_params();

}  // namespace maxns
