#include "maxns/params.hpp"

#include "maxns/errors.hpp"
#include "maxns/quadrature.hpp"

#include <cmath>

namespace maxns {

namespace {

void require_positive(double v, const char* field) {
  if (!std::isfinite(v) || v <= 0.0)
    throw ValidationError(std::string(field) + ": must be a positive finite number");
}

}  // namespace

PhysicalParams derive_constants(double rho_s, double a, double gamma, double mu,
                                double kappa) {
  require_positive(rho_s, "params.rho_s");
  require_positive(a, "params.a");
  require_positive(gamma, "params.gamma");
  require_positive(mu, "params.mu");
  require_positive(kappa, "params.kappa");

  PhysicalParams p;
  p.rho_s = rho_s;
  p.a = a;
  p.gamma = gamma;
  p.mu = mu;
  p.kappa = kappa;

  p.b = a * gamma * std::pow(rho_s, gamma - 2.0);
  p.omega0 = -p.b * rho_s * rho_s / (mu + kappa * p.b * rho_s * rho_s);
  p.c_wave = std::sqrt(p.b * rho_s + mu / (kappa * rho_s));
  p.T_star = 4.0 * kPi / p.c_wave;

  require_positive(p.b, "params.b");  // guards pow() overflow for extreme gamma
  return p;
}

PhysicalParams reference_params() { return derive_constants(1.0, 1.0, 1.0, 1.0, 1.0); }

}  // namespace maxns
