#include "maxns/state_space.hpp"

#include "maxns/errors.hpp"
#include "maxns/quadrature.hpp"

#include <cmath>
#include <random>

namespace maxns {

namespace {
using C = std::complex<double>;
}

GridField GridField::zero(int nx) {
  GridField g;
  g.rho = Eigen::VectorXcd::Zero(nx);
  g.u = Eigen::VectorXcd::Zero(nx);
  g.S = Eigen::VectorXcd::Zero(nx);
  return g;
}

std::complex<double> inner_product(const GridField& x, const GridField& y,
                                   const PhysicalParams& p) {
  if (x.nx() != y.nx()) throw ValidationError("inner_product: grid size mismatch");
  const Eigen::VectorXd w = simpson_weights(x.nx());
  return p.b * weighted_inner(x.rho, y.rho, w) +
         p.rho_s * weighted_inner(x.u, y.u, w) +
         (p.kappa / p.mu) * weighted_inner(x.S, y.S, w);
}

double z_norm(const GridField& x, const PhysicalParams& p) {
  const double v = inner_product(x, x, p).real();
  return std::sqrt(std::max(0.0, v));
}

void add_profile(GridField& dst, const CoefVector& c, std::complex<double> amount,
                 const Eigen::VectorXd& xs) {
  if (dst.nx() != xs.size()) throw ValidationError("add_profile: grid size mismatch");
  const double nn = double(c.n);
  for (Eigen::Index j = 0; j < xs.size(); ++j) {
    const double cn = std::cos(nn * xs[j]);
    const double sn = std::sin(nn * xs[j]);
    dst.rho[j] += amount * c.rho * cn;
    dst.u[j] += amount * c.u * sn;
    dst.S[j] += amount * c.S * cn;
  }
}

ModalState project(const GridField& x, int n_max, const PhysicalParams& p,
                   const std::vector<BasisPair>& bases) {
  if (n_max < 0) throw ValidationError("n_max: must be >= 0");
  if (static_cast<int>(bases.size()) < n_max)
    throw ValidationError("project: basis family shorter than n_max");
  const int nx = x.nx();
  if (nx < 8 * std::max(1, n_max))
    throw ValidationError("project: need nx >= 8 n_max to resolve the profiles");
  const Eigen::VectorXd w = simpson_weights(nx);
  const Eigen::VectorXd xs = grid_points(nx);

  ModalState s;
  s.d.resize(n_max);

  // alpha0 = <x, xi_0> = sqrt(b/pi) * integral of rho.
  C rho_int = 0.0;
  for (int j = 0; j < nx; ++j) rho_int += w[j] * x.rho[j];
  s.alpha0 = std::sqrt(p.b / kPi) * rho_int;

  for (int n = 1; n <= n_max; ++n) {
    C i_rho = 0.0, i_u = 0.0, i_S = 0.0;
    for (int j = 0; j < nx; ++j) {
      const double cn = std::cos(n * xs[j]);
      const double sn = std::sin(n * xs[j]);
      i_rho += w[j] * x.rho[j] * cn;
      i_u += w[j] * x.u[j] * sn;
      i_S += w[j] * x.S[j] * cn;
    }
    const BasisPair& bp = bases[n - 1];
    for (int l = 0; l < 3; ++l) {
      const CoefVector& a = bp.xi_star[l];
      s.d[n - 1][l] = p.b * i_rho * std::conj(a.rho) +
                      p.rho_s * i_u * std::conj(a.u) +
                      (p.kappa / p.mu) * i_S * std::conj(a.S);
    }
  }
  return s;
}

GridField reconstruct(const ModalState& s, int nx, const PhysicalParams& p,
                      const std::vector<BasisPair>& bases) {
  if (static_cast<int>(bases.size()) < s.n_max())
    throw ValidationError("reconstruct: basis family shorter than the state");
  GridField g = GridField::zero(nx);
  const Eigen::VectorXd xs = grid_points(nx);

  const CoefVector x0 = xi_zero(p);
  g.rho.array() += s.alpha0 * x0.rho;

  for (int n = 1; n <= s.n_max(); ++n) {
    // Collapse the three family members into one coefficient triple per mode.
    const BasisPair& bp = bases[n - 1];
    CoefVector acc;
    acc.n = n;
    for (int l = 0; l < 3; ++l) {
      acc.rho += s.d[n - 1][l] * bp.xi[l].rho;
      acc.u += s.d[n - 1][l] * bp.xi[l].u;
      acc.S += s.d[n - 1][l] * bp.xi[l].S;
    }
    add_profile(g, acc, 1.0, xs);
  }
  return g;
}

FieldMeans mean_checks(const GridField& x) {
  const Eigen::VectorXd w = simpson_weights(x.nx());
  FieldMeans m;
  m.rho_integral = 0.0;
  m.S_integral = 0.0;
  for (int j = 0; j < x.nx(); ++j) {
    m.rho_integral += w[j] * x.rho[j];
    m.S_integral += w[j] * x.S[j];
  }
  return m;
}

double modal_z_norm(const ModalState& s, const std::vector<BasisPair>& bases,
                    const PhysicalParams& p) {
  if (static_cast<int>(bases.size()) < s.n_max())
    throw ValidationError("modal_z_norm: basis family shorter than the state");
  double acc = std::norm(s.alpha0);
  for (int n = 1; n <= s.n_max(); ++n) {
    const Eigen::Matrix3cd G = xi_gram(bases[n - 1], p);
    Eigen::Vector3cd d;
    d << s.d[n - 1][0], s.d[n - 1][1], s.d[n - 1][2];
    acc += (d.adjoint() * G * d)(0, 0).real();
  }
  return std::sqrt(std::max(0.0, acc));
}

ModalState random_state(int n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ModalState s;
  s.d.resize(std::max(0, n_max));
  {
    const double sd = std::sqrt(0.5);
    const double re = gauss(rng), im = gauss(rng);
    s.alpha0 = C(sd * re, sd * im);
  }
  for (int n = 1; n <= n_max; ++n) {
    const double sd = std::sqrt(0.5 / (1.0 + double(n) * double(n)));
    for (int l = 0; l < 3; ++l) {
      const double re = gauss(rng), im = gauss(rng);
      s.d[n - 1][l] = C(sd * re, sd * im);
    }
  }
  return s;
}

}  // namespace maxns
