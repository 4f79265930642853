#include "maxns/modal_basis.hpp"

#include "maxns/errors.hpp"
#include "maxns/quadrature.hpp"

#include <cmath>
#include <string>

namespace maxns {

namespace {

using C = std::complex<double>;

// Simple-structure eigenvector for eigenvalue y, scaled by 1/theta.
CoefVector xi_simple(int n, C y, C theta, const PhysicalParams& p) {
  const C pole = 1.0 + p.kappa * y;
  CoefVector v;
  v.n = n;
  v.rho = -1.0 / theta;
  v.u = y / (p.rho_s * double(n) * theta);
  v.S = p.mu * y / (p.rho_s * pole * theta);
  return v;
}

// Simple-structure adjoint eigenvector (eigenvalue conj(y)), scaled by 1/psi.
CoefVector xi_star_simple(int n, C y, C psi, const PhysicalParams& p) {
  const C yb = std::conj(y);
  const C pole = 1.0 + p.kappa * yb;
  CoefVector v;
  v.n = n;
  v.rho = 1.0 / psi;
  v.u = yb / (p.rho_s * double(n) * psi);
  v.S = -p.mu * yb / (p.rho_s * pole * psi);
  return v;
}

double theta_simple(int n, C y, const PhysicalParams& p) {
  const double n2 = double(n) * double(n);
  const double a2 = std::norm(y);
  const double pole2 = std::norm(1.0 + p.kappa * y);
  return std::sqrt((kPi / 2.0) * (p.b + a2 / (p.rho_s * n2) +
                                  p.kappa * p.mu * a2 / (p.rho_s * p.rho_s * pole2)));
}

void guard_pole(C y, const PhysicalParams& p, const char* where) {
  if (std::abs(1.0 + p.kappa * y) < 1e-12)
    throw NumericalError(std::string(where) +
                         ": eigenvalue within 1e-12 of the relaxation pole -1/kappa");
}

}  // namespace

std::complex<double> pairing(const CoefVector& x, const CoefVector& y,
                             const PhysicalParams& p) {
  if (x.n != y.n) throw ValidationError("pairing: vectors live on different modes");
  if (x.n == 0) {
    // The velocity slot integrates sin(0 x) = 0 and drops out.
    return kPi * (p.b * x.rho * std::conj(y.rho) +
                  (p.kappa / p.mu) * x.S * std::conj(y.S));
  }
  const double h = kPi / 2.0;
  return h * (p.b * x.rho * std::conj(y.rho) + p.rho_s * x.u * std::conj(y.u) +
              (p.kappa / p.mu) * x.S * std::conj(y.S));
}

CoefVector xi_zero(const PhysicalParams& p) {
  CoefVector v;
  v.n = 0;
  v.rho = 1.0 / std::sqrt(p.b * kPi);
  return v;
}

std::array<CoefVector, 3> fourier_frame(int n, const PhysicalParams& p) {
  std::array<CoefVector, 3> f{};
  for (auto& v : f) v.n = n;
  if (n == 0) {
    f[0].rho = 1.0 / std::sqrt(p.b * kPi);
    // No constant velocity profile; slot 1 stays zero.
    f[2].S = std::sqrt(p.mu / (p.kappa * kPi));
    return f;
  }
  f[0].rho = std::sqrt(2.0 / (p.b * kPi));
  f[1].u = std::sqrt(2.0 / (p.rho_s * kPi));
  f[2].S = std::sqrt(2.0 * p.mu / (p.kappa * kPi));
  return f;
}

Eigen::Matrix3cd coef_generator(int n, const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: coefficient generator needs n >= 1");
  Eigen::Matrix3cd A = Eigen::Matrix3cd::Zero();
  const double nn = double(n);
  A(0, 1) = -p.rho_s * nn;
  A(1, 0) = p.b * nn;
  A(1, 2) = -nn / p.rho_s;
  A(2, 1) = p.mu * nn / p.kappa;
  A(2, 2) = -1.0 / p.kappa;
  return A;
}

Eigen::Matrix3cd coef_generator_adjoint(int n, const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: coefficient generator needs n >= 1");
  Eigen::Matrix3cd A = Eigen::Matrix3cd::Zero();
  const double nn = double(n);
  A(0, 1) = p.rho_s * nn;
  A(1, 0) = -p.b * nn;
  A(1, 2) = nn / p.rho_s;
  A(2, 1) = -p.mu * nn / p.kappa;
  A(2, 2) = -1.0 / p.kappa;
  return A;
}

BasisPair build_basis(const ModeSpectrum& m, const PhysicalParams& p) {
  if (m.n < 1) throw ValidationError("build_basis: mode index must be >= 1");
  BasisPair out;
  out.mode = m;
  const int n = m.n;
  const double n2 = double(n) * double(n);

  switch (m.structure) {
    case RootStructure::Simple: {
      for (int l = 0; l < 3; ++l) {
        const C y = m.lambda[l];
        guard_pole(y, p, "build_basis");
        const double theta = theta_simple(n, y, p);
        out.theta[l] = theta;
        out.xi[l] = xi_simple(n, y, theta, p);

        const C q = degeneracy_indicator(n, y, p);
        C psi = (kPi / 2.0) * std::conj(q) / theta;
        if (std::abs(psi) < 1e-12)
          throw NumericalError(
              "build_basis: adjoint normalizer psi degenerated at n = " + std::to_string(n) +
              " (simplicity violated)");
        CoefVector xs = xi_star_simple(n, y, psi, p);
        // Repair the diagonal pairing to exactly 1 (analytically it already
        // is; this removes the last few ulps for downstream products).
        const C pr = pairing(out.xi[l], xs, p);
        if (std::abs(pr - 1.0) > 1e-6)
          throw NumericalError("build_basis: biorthogonality defect at n = " +
                               std::to_string(n));
        const C fix = std::conj(pr);
        xs.rho /= fix;
        xs.u /= fix;
        xs.S /= fix;
        psi *= fix;
        out.xi_star[l] = xs;
        out.psi[l] = psi;
      }
      break;
    }

    case RootStructure::Double: {
      // Slot 0 carries the simple root and keeps the Simple-structure family.
      const C y1 = m.lambda[0];
      guard_pole(y1, p, "build_basis");
      const double th1 = theta_simple(n, y1, p);
      out.theta[0] = th1;
      out.xi[0] = xi_simple(n, y1, th1, p);
      const C q1 = degeneracy_indicator(n, y1, p);
      C psi1 = (kPi / 2.0) * std::conj(q1) / th1;
      if (std::abs(psi1) < 1e-12)
        throw NumericalError("build_basis: simple-slot normalizer degenerated at n = " +
                             std::to_string(n));
      out.xi_star[0] = xi_star_simple(n, y1, psi1, p);
      out.psi[0] = psi1;

      // Slots 1, 2: eigenvector + Jordan generalized vector at the double root.
      const double y = m.lambda[1].real();
      guard_pole(y, p, "build_basis");
      const double pole = 1.0 + p.kappa * y;
      const double th2 = theta_simple(n, y, p);
      out.theta[1] = out.theta[2] = th2;
      out.xi[1] = xi_simple(n, y, th2, p);

      const double pole2 = pole * pole;
      const double pole3 = pole2 * pole;
      const double pole4 = pole2 * pole2;
      const double y3 = y * y * y;
      const double y4 = y3 * y;
      const double rs2 = p.rho_s * p.rho_s;
      const double cn_num = p.b * rs2 * pole4 + p.mu * p.kappa * p.kappa * p.kappa * y4;
      const double cn_den = y * pole * (p.b * rs2 * pole3 + p.mu * p.kappa * p.kappa * y3);
      if (std::abs(cn_den) < 1e-300)
        throw NumericalError("build_basis: generalized-vector scale degenerated at n = " +
                             std::to_string(n));
      const double cn = cn_num / cn_den;

      CoefVector x3;
      x3.n = n;
      x3.rho = (cn - 1.0 / y) / th2;
      x3.u = -cn * y / (p.rho_s * double(n) * th2);
      x3.S = p.mu * y * (p.kappa - cn * pole) / (p.rho_s * pole2 * th2);
      out.xi[2] = x3;

      const double psi2 =
          -(kPi / (2.0 * th2)) * (p.b / y + p.mu * p.kappa * p.kappa * y * y / (rs2 * pole3));
      if (std::abs(psi2) < 1e-12)
        throw NumericalError("build_basis: double-root normalizer degenerated at n = " +
                             std::to_string(n));
      out.psi[1] = out.psi[2] = psi2;

      CoefVector s2;
      s2.n = n;
      s2.rho = 1.0 / (y * psi2);
      s2.u = 0.0;
      s2.S = -p.mu * p.kappa * y / (p.rho_s * pole2 * psi2);
      out.xi_star[1] = s2;

      CoefVector s3;
      s3.n = n;
      s3.rho = 1.0 / psi2;
      s3.u = y / (p.rho_s * double(n) * psi2);
      s3.S = -p.mu * y / (p.rho_s * pole * psi2);
      out.xi_star[2] = s3;
      break;
    }

    case RootStructure::Triple: {
      const double y = m.lambda[0].real();  // -1/(3 kappa)
      guard_pole(y, p, "build_basis");
      const double k = p.kappa;
      const double rs = p.rho_s;
      const double nn = double(n);
      const double theta = std::sqrt(3.0 * kPi * p.b);
      const double psi = -27.0 * p.b * k * k * kPi / (4.0 * theta);
      out.theta = {theta, theta, theta};
      out.psi = {psi, psi, psi};

      auto mk = [n](double r, double u, double S, double scale) {
        CoefVector v;
        v.n = n;
        v.rho = r / scale;
        v.u = u / scale;
        v.S = S / scale;
        return v;
      };
      out.xi[0] = mk(-1.0, -1.0 / (3.0 * k * rs * nn), -p.mu / (2.0 * k * rs), theta);
      out.xi[1] = mk(1.5 * k, -1.0 / (2.0 * rs * nn), -1.5 * p.mu / rs, theta);
      out.xi[2] = mk(-27.0 * k * k / 4.0, -3.0 * k / (4.0 * rs * nn),
                     -27.0 * p.mu * k / (8.0 * rs), theta);
      out.xi_star[0] = mk(9.0 * k * k / 4.0, 9.0 * k / (4.0 * rs * nn),
                          -9.0 * p.mu * k / (4.0 * rs), psi);
      out.xi_star[1] = mk(-3.0 * k, 0.0, 0.75 * p.mu / rs, psi);
      out.xi_star[2] = mk(1.0, -1.0 / (3.0 * k * rs * nn), p.mu / (2.0 * k * rs), psi);
      break;
    }
  }

  // Jordan families come straight from closed forms; guard their pairing.
  if (m.structure != RootStructure::Simple) {
    for (int l = 0; l < 3; ++l)
      for (int q = 0; q < 3; ++q) {
        const C pr = pairing(out.xi[l], out.xi_star[q], p);
        const C want = (l == q) ? C(1.0, 0.0) : C(0.0, 0.0);
        if (std::abs(pr - want) > 1e-8)
          throw NumericalError("build_basis: Jordan family lost biorthonormality at n = " +
                               std::to_string(n));
      }
  }

  (void)n2;
  return out;
}

std::vector<BasisPair> build_family(int n_max, const PhysicalParams& p) {
  if (n_max < 0) throw ValidationError("n_max: must be >= 0");
  std::vector<BasisPair> out;
  out.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) out.push_back(build_basis(solve_mode(n, p), p));
  return out;
}

GammaMatrix gamma_matrix(const BasisPair& basis, const PhysicalParams& p) {
  const auto frame = fourier_frame(basis.mode.n, p);
  GammaMatrix g;
  for (int l = 0; l < 3; ++l)
    for (int q = 0; q < 3; ++q) {
      g.from_frame(l, q) = pairing(frame[q], basis.xi_star[l], p);
      g.to_frame(q, l) = pairing(basis.xi[l], frame[q], p);
    }
  g.norm = g.from_frame.jacobiSvd().singularValues()(0);
  g.inv_norm = g.to_frame.jacobiSvd().singularValues()(0);
  return g;
}

Eigen::Matrix3cd xi_gram(const BasisPair& basis, const PhysicalParams& p) {
  Eigen::Matrix3cd G;
  for (int l = 0; l < 3; ++l)
    for (int q = 0; q < 3; ++q) G(q, l) = pairing(basis.xi[l], basis.xi[q], p);
  return G;
}

Eigen::Matrix3cd pairing_table(const BasisPair& basis, const PhysicalParams& p) {
  Eigen::Matrix3cd P;
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m) P(l, m) = pairing(basis.xi[l], basis.xi_star[m], p);
  return P;
}

Eigen::Matrix3cd pairing_table_quadrature(const BasisPair& basis, const PhysicalParams& p,
                                          int nx) {
  const Eigen::VectorXd xs = grid_points(nx);
  const Eigen::VectorXd w = simpson_weights(nx);
  const int n = basis.mode.n;
  double icc = 0.0, iss = 0.0;  // quadrature values of the profile overlaps
  for (int i = 0; i < nx; ++i) {
    const double c = std::cos(n * xs(i));
    const double s = std::sin(n * xs(i));
    icc += w(i) * c * c;
    iss += w(i) * s * s;
  }
  Eigen::Matrix3cd P;
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m) {
      const CoefVector& x = basis.xi[static_cast<size_t>(l)];
      const CoefVector& y = basis.xi_star[static_cast<size_t>(m)];
      P(l, m) = p.b * x.rho * std::conj(y.rho) * icc +
                p.rho_s * x.u * std::conj(y.u) * iss +
                (p.kappa / p.mu) * x.S * std::conj(y.S) * icc;
    }
  return P;
}

}  // namespace maxns
