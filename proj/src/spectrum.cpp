#include "maxns/spectrum.hpp"

#include "maxns/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace maxns {

namespace {

using C = std::complex<double>;

// Monic cubic y^3 + c2 y^2 + c1 y + c0.
struct Cubic {
  double c2, c1, c0;
};

Cubic cubic_for_mode(int n, const PhysicalParams& p) {
  const double n2 = double(n) * double(n);
  return {1.0 / p.kappa,
          (p.mu / (p.kappa * p.rho_s) + p.b * p.rho_s) * n2,
          (p.b * p.rho_s / p.kappa) * n2};
}

C eval(const Cubic& c, C y) { return ((y + c.c2) * y + c.c1) * y + c.c0; }
C deriv(const Cubic& c, C y) { return (3.0 * y + 2.0 * c.c2) * y + c.c1; }

C newton_polish(const Cubic& c, C y, int steps) {
  for (int i = 0; i < steps; ++i) {
    const C d = deriv(c, y);
    if (std::abs(d) == 0.0) break;
    y -= eval(c, y) / d;
  }
  return y;
}

// The real branch always exists in (-1/kappa, 0): F(-1/kappa) < 0 < F(0).
double bisect_real_branch(const Cubic& c, double lo, double hi) {
  double flo = eval(c, C(lo, 0.0)).real();
  double fhi = eval(c, C(hi, 0.0)).real();
  if (flo >= 0.0 || fhi <= 0.0)
    throw NumericalError("solve_mode: lost the sign change bracketing the real branch");
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval(c, C(mid, 0.0)).real();
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(RootStructure s) {
  switch (s) {
    case RootStructure::Simple: return "simple";
    case RootStructure::Double: return "double";
    case RootStructure::Triple: return "triple";
  }
  return "?";
}

std::complex<double> charpoly_eval(int n, std::complex<double> y,
                                   const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: mode index must be >= 1");
  return eval(cubic_for_mode(n, p), y);
}

std::complex<double> charpoly_deriv(int n, std::complex<double> y,
                                    const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: mode index must be >= 1");
  return deriv(cubic_for_mode(n, p), y);
}

std::complex<double> degeneracy_indicator(int n, std::complex<double> y,
                                          const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: mode index must be >= 1");
  const double n2 = double(n) * double(n);
  const C pole = 1.0 + p.kappa * y;
  if (std::abs(pole) < 1e-14)
    throw NumericalError("degeneracy_indicator: evaluation at the relaxation pole -1/kappa");
  return -p.b + y * y / (p.rho_s * n2) -
         p.mu * p.kappa * y * y / (p.rho_s * p.rho_s * pole * pole);
}

AsymptoticRoots asymptotic_prediction(int n, const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: mode index must be >= 1");
  const double re = -0.5 * (p.omega0 + 1.0 / p.kappa);
  return {C(p.omega0, 0.0), C(re, n * p.c_wave), C(re, -n * p.c_wave)};
}

ModeSpectrum solve_mode(int n, const PhysicalParams& p) {
  if (n < 1) throw ValidationError("n: mode index must be >= 1");
  const Cubic c = cubic_for_mode(n, p);

  // Companion-matrix eigenvalues of the monic cubic.
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  M(1, 0) = 1.0;
  M(2, 1) = 1.0;
  M(0, 2) = -c.c0;
  M(1, 2) = -c.c1;
  M(2, 2) = -c.c2;
  Eigen::EigenSolver<Eigen::Matrix3d> es(M);
  if (es.info() != Eigen::Success)
    throw NumericalError("solve_mode: companion eigensolver failed at n = " + std::to_string(n));
  std::array<C, 3> r{es.eigenvalues()[0], es.eigenvalues()[1], es.eigenvalues()[2]};

  const double root_scale =
      1.0 + std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
  // Companion roots of an exact triple root carry O(eps^(1/3)) ~ 1e-5 noise,
  // so clusters are detected at that scale and then refined onto exact
  // stationary points of F_n before the final (much tighter) acceptance test.
  const double cluster_tol = 1e-5 * root_scale;
  const double poly_tol = 1e-9 * (1.0 + double(n) * double(n) * double(n));
  const double nn = double(n);
  const double deriv_tol = 1e-7 * (1.0 + nn * nn) * root_scale;

  const auto degenerate_at = [&](double y) {
    return std::abs(degeneracy_indicator(n, C(y, 0.0), p)) < 1e-7;
  };

  ModeSpectrum out;
  out.n = n;

  const double g01 = std::abs(r[0] - r[1]);
  const double g02 = std::abs(r[0] - r[2]);
  const double g12 = std::abs(r[1] - r[2]);
  const double gap_max = std::max({g01, g02, g12});
  const double gap_min = std::min({g01, g02, g12});

  // Triple root: the unique root of F'' is -c2/3 = -1/(3 kappa).
  if (gap_max < cluster_tol) {
    const double yt = -c.c2 / 3.0;
    if (std::abs(eval(c, C(yt, 0.0))) < poly_tol &&
        std::abs(deriv(c, C(yt, 0.0))) < deriv_tol && degenerate_at(yt)) {
      out.structure = RootStructure::Triple;
      out.lambda = {C(yt, 0.0), C(yt, 0.0), C(yt, 0.0)};
      return out;
    }
  }

  // Double root: a real stationary point of F_n that annihilates F_n itself.
  // The remaining simple root follows exactly from the trace.
  if (gap_min < cluster_tol) {
    const double disc = c.c2 * c.c2 - 3.0 * c.c1;
    if (disc >= 0.0) {
      double centroid;
      if (g01 == gap_min)
        centroid = 0.5 * (r[0] + r[1]).real();
      else if (g02 == gap_min)
        centroid = 0.5 * (r[0] + r[2]).real();
      else
        centroid = 0.5 * (r[1] + r[2]).real();
      const double s = std::sqrt(disc);
      const double cand_a = (-c.c2 - s) / 3.0;
      const double cand_b = (-c.c2 + s) / 3.0;
      const double yd =
          std::abs(cand_a - centroid) < std::abs(cand_b - centroid) ? cand_a : cand_b;
      if (std::abs(eval(c, C(yd, 0.0))) < poly_tol && degenerate_at(yd)) {
        const double ys = -c.c2 - 2.0 * yd;
        out.structure = RootStructure::Double;
        out.lambda = {C(ys, 0.0), C(yd, 0.0), C(yd, 0.0)};
        if (std::abs(eval(c, C(ys, 0.0))) > poly_tol)
          throw NumericalError("solve_mode: double-root branch left a bad simple root at n = " +
                               std::to_string(n));
        return out;
      }
    }
  }

  // Simple structure: polish each root, then sort into the slot convention.
  for (auto& y : r) y = newton_polish(c, y, 2);

  const double im_tol = 1e-9 * root_scale;
  const double lo = -1.0 / p.kappa;

  // Real branch: the real root in (-1/kappa, 0) nearest omega0, ties toward 0.
  int i1 = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(r[i].imag()) > im_tol) continue;
    const double x = r[i].real();
    if (x <= lo || x >= 0.0) continue;
    if (i1 < 0) {
      i1 = i;
      continue;
    }
    const double cur = std::abs(r[i1].real() - p.omega0);
    const double alt = std::abs(x - p.omega0);
    if (alt < cur || (alt == cur && x > r[i1].real())) i1 = i;
  }
  if (i1 < 0) {
    // Eigensolver returned no usable real candidate; bisection always works.
    const double y1 = newton_polish(c, C(bisect_real_branch(c, lo, 0.0), 0.0), 2).real();
    // Deflate: remaining quadratic y^2 + (c2 + y1) y + (c1 + y1 (c2 + y1)).
    const double q1 = c.c2 + y1;
    const double q0 = c.c1 + y1 * q1;
    const double disc = q1 * q1 - 4.0 * q0;
    if (disc >= 0.0) {
      r = {C(y1, 0.0), C(0.5 * (-q1 + std::sqrt(disc)), 0.0),
           C(0.5 * (-q1 - std::sqrt(disc)), 0.0)};
    } else {
      r = {C(y1, 0.0), C(-0.5 * q1, 0.5 * std::sqrt(-disc)),
           C(-0.5 * q1, -0.5 * std::sqrt(-disc))};
    }
    i1 = 0;
  }

  out.lambda[0] = C(r[i1].real(), 0.0);
  std::array<C, 2> rest;
  for (int i = 0, k = 0; i < 3; ++i)
    if (i != i1) rest[k++] = r[i];

  if (std::abs(rest[0].imag()) > im_tol || std::abs(rest[1].imag()) > im_tol) {
    // Conjugate pair: symmetrize so pairing is exact to the bit.
    const C m = rest[0].imag() >= 0.0 ? 0.5 * (rest[0] + std::conj(rest[1]))
                                      : 0.5 * (rest[1] + std::conj(rest[0]));
    out.lambda[1] = m;
    out.lambda[2] = std::conj(m);
  } else {
    // Three real roots: slot 1 takes the larger of the remaining two.
    const double x0 = rest[0].real(), x1 = rest[1].real();
    out.lambda[1] = C(std::max(x0, x1), 0.0);
    out.lambda[2] = C(std::min(x0, x1), 0.0);
  }
  out.structure = RootStructure::Simple;

  for (const C& y : out.lambda) {
    if (std::abs(eval(c, y)) > poly_tol)
      throw NumericalError("solve_mode: root residual exceeds 1e-9 (1 + n^3) at n = " +
                           std::to_string(n));
    if (y.real() >= 0.0)
      throw NumericalError("solve_mode: nonnegative real part at n = " + std::to_string(n));
  }
  return out;
}

}  // namespace maxns
