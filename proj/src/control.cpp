#include "maxns/control.hpp"

#include "maxns/errors.hpp"
#include "maxns/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace maxns {

namespace {

using Cplx = std::complex<double>;

// (e^{z t} - 1)/z with the resonant limit t.
Cplx phi_div(Cplx z, double t) {
  if (std::abs(z) < 1e-12) return Cplx(t, 0.0);
  return (std::exp(z * t) - 1.0) / z;
}

// Simpson weights for [0, len] with `points` samples (points odd, >= 3).
std::vector<double> simpson_on(double len, int points) {
  if (points < 3 || points % 2 == 0)
    throw ValidationError("quadrature points must be odd and >= 3");
  const double h = len / (points - 1);
  std::vector<double> w(points, h / 3.0);
  for (int j = 1; j + 1 < points; ++j) w[j] *= (j % 2 == 1) ? 4.0 : 2.0;
  return w;
}

Eigen::Matrix2cd nilpotent2() {
  Eigen::Matrix2cd N = Eigen::Matrix2cd::Zero();
  N(0, 1) = -1.0;
  return N;
}

Eigen::Matrix3cd nilpotent3() {
  Eigen::Matrix3cd N = Eigen::Matrix3cd::Zero();
  N(0, 1) = -1.0;
  N(1, 2) = -1.0;
  return N;
}

}  // namespace

Eigen::Vector3cd forced_response(const ProjectedPair& pp, double T, double a, double b,
                                 std::complex<double> ha, std::complex<double> hb) {
  Eigen::Vector3cd out = Eigen::Vector3cd::Zero();
  const double L = b - a;
  if (L <= 0.0) return out;
  const Cplx sl = (hb - ha) / L;
  if (pp.structure == RootStructure::Simple || pp.dim == 1) {
    for (int i = 0; i < pp.dim; ++i) {
      const Cplx lam = pp.A(i, i);
      const auto K = exp_moments(L, -lam);
      out(i) = std::exp(lam * (T - a)) * pp.B(i) * (ha * K[0] + sl * K[1]);
    }
    return out;
  }
  if (pp.structure == RootStructure::Double) {
    {
      const Cplx lam = pp.A(0, 0);
      const auto K = exp_moments(L, -lam);
      out(0) = std::exp(lam * (T - a)) * pp.B(0) * (ha * K[0] + sl * K[1]);
    }
    const Cplx lam = pp.A(1, 1);
    const auto K = exp_moments(L, -lam);
    const Eigen::Matrix2cd N = nilpotent2();
    const Eigen::Matrix2cd C0 = Eigen::Matrix2cd::Identity() + (T - a) * N;
    const Eigen::Matrix2cd C1 = -N;
    const Eigen::Vector2cd Bb = pp.B.segment<2>(1);
    Eigen::Vector2cd blk = C0 * Bb * (ha * K[0] + sl * K[1]) + C1 * Bb * (ha * K[1] + sl * K[2]);
    out.segment<2>(1) = std::exp(lam * (T - a)) * blk;
    return out;
  }
  const Cplx lam = pp.A(0, 0);
  const auto K = exp_moments(L, -lam);
  const Eigen::Matrix3cd N = nilpotent3();
  const Eigen::Matrix3cd N2 = N * N;
  const double x = T - a;
  const Eigen::Matrix3cd C0 = Eigen::Matrix3cd::Identity() + x * N + 0.5 * x * x * N2;
  const Eigen::Matrix3cd C1 = -(N + x * N2);
  const Eigen::Matrix3cd C2 = 0.5 * N2;
  Eigen::Vector3cd acc = C0 * pp.B * (ha * K[0] + sl * K[1]);
  acc += C1 * pp.B * (ha * K[1] + sl * K[2]);
  acc += C2 * pp.B * (ha * K[2] + sl * K[3]);
  return std::exp(lam * x) * acc;
}

namespace {

// Tent-function geometry of a localized signal.
double tent_value(double x, double center, double half_width) {
  const double s = std::abs(x - center) / half_width;
  return s >= 1.0 ? 0.0 : 1.0 - s;
}

// integral of tent(center, dx) * cos(n x): Fejer-kernel closed form.
double tent_cos_integral(double center, double dx, int n) {
  if (n == 0) return dx;
  const double nd = n * dx;
  return 2.0 * (1.0 - std::cos(nd)) * std::cos(n * center) / (double(n) * n * dx);
}

// Tent mass matrix on nodes t_i = i*dt (i = 0..m-1); `clipped` marks the
// boundary tents as half-tents (time grid), otherwise all tents are full
// (interior space nodes).
Eigen::MatrixXd tent_mass(int m, double dt, bool clipped) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double diag = 2.0 * dt / 3.0;
    if (clipped && (i == 0 || i == m - 1)) diag = dt / 3.0;
    M(i, i) = diag;
    if (i + 1 < m) M(i, i + 1) = M(i + 1, i) = dt / 6.0;
  }
  return M;
}

}  // namespace

ProjectedPair mode_matrices(const BasisPair& basis, const PhysicalParams& p) {
  ProjectedPair pp;
  pp.n = basis.mode.n;
  pp.dim = 3;
  pp.structure = basis.mode.structure;
  switch (basis.mode.structure) {
    case RootStructure::Simple:
      for (int l = 0; l < 3; ++l) pp.A(l, l) = basis.mode.lambda[l];
      break;
    case RootStructure::Double:
      pp.A(0, 0) = basis.mode.lambda[0];
      pp.A(1, 1) = pp.A(2, 2) = basis.mode.lambda[1];
      pp.A(1, 2) = -1.0;
      break;
    case RootStructure::Triple:
      pp.A(0, 0) = pp.A(1, 1) = pp.A(2, 2) = basis.mode.lambda[0];
      pp.A(0, 1) = pp.A(1, 2) = -1.0;
      break;
  }
  const double scale = p.b * std::sqrt(kPi / 2.0);
  for (int l = 0; l < 3; ++l) pp.B(l) = scale * std::conj(basis.xi_star[l].rho);
  return pp;
}

ProjectedPair zero_mode_matrices(const PhysicalParams& p) {
  ProjectedPair pp;
  pp.n = 0;
  pp.dim = 1;
  pp.structure = RootStructure::Simple;
  pp.A.setZero();
  pp.B.setZero();
  pp.B(0) = std::sqrt(p.b);
  return pp;
}

Eigen::Matrix3cd mode_exp(const ProjectedPair& pp, double t) {
  Eigen::Matrix3cd E = Eigen::Matrix3cd::Identity();
  if (pp.dim == 1) return E;  // A = 0 on the mode-0 line
  switch (pp.structure) {
    case RootStructure::Simple:
      for (int l = 0; l < 3; ++l) E(l, l) = std::exp(pp.A(l, l) * t);
      break;
    case RootStructure::Double: {
      E(0, 0) = std::exp(pp.A(0, 0) * t);
      const Cplx e2 = std::exp(pp.A(1, 1) * t);
      E(1, 1) = E(2, 2) = e2;
      E(1, 2) = -t * e2;
      break;
    }
    case RootStructure::Triple: {
      const Cplx e = std::exp(pp.A(0, 0) * t);
      E(0, 0) = E(1, 1) = E(2, 2) = e;
      E(0, 1) = E(1, 2) = -t * e;
      E(0, 2) = 0.5 * t * t * e;
      break;
    }
  }
  return E;
}

HautusReport hautus_check(const ProjectedPair& pp) {
  HautusReport rep;
  rep.ok = true;
  const int d = pp.dim;
  const double scale = std::max(1.0, pp.A.topLeftCorner(d, d).norm());
  for (int l = 0; l < d; ++l) {
    const Cplx y = pp.A(l, l);
    Eigen::MatrixXcd M(d, d + 1);
    M.leftCols(d) = y * Eigen::MatrixXcd::Identity(d, d) - pp.A.topLeftCorner(d, d);
    M.col(d) = pp.B.head(d);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const double sv = svd.singularValues()(d - 1);
    rep.min_sv[static_cast<size_t>(l)] = sv;
    if (!(sv > 1e-10 * scale)) rep.ok = false;
  }
  return rep;
}

Eigen::Matrix3cd gramian_quadrature(const ProjectedPair& pp, double T, int points) {
  const auto w = simpson_on(T, points);
  const double h = T / (points - 1);
  Eigen::Matrix3cd W = Eigen::Matrix3cd::Zero();
  const int d = pp.dim;
  for (int j = 0; j < points; ++j) {
    const double t = j * h;
    const Eigen::Vector3cd x = mode_exp(pp, t) * pp.B;
    W.topLeftCorner(d, d) += w[j] * (x.head(d) * x.head(d).adjoint());
  }
  return W;
}

GramianBlock gramian(const ProjectedPair& pp, double T, int quad_points) {
  if (!(T > 0.0)) throw ValidationError("gramian: horizon T must be positive");
  GramianBlock gb;
  gb.n = pp.n;
  gb.dim = pp.dim;
  gb.T = T;
  const int d = pp.dim;
  if (pp.structure == RootStructure::Simple || d == 1) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Cplx z = pp.A(i, i) + std::conj(pp.A(j, j));
        gb.W(i, j) = pp.B(i) * std::conj(pp.B(j)) * phi_div(z, T);
      }
  } else {
    gb.W = gramian_quadrature(pp, T, quad_points);
  }
  // Symmetrize away rounding asymmetry before factorizing.
  gb.W.topLeftCorner(d, d) =
      0.5 * (gb.W.topLeftCorner(d, d) + gb.W.topLeftCorner(d, d).adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gb.W.topLeftCorner(d, d));
  const double emin = es.eigenvalues()(0);
  const double emax = es.eigenvalues()(d - 1);
  gb.min_eig = emin;
  gb.norm = emax;
  if (!(emin > 1e-15 * std::max(1.0, emax)))
    throw NumericalError("gramian: mode " + std::to_string(pp.n) +
                         " Gramian is singular to working precision");
  gb.inv_norm = 1.0 / emin;
  Eigen::MatrixXcd inv = es.eigenvectors() *
                         es.eigenvalues().cwiseInverse().asDiagonal() *
                         es.eigenvectors().adjoint();
  gb.W_inv.setZero();
  gb.W_inv.topLeftCorner(d, d) = inv;
  return gb;
}

Eigen::Vector3cd control_seed(const ProjectedPair& pp, const GramianBlock& gb,
                              const Eigen::Vector3cd& d0) {
  const int d = pp.dim;
  Eigen::Vector3cd q = Eigen::Vector3cd::Zero();
  q.head(d) = gb.W_inv.topLeftCorner(d, d) *
              (mode_exp(pp, gb.T).topLeftCorner(d, d) * d0.head(d));
  return q;
}

std::complex<double> control_value(const ProjectedPair& pp, const Eigen::Vector3cd& seed,
                                   double T, double t) {
  const int d = pp.dim;
  const Eigen::VectorXcd y =
      mode_exp(pp, T - t).topLeftCorner(d, d).adjoint() * seed.head(d);
  return -pp.B.head(d).dot(y);
}

Eigen::Matrix3cd controlled_transfer(const ProjectedPair& pp, double T, double t,
                                     int quad_points) {
  Eigen::Matrix3cd X = Eigen::Matrix3cd::Zero();
  const int d = pp.dim;
  if (t <= 0.0) return X;
  if (pp.structure == RootStructure::Simple || d == 1) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Cplx lj = std::conj(pp.A(j, j));
        X(i, j) = pp.B(i) * std::conj(pp.B(j)) * std::exp(lj * (T - t)) *
                  phi_div(pp.A(i, i) + lj, t);
      }
    return X;
  }
  const auto w = simpson_on(t, quad_points);
  const double h = t / (quad_points - 1);
  for (int j = 0; j < quad_points; ++j) {
    const double s = j * h;
    const Eigen::Vector3cd a = mode_exp(pp, t - s) * pp.B;
    const Eigen::Vector3cd b = mode_exp(pp, T - s) * pp.B;
    X.topLeftCorner(d, d) += w[j] * (a.head(d) * b.head(d).adjoint());
  }
  return X;
}

std::complex<double> localized_value(const ControlSignal& f, double t, double x) {
  if (!f.localized) throw ValidationError("localized_value: signal is not localized");
  const int nt = static_cast<int>(f.hat_times.size());
  const int nx = static_cast<int>(f.hat_nodes.size());
  if (nt < 2 || nx < 1) return 0.0;
  const double dt = f.hat_times[1] - f.hat_times[0];
  const double dx = nx > 1 ? f.hat_nodes[1] - f.hat_nodes[0]
                           : (f.x_hi - f.x_lo) / 2.0;
  double tc = std::clamp(t, 0.0, f.T);
  int k = std::clamp(static_cast<int>(tc / dt), 0, nt - 2);
  const double th = (tc - f.hat_times[static_cast<size_t>(k)]) / dt;
  Cplx val = 0.0;
  for (int j = 0; j < nx; ++j) {
    const double chi = tent_value(x, f.hat_nodes[static_cast<size_t>(j)], dx);
    if (chi == 0.0) continue;
    val += ((1.0 - th) * f.hat_weights(k, j) + th * f.hat_weights(k + 1, j)) * chi;
  }
  return val;
}

Eigen::MatrixXcd localized_modal_series(const ControlSignal& f, int n_max,
                                        const PhysicalParams& p) {
  (void)p;
  if (!f.localized) throw ValidationError("localized_modal_series: signal is not localized");
  const int nt = static_cast<int>(f.hat_times.size());
  const int nx = static_cast<int>(f.hat_nodes.size());
  const double dx = nx > 1 ? f.hat_nodes[1] - f.hat_nodes[0]
                           : (f.x_hi - f.x_lo) / 2.0;
  Eigen::MatrixXcd series = Eigen::MatrixXcd::Zero(n_max + 1, nt);
  for (int n = 0; n <= n_max; ++n) {
    const double profile_norm = n == 0 ? 1.0 / std::sqrt(kPi) : std::sqrt(2.0 / kPi);
    for (int j = 0; j < nx; ++j) {
      const double c = profile_norm *
                       tent_cos_integral(f.hat_nodes[static_cast<size_t>(j)], dx, n);
      for (int i = 0; i < nt; ++i) series(n, i) += c * f.hat_weights(i, j);
    }
  }
  return series;
}

double control_energy(const ControlSignal& f) {
  if (f.localized) {
    const int nt = static_cast<int>(f.hat_times.size());
    const int nx = static_cast<int>(f.hat_nodes.size());
    if (nt < 2 || nx < 1) return 0.0;
    const double dt = f.hat_times[1] - f.hat_times[0];
    const double dx = nx > 1 ? f.hat_nodes[1] - f.hat_nodes[0]
                             : (f.x_hi - f.x_lo) / 2.0;
    const Eigen::MatrixXd Mt = tent_mass(nt, dt, true);
    const Eigen::MatrixXd Mx = tent_mass(nx, dx, false);
    const Eigen::MatrixXcd tmp = Mt * f.hat_weights * Mx;
    return f.hat_weights.conjugate().cwiseProduct(tmp).sum().real();
  }
  const int m = static_cast<int>(f.times.size());
  if (m < 2) return 0.0;
  const double dt = f.T / (m - 1);
  double e = 0.0;
  for (int j = 0; j < m; ++j) {
    const double s = f.modal_series.col(j).squaredNorm();
    e += (j == 0 || j == m - 1) ? 0.5 * s : s;
  }
  return e * dt;
}

NullControlReport assemble_control(const ModalState& z0, double T,
                                   const PhysicalParams& p,
                                   const std::vector<BasisPair>& bases, int nt) {
  if (!(T > 0.0)) throw ValidationError("control.T: horizon must be positive");
  if (nt < 2) throw ValidationError("control.nt: need at least 2 sample intervals");
  const int n_max = z0.n_max();
  if (static_cast<int>(bases.size()) < n_max)
    throw ValidationError("assemble_control: basis family does not cover the state");

  NullControlReport rep;
  rep.z0_norm = modal_z_norm(z0, bases, p);
  rep.mode_energy.assign(static_cast<size_t>(n_max) + 1, 0.0);

  ControlSignal& sig = rep.signal;
  sig.T = T;
  sig.times.resize(static_cast<size_t>(nt) + 1);
  for (int j = 0; j <= nt; ++j) sig.times[static_cast<size_t>(j)] = T * j / nt;
  sig.modal_series = Eigen::MatrixXcd::Zero(n_max + 1, nt + 1);
  sig.seeds.assign(static_cast<size_t>(n_max), Eigen::Vector3cd::Zero());
  sig.has_seeds = true;

  {
    const ProjectedPair pp0 = zero_mode_matrices(p);
    const GramianBlock gb0 = gramian(pp0, T);
    Eigen::Vector3cd d0 = Eigen::Vector3cd::Zero();
    d0(0) = z0.alpha0;
    const Eigen::Vector3cd q = control_seed(pp0, gb0, d0);
    sig.seed0 = q(0);
    for (int j = 0; j <= nt; ++j)
      sig.modal_series(0, j) = control_value(pp0, q, T, sig.times[static_cast<size_t>(j)]);
    rep.mode_energy[0] =
        (q.head(1).adjoint() * gb0.W.topLeftCorner(1, 1) * q.head(1))(0).real();
  }

  for (int n = 1; n <= n_max; ++n) {
    const BasisPair& basis = bases[static_cast<size_t>(n - 1)];
    if (basis.mode.n != n)
      throw ValidationError("assemble_control: basis family is not indexed by mode");
    const ProjectedPair pp = mode_matrices(basis, p);
    const GramianBlock gb = gramian(pp, T);
    Eigen::Vector3cd d0;
    for (int l = 0; l < 3; ++l) d0(l) = z0.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)];
    const Eigen::Vector3cd q = control_seed(pp, gb, d0);
    sig.seeds[static_cast<size_t>(n - 1)] = q;
    for (int j = 0; j <= nt; ++j)
      sig.modal_series(n, j) = control_value(pp, q, T, sig.times[static_cast<size_t>(j)]);
    rep.mode_energy[static_cast<size_t>(n)] = (q.adjoint() * gb.W * q)(0).real();
  }
  for (double e : rep.mode_energy) rep.energy += e;
  return rep;
}

ApproxControlReport approx_control(const ModalState& z0, const ModalState& zT,
                                   double x_lo, double x_hi, double T,
                                   const PhysicalParams& p,
                                   const std::vector<BasisPair>& bases,
                                   const ApproxControlOptions& opt) {
  if (!(x_lo > 0.0) || !(x_hi < kPi) || !(x_lo < x_hi))
    throw ValidationError("control.region: need 0 < x_lo < x_hi < pi");
  if (!(T > 0.0)) throw ValidationError("control.T: horizon must be positive");
  if (!(opt.reg >= 0.0)) throw ValidationError("control.reg: must be nonnegative");
  if (opt.nt_hats < 2 || opt.nx_hats < 1)
    throw ValidationError("control.hats: need nt_hats >= 2 and nx_hats >= 1");
  const int n_max = z0.n_max();
  if (zT.n_max() != n_max)
    throw ValidationError("approx_control: initial and target states differ in modes");
  if (static_cast<int>(bases.size()) < n_max)
    throw ValidationError("approx_control: basis family does not cover the state");

  const int Nt = opt.nt_hats;
  const int Nx = opt.nx_hats;
  const double dt = T / (Nt - 1);
  const double dx = (x_hi - x_lo) / (Nx + 1);
  const int n_dof = Nt * Nx;
  const int n_rows = 1 + 3 * n_max;

  std::vector<ProjectedPair> pairs;
  pairs.reserve(static_cast<size_t>(n_max) + 1);
  pairs.push_back(zero_mode_matrices(p));
  for (int n = 1; n <= n_max; ++n)
    pairs.push_back(mode_matrices(bases[static_cast<size_t>(n - 1)], p));

  // Exact response of mode n to the i-th time hat (weighted rows below).
  std::vector<std::vector<Eigen::Vector3cd>> phi(static_cast<size_t>(n_max) + 1);
  std::vector<Eigen::Matrix3cd> wgt(static_cast<size_t>(n_max) + 1,
                                    Eigen::Matrix3cd::Identity());
  for (int n = 1; n <= n_max; ++n) {
    const Eigen::Matrix3cd G = xi_gram(bases[static_cast<size_t>(n - 1)], p);
    Eigen::LLT<Eigen::Matrix3cd> llt(G);
    if (llt.info() != Eigen::Success)
      throw NumericalError("approx_control: eigenfamily Gram matrix is not positive definite");
    wgt[static_cast<size_t>(n)] = Eigen::Matrix3cd(llt.matrixL()).adjoint();
  }
  for (int n = 0; n <= n_max; ++n) {
    auto& col = phi[static_cast<size_t>(n)];
    col.resize(static_cast<size_t>(Nt), Eigen::Vector3cd::Zero());
    const ProjectedPair& pp = pairs[static_cast<size_t>(n)];
    for (int i = 0; i < Nt; ++i) {
      const double ti = i * dt;
      Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
      if (i > 0) v += forced_response(pp, T, ti - dt, ti, 0.0, 1.0);
      if (i + 1 < Nt) v += forced_response(pp, T, ti, ti + dt, 1.0, 0.0);
      if (n >= 1) v = wgt[static_cast<size_t>(n)] * v;
      col[static_cast<size_t>(i)] = v;
    }
  }

  std::vector<double> nodes(static_cast<size_t>(Nx));
  for (int j = 0; j < Nx; ++j) nodes[static_cast<size_t>(j)] = x_lo + (j + 1) * dx;
  Eigen::MatrixXd cpl(n_max + 1, Nx);  // <tent_j, e_n> couplings
  for (int n = 0; n <= n_max; ++n) {
    const double profile_norm = n == 0 ? 1.0 / std::sqrt(kPi) : std::sqrt(2.0 / kPi);
    for (int j = 0; j < Nx; ++j)
      cpl(n, j) = profile_norm * tent_cos_integral(nodes[static_cast<size_t>(j)], dx, n);
  }

  Eigen::MatrixXcd M(n_rows, n_dof);
  for (int i = 0; i < Nt; ++i)
    for (int j = 0; j < Nx; ++j) {
      const int col = i * Nx + j;
      M(0, col) = cpl(0, j) * phi[0][static_cast<size_t>(i)](0);
      for (int n = 1; n <= n_max; ++n)
        M.block<3, 1>(1 + 3 * (n - 1), col) =
            cpl(n, j) * phi[static_cast<size_t>(n)][static_cast<size_t>(i)];
    }

  Eigen::VectorXcd rhs(n_rows);
  rhs(0) = zT.alpha0 - z0.alpha0;  // mode 0 drifts only under the control
  for (int n = 1; n <= n_max; ++n) {
    Eigen::Vector3cd d0, dT;
    for (int l = 0; l < 3; ++l) {
      d0(l) = z0.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)];
      dT(l) = zT.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)];
    }
    const Eigen::Vector3cd free = mode_exp(pairs[static_cast<size_t>(n)], T) * d0;
    rhs.segment<3>(1 + 3 * (n - 1)) = wgt[static_cast<size_t>(n)] * (dT - free);
  }

  Eigen::MatrixXcd H = M.adjoint() * M;
  H.diagonal().array() += opt.reg;
  const Eigen::VectorXcd w = H.ldlt().solve(M.adjoint() * rhs);

  ApproxControlReport rep;
  rep.z0_norm = modal_z_norm(z0, bases, p);
  rep.terminal_error = (M * w - rhs).norm();

  ControlSignal& sig = rep.signal;
  sig.T = T;
  sig.localized = true;
  sig.x_lo = x_lo;
  sig.x_hi = x_hi;
  sig.hat_times.resize(static_cast<size_t>(Nt));
  for (int i = 0; i < Nt; ++i) sig.hat_times[static_cast<size_t>(i)] = i * dt;
  sig.hat_nodes = nodes;
  sig.hat_weights = Eigen::MatrixXcd::Zero(Nt, Nx);
  for (int i = 0; i < Nt; ++i)
    for (int j = 0; j < Nx; ++j) sig.hat_weights(i, j) = w(i * Nx + j);
  rep.energy = control_energy(sig);
  return rep;
}

}  // namespace maxns
