#include "maxns/dynamics.hpp"

#include "maxns/errors.hpp"
#include "maxns/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace maxns {

namespace {

using Cplx = std::complex<double>;

std::vector<int> snapshot_steps(int nt, int snapshots) {
  if (snapshots < 2) throw ValidationError("snapshots: need at least 2");
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(snapshots));
  for (int j = 0; j < snapshots; ++j) {
    const int s = static_cast<int>(std::lround(double(j) * nt / (snapshots - 1)));
    if (idx.empty() || s != idx.back()) idx.push_back(s);
  }
  return idx;
}

// March one mode through [t0, t1] under a control value linear in t.
void advance_mode(const ProjectedPair& pp, Eigen::Vector3cd& d, double t0, double t1,
                  Cplx g0, Cplx g1) {
  if (t1 <= t0) return;
  d.head(pp.dim) = (mode_exp(pp, t1 - t0).topLeftCorner(pp.dim, pp.dim) * d.head(pp.dim)).eval();
  d += forced_response(pp, t1, t0, t1, g0, g1);
}

// One-sided/central 2nd-order first derivative on a uniform grid.
void derivative(const Eigen::VectorXcd& f, double dx, Eigen::VectorXcd& df) {
  const Eigen::Index n = f.size();
  const double s = 1.0 / (2.0 * dx);
  df.segment(1, n - 2) = (f.segment(2, n - 2) - f.segment(0, n - 2)) * s;
  df(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) * s;
  df(n - 1) = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) * s;
}

// Density-slot forcing of the forward system evaluated on the grid.
struct ControlSampler {
  const ControlSignal* f = nullptr;
  Eigen::MatrixXcd profiles;  // nx x (n_modes+1) cosine profiles, or nx x nhat tents
  bool active = false;

  void init(const ControlSignal* sig, const Eigen::VectorXd& xs) {
    f = sig;
    if (f == nullptr) return;
    const Eigen::Index nx = xs.size();
    if (f->localized) {
      const int m = static_cast<int>(f->hat_nodes.size());
      const double dxh = m > 1 ? f->hat_nodes[1] - f->hat_nodes[0]
                               : (f->x_hi - f->x_lo) / 2.0;
      profiles.resize(nx, m);
      for (Eigen::Index i = 0; i < nx; ++i)
        for (int j = 0; j < m; ++j) {
          const double s = std::abs(xs(i) - f->hat_nodes[static_cast<size_t>(j)]) / dxh;
          profiles(i, j) = s >= 1.0 ? 0.0 : 1.0 - s;
        }
    } else {
      const int m = static_cast<int>(f->modal_series.rows());
      profiles.resize(nx, m);
      for (Eigen::Index i = 0; i < nx; ++i) {
        profiles(i, 0) = 1.0 / std::sqrt(kPi);
        for (int n = 1; n < m; ++n)
          profiles(i, n) = std::sqrt(2.0 / kPi) * std::cos(n * xs(i));
      }
    }
    active = true;
  }

  void add(double t, Eigen::VectorXcd& out) const {
    if (!active) return;
    if (f->localized) {
      const int nt = static_cast<int>(f->hat_times.size());
      const double dt = f->hat_times[1] - f->hat_times[0];
      const double tc = std::clamp(t, 0.0, f->T);
      const int k = std::clamp(static_cast<int>(tc / dt), 0, nt - 2);
      const double th = (tc - f->hat_times[static_cast<size_t>(k)]) / dt;
      const Eigen::VectorXcd coef = (1.0 - th) * f->hat_weights.row(k).transpose() +
                                    th * f->hat_weights.row(k + 1).transpose();
      out.noalias() += profiles * coef;
    } else {
      const int m = static_cast<int>(f->times.size());
      const double dt = f->T / (m - 1);
      const double tc = std::clamp(t, 0.0, f->T);
      const int k = std::clamp(static_cast<int>(tc / dt), 0, m - 2);
      const double th = (tc - f->times[static_cast<size_t>(k)]) / dt;
      const Eigen::VectorXcd coef =
          (1.0 - th) * f->modal_series.col(k) + th * f->modal_series.col(k + 1);
      out.noalias() += profiles * coef;
    }
  }
};

// Shared RK4 kernel.  sign = +1 integrates the forward couplings, -1 the
// adjoint ones; `add_sources` appends interior forcing, `apply_bc` enforces
// the velocity boundary condition on a stage state.
struct Rk4Kernel {
  double dx = 0.0, dt = 0.0;
  double sign = 1.0;
  const PhysicalParams* p = nullptr;
  std::function<void(double, Eigen::VectorXcd&, Eigen::VectorXcd&, Eigen::VectorXcd&)> add_sources;
  std::function<void(double, Eigen::VectorXcd&)> apply_bc;

  Eigen::VectorXcd Dr, Du, DS;
  Eigen::VectorXcd kr[4], ku[4], kS[4];
  Eigen::VectorXcd rs, us, Ss;

  void resize(Eigen::Index nx) {
    for (auto* v : {&Dr, &Du, &DS, &rs, &us, &Ss}) v->resize(nx);
    for (int i = 0; i < 4; ++i) {
      kr[i].resize(nx);
      ku[i].resize(nx);
      kS[i].resize(nx);
    }
  }

  void rhs(double t, const Eigen::VectorXcd& r, const Eigen::VectorXcd& u,
           const Eigen::VectorXcd& S, Eigen::VectorXcd& out_r, Eigen::VectorXcd& out_u,
           Eigen::VectorXcd& out_S) {
    derivative(r, dx, Dr);
    derivative(u, dx, Du);
    derivative(S, dx, DS);
    out_r = (-sign * p->rho_s) * Du;
    out_u = (-sign * p->b) * Dr + (sign / p->rho_s) * DS;
    out_S = (sign * p->mu / p->kappa) * Du - (1.0 / p->kappa) * S;
    if (add_sources) add_sources(t, out_r, out_u, out_S);
  }

  void step(double t, Eigen::VectorXcd& r, Eigen::VectorXcd& u, Eigen::VectorXcd& S) {
    const double h = dt;
    rhs(t, r, u, S, kr[0], ku[0], kS[0]);
    rs = r + 0.5 * h * kr[0]; us = u + 0.5 * h * ku[0]; Ss = S + 0.5 * h * kS[0];
    apply_bc(t + 0.5 * h, us);
    rhs(t + 0.5 * h, rs, us, Ss, kr[1], ku[1], kS[1]);
    rs = r + 0.5 * h * kr[1]; us = u + 0.5 * h * ku[1]; Ss = S + 0.5 * h * kS[1];
    apply_bc(t + 0.5 * h, us);
    rhs(t + 0.5 * h, rs, us, Ss, kr[2], ku[2], kS[2]);
    rs = r + h * kr[2]; us = u + h * ku[2]; Ss = S + h * kS[2];
    apply_bc(t + h, us);
    rhs(t + h, rs, us, Ss, kr[3], ku[3], kS[3]);
    r += (h / 6.0) * (kr[0] + 2.0 * kr[1] + 2.0 * kr[2] + kr[3]);
    u += (h / 6.0) * (ku[0] + 2.0 * ku[1] + 2.0 * ku[2] + ku[3]);
    S += (h / 6.0) * (kS[0] + 2.0 * kS[1] + 2.0 * kS[2] + kS[3]);
    apply_bc(t + h, u);
  }
};

GridTrajectory run_kernel(const GridField& z0, double T, int nt, const PhysicalParams& p,
                          Rk4Kernel& kern, int snapshots, const StepObserver& observer) {
  const Eigen::Index nx = z0.nx();
  if (nx < 4) throw ValidationError("grid.nx: need at least 4 points");
  if (nt < 1) throw ValidationError("grid.nt: need at least 1 step");
  const double dx = kPi / double(nx - 1);
  const double dt = T / nt;
  const double dt_max = 0.4 * dx / p.c_wave;
  if (dt > dt_max * (1.0 + 1e-12))
    throw ValidationError("grid.nt: time step violates the CFL bound dt <= 0.4 dx / c_wave");

  kern.dx = dx;
  kern.dt = dt;
  kern.p = &p;
  kern.resize(nx);

  GridField z = z0;
  kern.apply_bc(0.0, z.u);

  const std::vector<int> snaps = snapshot_steps(nt, snapshots);
  GridTrajectory traj;
  size_t next = 0;
  auto record = [&](int step) {
    if (next < snaps.size() && snaps[next] == step) {
      traj.times.push_back(step * dt);
      traj.states.push_back(z);
      ++next;
    }
  };
  record(0);
  if (observer) observer(0, 0.0, z);
  for (int s = 1; s <= nt; ++s) {
    kern.step((s - 1) * dt, z.rho, z.u, z.S);
    record(s);
    if (observer) observer(s, s * dt, z);
  }
  return traj;
}

}  // namespace

ModalTrajectory evolve_modal(const ModalState& z0, const ControlSignal* f, double T,
                             const PhysicalParams& p,
                             const std::vector<BasisPair>& bases, int snapshots) {
  if (!(T > 0.0)) throw ValidationError("evolve.T: horizon must be positive");
  if (snapshots < 2) throw ValidationError("evolve.snapshots: need at least 2");
  const int n_max = z0.n_max();
  if (static_cast<int>(bases.size()) < n_max)
    throw ValidationError("evolve_modal: basis family does not cover the state");
  if (f != nullptr && std::abs(f->T - T) > 1e-12 * std::max(1.0, T))
    throw ValidationError("evolve_modal: control horizon differs from the requested T");

  std::vector<ProjectedPair> pairs;
  pairs.reserve(static_cast<size_t>(n_max) + 1);
  pairs.push_back(zero_mode_matrices(p));
  for (int n = 1; n <= n_max; ++n)
    pairs.push_back(mode_matrices(bases[static_cast<size_t>(n - 1)], p));

  ModalTrajectory traj;
  traj.times.resize(static_cast<size_t>(snapshots));
  for (int j = 0; j < snapshots; ++j)
    traj.times[static_cast<size_t>(j)] = T * j / (snapshots - 1);
  traj.states.reserve(static_cast<size_t>(snapshots));

  auto free_state_at = [&](double t) {
    ModalState z;
    z.alpha0 = z0.alpha0;
    z.d.assign(static_cast<size_t>(n_max), {Cplx(0), Cplx(0), Cplx(0)});
    for (int n = 1; n <= n_max; ++n) {
      Eigen::Vector3cd d0;
      for (int l = 0; l < 3; ++l) d0(l) = z0.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)];
      const Eigen::Vector3cd dt_vec = mode_exp(pairs[static_cast<size_t>(n)], t) * d0;
      for (int l = 0; l < 3; ++l) z.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)] = dt_vec(l);
    }
    return z;
  };

  if (f == nullptr) {
    for (double t : traj.times) traj.states.push_back(free_state_at(t));
    return traj;
  }

  if (f->has_seeds) {
    if (f->n_modes() < n_max)
      throw ValidationError("evolve_modal: control covers fewer modes than the state");
    for (double t : traj.times) {
      ModalState z = free_state_at(t);
      z.alpha0 = z0.alpha0 - p.b * f->seed0 * t;
      for (int n = 1; n <= n_max; ++n) {
        const ProjectedPair& pp = pairs[static_cast<size_t>(n)];
        const Eigen::Matrix3cd X = controlled_transfer(pp, T, t);
        const Eigen::Vector3cd corr = X * f->seeds[static_cast<size_t>(n - 1)];
        for (int l = 0; l < 3; ++l)
          z.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)] -= corr(l);
      }
      traj.states.push_back(std::move(z));
    }
    return traj;
  }

  // Sampled control: integrate cell-exactly against the piecewise-linear
  // interpolant of the per-mode coefficient series.
  std::vector<double> ts;
  Eigen::MatrixXcd series;
  if (f->localized) {
    ts = f->hat_times;
    series = localized_modal_series(*f, n_max, p);
  } else {
    if (f->n_modes() < n_max)
      throw ValidationError("evolve_modal: control covers fewer modes than the state");
    ts = f->times;
    series = f->modal_series.topRows(n_max + 1);
  }
  if (ts.size() < 2) throw ValidationError("evolve_modal: control needs at least 2 samples");

  auto series_at = [&](int n, double t) -> Cplx {
    const int m = static_cast<int>(ts.size());
    const double tc = std::clamp(t, ts.front(), ts.back());
    int k = std::clamp(static_cast<int>((tc - ts.front()) / (ts[1] - ts[0])), 0, m - 2);
    while (k + 1 < m - 1 && tc > ts[static_cast<size_t>(k) + 1]) ++k;
    const double th = (tc - ts[static_cast<size_t>(k)]) /
                      (ts[static_cast<size_t>(k) + 1] - ts[static_cast<size_t>(k)]);
    return (1.0 - th) * series(n, k) + th * series(n, k + 1);
  };

  std::vector<Eigen::Vector3cd> cur(static_cast<size_t>(n_max) + 1, Eigen::Vector3cd::Zero());
  cur[0](0) = z0.alpha0;
  for (int n = 1; n <= n_max; ++n)
    for (int l = 0; l < 3; ++l)
      cur[static_cast<size_t>(n)](l) = z0.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)];
  double t_cur = 0.0;
  size_t cell = 0;

  for (double t_snap : traj.times) {
    while (cell + 1 < ts.size() && ts[cell + 1] <= t_snap + 1e-15) {
      const double a = std::max(t_cur, ts[cell]);
      const double b = ts[cell + 1];
      for (int n = 0; n <= n_max; ++n)
        advance_mode(pairs[static_cast<size_t>(n)], cur[static_cast<size_t>(n)], a, b,
                     series_at(n, a), series_at(n, b));
      t_cur = b;
      ++cell;
    }
    if (t_snap > t_cur) {
      for (int n = 0; n <= n_max; ++n)
        advance_mode(pairs[static_cast<size_t>(n)], cur[static_cast<size_t>(n)], t_cur, t_snap,
                     series_at(n, t_cur), series_at(n, t_snap));
      t_cur = t_snap;
    }
    ModalState z;
    z.alpha0 = cur[0](0);
    z.d.assign(static_cast<size_t>(n_max), {Cplx(0), Cplx(0), Cplx(0)});
    for (int n = 1; n <= n_max; ++n)
      for (int l = 0; l < 3; ++l)
        z.d[static_cast<size_t>(n - 1)][static_cast<size_t>(l)] = cur[static_cast<size_t>(n)](l);
    traj.states.push_back(std::move(z));
  }
  return traj;
}

int fd_min_steps(double T, int nx, const PhysicalParams& p, double cfl) {
  if (nx < 4) throw ValidationError("grid.nx: need at least 4 points");
  if (!(T > 0.0) || !(cfl > 0.0))
    throw ValidationError("fd_min_steps: T and cfl must be positive");
  const double dx = kPi / double(nx - 1);
  return std::max(1, static_cast<int>(std::ceil(T * p.c_wave / (cfl * dx))));
}

GridTrajectory fd_solve(const GridField& z0, const ControlSignal* f, double T, int nt,
                        const PhysicalParams& p, int snapshots,
                        const StepObserver& observer) {
  const Eigen::Index nx = z0.nx();
  Eigen::VectorXd xs = grid_points(static_cast<int>(nx));

  ControlSampler sampler;
  sampler.init(f, xs);

  Rk4Kernel kern;
  kern.sign = 1.0;
  if (sampler.active)
    kern.add_sources = [&sampler](double t, Eigen::VectorXcd& out_r, Eigen::VectorXcd&,
                                  Eigen::VectorXcd&) { sampler.add(t, out_r); };
  kern.apply_bc = [](double, Eigen::VectorXcd& u) {
    u(0) = 0.0;
    u(u.size() - 1) = 0.0;
  };
  return run_kernel(z0, T, nt, p, kern, snapshots, observer);
}

GridTrajectory adjoint_solve(const GridField& q0, const SeparableSource& src,
                             const BoundaryFn& h0, const BoundaryFn& hpi, double T,
                             int nt, const PhysicalParams& p, int snapshots,
                             const StepObserver& observer) {
  const Eigen::Index nx = q0.nx();
  if ((src.s_rho.size() && src.s_rho.size() != nx) ||
      (src.s_u.size() && src.s_u.size() != nx) ||
      (src.s_S.size() && src.s_S.size() != nx))
    throw ValidationError("adjoint_solve: source shapes must match the state grid");

  Rk4Kernel kern;
  kern.sign = -1.0;
  const bool has_src = src.s_rho.size() || src.s_u.size() || src.s_S.size();
  if (has_src)
    kern.add_sources = [&src](double t, Eigen::VectorXcd& out_r, Eigen::VectorXcd& out_u,
                              Eigen::VectorXcd& out_S) {
      const double amp = std::exp(src.rate * t);
      if (src.s_rho.size()) out_r.noalias() += amp * src.s_rho;
      if (src.s_u.size()) out_u.noalias() += amp * src.s_u;
      if (src.s_S.size()) out_S.noalias() += amp * src.s_S;
    };
  kern.apply_bc = [&h0, &hpi](double t, Eigen::VectorXcd& v) {
    v(0) = h0 ? h0(t) : Cplx(0.0);
    v(v.size() - 1) = hpi ? hpi(t) : Cplx(0.0);
  };
  return run_kernel(q0, T, nt, p, kern, snapshots, observer);
}

}  // namespace maxns
