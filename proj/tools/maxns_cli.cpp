// Command-line front door: parse a JSON config, dispatch to one experiment,
// write CSV/JSON artifacts plus a manifest under the output directory.
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration error.

#include "CLI11.hpp"
#include "json.hpp"

#include "maxns/control.hpp"
#include "maxns/dynamics.hpp"
#include "maxns/errors.hpp"
#include "maxns/gaussian_beam.hpp"
#include "maxns/ingham.hpp"
#include "maxns/modal_basis.hpp"
#include "maxns/parallel.hpp"
#include "maxns/params.hpp"
#include "maxns/quadrature.hpp"
#include "maxns/spectrum.hpp"
#include "maxns/state_space.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using maxns::ValidationError;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class OutDir {
 public:
  explicit OutDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
      throw ValidationError("output_dir: cannot create directory " + dir_.string());
  }
  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ValidationError("output_dir: cannot open " + name + " for writing");
    f << content;
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

// Config accessors raising field-path diagnostics.
class Config {
 public:
  Config() : root_(json::object()) {}
  explicit Config(json j) : root_(std::move(j)) {
    if (!root_.is_object())
      throw ValidationError("config: top level must be a JSON object");
  }
  const json& root() const { return root_; }

  double num(const std::string& block, const std::string& key, double defv) const {
    const json* v = locate(block, key);
    if (v == nullptr) return defv;
    if (!v->is_number()) throw ValidationError(path(block, key) + ": must be a number");
    return v->get<double>();
  }

  int integer(const std::string& block, const std::string& key, int defv) const {
    const json* v = locate(block, key);
    if (v == nullptr) return defv;
    if (!v->is_number_integer())
      throw ValidationError(path(block, key) + ": must be an integer");
    return v->get<int>();
  }

  bool flag(const std::string& block, const std::string& key, bool defv) const {
    const json* v = locate(block, key);
    if (v == nullptr) return defv;
    if (!v->is_boolean()) throw ValidationError(path(block, key) + ": must be a boolean");
    return v->get<bool>();
  }

  std::pair<double, double> interval(const std::string& block, const std::string& key,
                                     std::pair<double, double> defv) const {
    const json* v = locate(block, key);
    if (v == nullptr) return defv;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw ValidationError(path(block, key) + ": must be an array [a, b] of two numbers");
    const double a = (*v)[0].get<double>();
    const double b = (*v)[1].get<double>();
    if (!(a < b)) throw ValidationError(path(block, key) + ": need a < b");
    return {a, b};
  }

  std::vector<double> num_list(const std::string& block, const std::string& key,
                               std::vector<double> defv) const {
    const json* v = locate(block, key);
    if (v == nullptr) return defv;
    if (!v->is_array() || v->empty())
      throw ValidationError(path(block, key) + ": must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number())
        throw ValidationError(path(block, key) + ": must be a non-empty array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  static std::string path(const std::string& block, const std::string& key) {
    return block.empty() ? key : block + "." + key;
  }
  const json* locate(const std::string& block, const std::string& key) const {
    const json* scope = &root_;
    if (!block.empty()) {
      if (!root_.contains(block)) return nullptr;
      scope = &root_.at(block);
      if (!scope->is_object()) throw ValidationError(block + ": must be a JSON object");
    }
    if (!scope->contains(key)) return nullptr;
    return &scope->at(key);
  }
  json root_;
};

maxns::PhysicalParams params_from(const Config& cfg) {
  return maxns::derive_constants(cfg.num("params", "rho_s", 1.0), cfg.num("params", "a", 1.0),
                                 cfg.num("params", "gamma", 1.0), cfg.num("params", "mu", 1.0),
                                 cfg.num("params", "kappa", 1.0));
}

int positive_int(const Config& cfg, const std::string& block, const std::string& key,
                 int defv) {
  const int v = cfg.integer(block, key, defv);
  if (v < 1) throw ValidationError(block + "." + key + ": must be a positive integer");
  return v;
}

double positive_num(const Config& cfg, const std::string& block, const std::string& key,
                    double defv) {
  const double v = cfg.num(block, key, defv);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(block + "." + key + ": must be a positive finite number");
  return v;
}

json run_spectrum(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
                  std::uint64_t) {
  const int n_max = positive_int(cfg, "spectrum", "n_max", 200);
  std::vector<maxns::ModeSpectrum> rows(static_cast<size_t>(n_max));
  maxns::parallel_for(1, n_max + 1,
                      [&](int n) { rows[static_cast<size_t>(n - 1)] = maxns::solve_mode(n, p); });

  std::string csv =
      "n,structure,re_lambda1,im_lambda1,re_lambda2,im_lambda2,re_lambda3,im_lambda3,"
      "asym_lambda1,asym_re_lambda23,asym_im_lambda2,dev1,dev2,dev3\n";
  double max_vieta = 0.0, max_conj = 0.0;
  int n_simple = 0, n_double = 0, n_triple = 0;
  for (const auto& m : rows) {
    const auto& l = m.lambda;
    const double c2 = 1.0 / p.kappa;
    const double c1 = (p.mu / (p.kappa * p.rho_s) + p.b * p.rho_s) * m.n * m.n;
    const double c0 = p.b * p.rho_s * m.n * m.n / p.kappa;
    max_vieta = std::max(max_vieta, std::abs(l[0] + l[1] + l[2] + c2) / c2);
    max_vieta =
        std::max(max_vieta, std::abs(l[0] * l[1] + l[0] * l[2] + l[1] * l[2] - c1) / c1);
    max_vieta = std::max(max_vieta, std::abs(l[0] * l[1] * l[2] + c0) / c0);
    if (m.structure == maxns::RootStructure::Simple && l[1].imag() != 0.0)
      max_conj = std::max(max_conj, std::abs(l[2] - std::conj(l[1])));
    switch (m.structure) {
      case maxns::RootStructure::Simple: ++n_simple; break;
      case maxns::RootStructure::Double: ++n_double; break;
      case maxns::RootStructure::Triple: ++n_triple; break;
    }
    const maxns::AsymptoticRoots a = maxns::asymptotic_prediction(m.n, p);
    csv += std::to_string(m.n);
    csv += ',';
    csv += maxns::to_string(m.structure);
    for (int j = 0; j < 3; ++j) {
      csv += ',' + g17(l[static_cast<size_t>(j)].real());
      csv += ',' + g17(l[static_cast<size_t>(j)].imag());
    }
    csv += ',' + g17(a.lambda1.real());
    csv += ',' + g17(a.lambda2.real());
    csv += ',' + g17(a.lambda2.imag());
    csv += ',' + g17(std::abs(l[0] - a.lambda1));
    csv += ',' + g17(std::abs(l[1] - a.lambda2));
    csv += ',' + g17(std::abs(l[2] - a.lambda3));
    csv += '\n';
  }
  out.write("spectrum.csv", csv);

  const auto& last = rows.back();
  json summary;
  summary["n_max"] = n_max;
  summary["max_vieta_relative_residual"] = max_vieta;
  summary["max_conjugacy_deviation"] = max_conj;
  summary["count_simple"] = n_simple;
  summary["count_double"] = n_double;
  summary["count_triple"] = n_triple;
  summary["lambda1_at_n_max"] = last.lambda[0].real();
  summary["re_lambda2_at_n_max"] = last.lambda[1].real();
  summary["omega0"] = p.omega0;
  summary["c_wave"] = p.c_wave;
  return summary;
}

json run_basis_check(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
                     std::uint64_t) {
  const int n_max = positive_int(cfg, "basis_check", "n_max", 50);
  const int nx = positive_int(cfg, "basis_check", "nx", 4097);
  if (nx < 3 || nx % 2 == 0)
    throw ValidationError("basis_check.nx: must be an odd integer >= 3");
  const std::vector<maxns::BasisPair> bases = maxns::build_family(n_max, p);

  json table = json::array();
  double max_closed = 0.0, max_quad = 0.0, max_gamma = 0.0, max_gamma_inv = 0.0;
  std::vector<json> entries(static_cast<size_t>(n_max));
  maxns::parallel_for(1, n_max + 1, [&](int n) {
    const maxns::BasisPair& basis = bases[static_cast<size_t>(n - 1)];
    const Eigen::Matrix3cd closed =
        maxns::pairing_table(basis, p) - Eigen::Matrix3cd::Identity();
    const Eigen::Matrix3cd quad =
        maxns::pairing_table_quadrature(basis, p, nx) - Eigen::Matrix3cd::Identity();
    const maxns::GammaMatrix gm = maxns::gamma_matrix(basis, p);
    json e;
    e["n"] = n;
    e["structure"] = maxns::to_string(basis.mode.structure);
    e["max_biortho_deviation"] = closed.cwiseAbs().maxCoeff();
    e["quadrature_deviation"] = quad.cwiseAbs().maxCoeff();
    e["gamma_norm"] = gm.norm;
    e["gamma_inv_norm"] = gm.inv_norm;
    entries[static_cast<size_t>(n - 1)] = std::move(e);
  });
  for (auto& e : entries) {
    max_closed = std::max(max_closed, e["max_biortho_deviation"].get<double>());
    max_quad = std::max(max_quad, e["quadrature_deviation"].get<double>());
    max_gamma = std::max(max_gamma, e["gamma_norm"].get<double>());
    max_gamma_inv = std::max(max_gamma_inv, e["gamma_inv_norm"].get<double>());
    table.push_back(std::move(e));
  }
  json report;
  report["nx"] = nx;
  report["modes"] = table;
  out.write("basis_check.json", report.dump(2) + "\n");

  json summary;
  summary["n_max"] = n_max;
  summary["nx"] = nx;
  summary["max_biortho_deviation"] = max_closed;
  summary["max_quadrature_deviation"] = max_quad;
  summary["max_gamma_norm"] = max_gamma;
  summary["max_gamma_inv_norm"] = max_gamma_inv;
  return summary;
}

json run_null_control(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
                      std::uint64_t seed) {
  const double T = positive_num(cfg, "null_control", "T", 1.0);
  const int n_max = positive_int(cfg, "null_control", "n_max", 64);
  const int nx_oracle = positive_int(cfg, "null_control", "nx_oracle", 2001);
  const int nt_samples = positive_int(cfg, "null_control", "nt_samples", 512);
  const bool fd_oracle = cfg.flag("null_control", "fd_oracle", true);

  const std::vector<maxns::BasisPair> bases = maxns::build_family(n_max, p);
  const maxns::ModalState z0 = maxns::random_state(n_max, seed);
  const maxns::NullControlReport rep =
      maxns::assemble_control(z0, T, p, bases, nt_samples);

  const maxns::ModalTrajectory mt = maxns::evolve_modal(z0, &rep.signal, T, p, bases, 2);
  const double term_rel =
      maxns::modal_z_norm(mt.states.back(), bases, p) / rep.z0_norm;

  std::string csv = "t,mode,re_f,im_f\n";
  for (size_t j = 0; j < rep.signal.times.size(); ++j)
    for (int n = 0; n <= n_max; ++n) {
      csv += g17(rep.signal.times[j]);
      csv += ',' + std::to_string(n);
      csv += ',' + g17(rep.signal.modal_series(n, static_cast<Eigen::Index>(j)).real());
      csv += ',' + g17(rep.signal.modal_series(n, static_cast<Eigen::Index>(j)).imag());
      csv += '\n';
    }
  out.write("control.csv", csv);

  json summary;
  summary["T"] = T;
  summary["n_max"] = n_max;
  summary["seed"] = seed;
  summary["z0_norm"] = rep.z0_norm;
  summary["terminal_relative_error"] = term_rel;
  summary["control_energy"] = rep.energy;
  summary["control_energy_sampled"] = maxns::control_energy(rep.signal);
  summary["energy_quotient"] = rep.energy / (rep.z0_norm * rep.z0_norm);
  summary["per_mode_energies"] = rep.mode_energy;

  if (fd_oracle) {
    const maxns::GridField z0g = maxns::reconstruct(z0, nx_oracle, p, bases);
    const int nt_fd = maxns::fd_min_steps(T, nx_oracle, p);
    const maxns::GridTrajectory gt =
        maxns::fd_solve(z0g, &rep.signal, T, nt_fd, p, 2);
    summary["nx_oracle"] = nx_oracle;
    summary["nt_oracle"] = nt_fd;
    summary["fd_terminal_relative_error"] =
        maxns::z_norm(gt.states.back(), p) / maxns::z_norm(gt.states.front(), p);
  }
  return summary;
}

json run_approx_control(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
                        std::uint64_t seed) {
  const double T = positive_num(cfg, "approx_control", "T", 9.0);
  const auto o1 = cfg.interval("approx_control", "O1", {0.3, 0.6});
  const int n_max = positive_int(cfg, "approx_control", "n_max", 32);
  maxns::ApproxControlOptions opt;
  opt.reg = cfg.num("approx_control", "reg", 1e-8);
  opt.nt_hats = positive_int(cfg, "approx_control", "nt_hats", 64);
  opt.nx_hats = positive_int(cfg, "approx_control", "nx_hats", 16);

  const std::vector<maxns::BasisPair> bases = maxns::build_family(n_max, p);
  const maxns::ModalState z0 = maxns::random_state(n_max, seed);
  maxns::ModalState zT;
  zT.alpha0 = 0.0;
  zT.d.assign(static_cast<size_t>(n_max), {});
  const maxns::ApproxControlReport rep =
      maxns::approx_control(z0, zT, o1.first, o1.second, T, p, bases, opt);

  const maxns::ModalTrajectory mt = maxns::evolve_modal(z0, &rep.signal, T, p, bases, 2);
  const double verify_rel =
      maxns::modal_z_norm(mt.states.back(), bases, p) / rep.z0_norm;

  std::string csv = "t,x,re_f,im_f\n";
  const int nx_plot = 101;
  for (double t : rep.signal.hat_times)
    for (int j = 0; j < nx_plot; ++j) {
      const double x = o1.first + (o1.second - o1.first) * j / (nx_plot - 1);
      const std::complex<double> v = maxns::localized_value(rep.signal, t, x);
      csv += g17(t);
      csv += ',' + g17(x);
      csv += ',' + g17(v.real());
      csv += ',' + g17(v.imag());
      csv += '\n';
    }
  out.write("control.csv", csv);

  json summary;
  summary["T"] = T;
  summary["O1"] = {o1.first, o1.second};
  summary["n_max"] = n_max;
  summary["reg"] = opt.reg;
  summary["nt_hats"] = opt.nt_hats;
  summary["nx_hats"] = opt.nx_hats;
  summary["seed"] = seed;
  summary["z0_norm"] = rep.z0_norm;
  summary["terminal_error"] = rep.terminal_error;
  summary["relative_error"] = rep.terminal_error / rep.z0_norm;
  summary["verified_relative_error"] = verify_rel;
  summary["control_energy"] = rep.energy;
  return summary;
}

json run_simulate(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
                  std::uint64_t seed) {
  const double T = positive_num(cfg, "simulate", "T", 1.0);
  const int nx = positive_int(cfg, "simulate", "nx", 2001);
  const int n_max = positive_int(cfg, "simulate", "n_max", 8);
  const int snapshots = positive_int(cfg, "simulate", "snapshots", 33);
  const bool controlled = cfg.flag("simulate", "controlled", false);

  const std::vector<maxns::BasisPair> bases = maxns::build_family(n_max, p);
  const maxns::ModalState z0 = maxns::random_state(n_max, seed);
  const maxns::GridField z0g = maxns::reconstruct(z0, nx, p, bases);
  const int nt = maxns::fd_min_steps(T, nx, p);

  maxns::NullControlReport ctrl;
  const maxns::ControlSignal* sig = nullptr;
  if (controlled) {
    ctrl = maxns::assemble_control(z0, T, p, bases, 512);
    sig = &ctrl.signal;
  }

  // Conservation / dissipation diagnostics, accumulated step by step.
  const Eigen::VectorXd sw = maxns::simpson_weights(nx);
  std::complex<double> mass0, stress0;
  double e0 = 0.0, e_prev = 0.0;
  double mass_dev = 0.0, stress_dev = 0.0, step_increase = 0.0;
  const auto observer = [&](int step, double t, const maxns::GridField& z) {
    std::complex<double> mass = 0.0, stress = 0.0;
    double e = 0.0;
    for (int i = 0; i < nx; ++i) {
      mass += sw(i) * z.rho(i);
      stress += sw(i) * z.S(i);
      e += sw(i) * (p.b * std::norm(z.rho(i)) + p.rho_s * std::norm(z.u(i)) +
                    (p.kappa / p.mu) * std::norm(z.S(i)));
    }
    stress *= std::exp(t / p.kappa);
    if (step == 0) {
      mass0 = mass;
      stress0 = stress;
      e0 = e_prev = e;
      return;
    }
    mass_dev = std::max(mass_dev, std::abs(mass - mass0));
    stress_dev = std::max(stress_dev, std::abs(stress - stress0));
    step_increase = std::max(step_increase, e - e_prev);
    e_prev = e;
  };

  const maxns::GridTrajectory traj =
      maxns::fd_solve(z0g, sig, T, nt, p, snapshots, observer);

  const Eigen::VectorXd xs = maxns::grid_points(nx);
  json times = json::array(), files = json::array(), norms = json::array();
  for (size_t s = 0; s < traj.states.size(); ++s) {
    char name[40];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", s);
    std::string csv = "x,re_rho,im_rho,re_u,im_u,re_S,im_S\n";
    const maxns::GridField& z = traj.states[s];
    for (int i = 0; i < nx; ++i) {
      csv += g17(xs(i));
      csv += ',' + g17(z.rho(i).real()) + ',' + g17(z.rho(i).imag());
      csv += ',' + g17(z.u(i).real()) + ',' + g17(z.u(i).imag());
      csv += ',' + g17(z.S(i).real()) + ',' + g17(z.S(i).imag());
      csv += '\n';
    }
    out.write(name, csv);
    times.push_back(traj.times[s]);
    files.push_back(name);
    norms.push_back(maxns::z_norm(z, p));
  }
  json traj_manifest;
  traj_manifest["times"] = times;
  traj_manifest["files"] = files;
  traj_manifest["norms"] = norms;
  out.write("trajectory.json", traj_manifest.dump(2) + "\n");

  json summary;
  summary["T"] = T;
  summary["nx"] = nx;
  summary["nt"] = nt;
  summary["n_max"] = n_max;
  summary["seed"] = seed;
  summary["controlled"] = controlled;
  summary["initial_norm"] = maxns::z_norm(traj.states.front(), p);
  summary["final_norm"] = maxns::z_norm(traj.states.back(), p);
  summary["mass_drift_max"] = mass_dev;
  summary["weighted_stress_drift_max"] = stress_dev;
  summary["energy_step_increase_max_relative"] = step_increase / e0;
  return summary;
}

json run_beam(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
              std::uint64_t) {
  const std::vector<double> ladder =
      cfg.num_list("beam", "k_ladder", {64.0, 256.0, 1024.0, 4096.0});
  const double x0 = positive_num(cfg, "beam", "x0", 1.2);
  const double r = positive_num(cfg, "beam", "r", 0.5);
  const double T = positive_num(cfg, "beam", "T", 1.0);
  maxns::ObservationWindows wins;
  wins.density = cfg.interval("beam", "O1", {2.2, 2.8});
  wins.velocity = cfg.interval("beam", "O2", {0.0, maxns::kPi});
  wins.stress = cfg.interval("beam", "O3", {2.2, 2.8});
  const int nx_cfg = cfg.integer("beam", "nx", 0);
  const int nt_cfg = cfg.integer("beam", "nt", 0);

  struct Row {
    maxns::BeamExperimentReport rep;
    double v_sq0 = 0.0;
  };
  std::vector<Row> rows(ladder.size());
  maxns::parallel_for(0, static_cast<int>(ladder.size()), [&](int i) {
    const maxns::BeamFamily beam =
        maxns::build_beam(ladder[static_cast<size_t>(i)], x0, r, p);
    Row row;
    row.rep = maxns::observability_experiment(beam, wins, T, nx_cfg, nt_cfg, 2);
    row.v_sq0 = maxns::beam_integrals(beam, 0.0, row.rep.nx).v_sq;
    rows[static_cast<size_t>(i)] = row;
  });

  const double eta_sq_T = std::exp(2.0 * p.omega0 * T);  // |eta(T, x0)|^2, unit amplitude
  json table = json::array();
  for (const Row& row : rows) {
    const auto& rp = row.rep;
    json e;
    e["k"] = rp.k;
    e["nx"] = rp.nx;
    e["nt"] = rp.nt;
    e["residual_norm"] = rp.residual_norm0;
    e["k_times_residual"] = rp.k * rp.residual_norm0;
    e["v_sq"] = row.v_sq0;
    e["k2_times_v_sq"] = rp.k * rp.k * row.v_sq0;
    e["sigma_sq_terminal"] = rp.sigma_sq_T;
    e["sigma_sq_terminal_predicted"] = std::sqrt(maxns::kPi) * eta_sq_T;
    e["concentration_tail"] = rp.sigma_tail_T;
    e["tail_fraction"] = rp.sigma_tail_T / rp.sigma_sq_T;
    e["N"] = rp.terminal_energy;
    e["D"] = rp.observed_energy;
    e["ratio"] = rp.quotient;
    e["correction_norm"] = rp.correction_norm;
    e["correction_norm_scaled"] = rp.correction_norm * std::pow(rp.k, 0.75);
    e["sigma_mean_max"] = rp.sigma_mean_max;
    e["stress_mean_max"] = rp.stress_mean_max;
    table.push_back(std::move(e));
  }
  json report;
  report["x0"] = x0;
  report["r"] = r;
  report["T"] = T;
  report["O1"] = {wins.density.first, wins.density.second};
  report["O2"] = {wins.velocity.first, wins.velocity.second};
  report["O3"] = {wins.stress.first, wins.stress.second};
  report["table"] = table;
  out.write("beam.json", report.dump(2) + "\n");

  json growth = json::array();
  for (size_t i = 1; i < rows.size(); ++i)
    growth.push_back(rows[i].rep.quotient / rows[i - 1].rep.quotient);
  json summary;
  summary["k_ladder"] = ladder;
  summary["T"] = T;
  summary["table"] = table;
  summary["ratio_growth"] = growth;
  return summary;
}

json run_ingham(const Config& cfg, const maxns::PhysicalParams& p, OutDir& out,
                std::uint64_t) {
  const int M = positive_int(cfg, "ingham", "M", 10);
  const int n_max = positive_int(cfg, "ingham", "n_max", 200);
  const std::vector<double> t_list = cfg.num_list("ingham", "T_list", {9.0, 12.0, 15.0});
  const int quad_points = cfg.integer("ingham", "quad_points", 0);
  if (quad_points != 0 && (quad_points < 3 || quad_points % 2 == 0))
    throw ValidationError("ingham.quad_points: must be 0 (off) or an odd integer >= 3");

  const maxns::FrequencyFamily fam = maxns::frequencies(M, n_max, p);
  double delta_min = 0.0, delta_max = 0.0, eps_min = 0.0, eps_max = 0.0;
  for (size_t j = 0; j < fam.delta.size(); ++j) {
    const double ad = std::abs(fam.delta[j]);
    delta_min = j == 0 ? ad : std::min(delta_min, ad);
    delta_max = std::max(delta_max, ad);
    eps_min = j == 0 ? fam.eps[j] : std::min(eps_min, fam.eps[j]);
    eps_max = std::max(eps_max, fam.eps[j]);
  }

  std::string csv =
      "T,M,n_max,C_low,C_high,gap_required,min_gap,delta_abs_min,delta_abs_max,"
      "eps_min,eps_max,quad_deviation\n";
  json rows = json::array();
  for (double T : t_list) {
    const maxns::InghamConstants c = maxns::ingham_constants(fam, T);
    double quad_dev = 0.0;
    if (quad_points > 0) {
      const Eigen::MatrixXcd gq = maxns::ingham_gram_quadrature(fam, T, quad_points);
      quad_dev = (gq - c.gram).cwiseAbs().maxCoeff();
    }
    csv += g17(T) + ',' + std::to_string(M) + ',' + std::to_string(n_max);
    csv += ',' + g17(c.C_low) + ',' + g17(c.C_high);
    csv += ',' + g17(fam.gap_required) + ',' + g17(fam.min_gap);
    csv += ',' + g17(delta_min) + ',' + g17(delta_max);
    csv += ',' + g17(eps_min) + ',' + g17(eps_max);
    csv += ',' + g17(quad_dev) + '\n';
    json e;
    e["T"] = T;
    e["C_low"] = c.C_low;
    e["C_high"] = c.C_high;
    if (quad_points > 0) e["quad_deviation"] = quad_dev;
    rows.push_back(std::move(e));
  }
  out.write("ingham.csv", csv);

  json summary;
  summary["M"] = M;
  summary["n_max"] = n_max;
  summary["family_size"] = static_cast<int>(fam.mu.size());
  summary["gap_required"] = fam.gap_required;
  summary["min_gap"] = fam.min_gap;
  summary["delta_abs_max"] = delta_max;
  summary["eps_range"] = {eps_min, eps_max};
  summary["sweep"] = rows;
  return summary;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maxns: spectral analysis and control of the linearized 1-D compressible "
               "system with stress relaxation"};
  app.require_subcommand(1);
  std::string config_path, out_flag;
  long long seed_flag = -1;
  bool seed_given = false, out_given = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_flag, "output directory")->each([&](const std::string&) {
    out_given = true;
  });
  app.add_option("--seed", seed_flag, "random seed")->each([&](const std::string&) {
    seed_given = true;
  });

  using Runner = json (*)(const Config&, const maxns::PhysicalParams&, OutDir&, std::uint64_t);
  const std::vector<std::pair<std::string, Runner>> commands = {
      {"spectrum", run_spectrum},         {"basis-check", run_basis_check},
      {"null-control", run_null_control}, {"approx-control", run_approx_control},
      {"simulate", run_simulate},         {"beam", run_beam},
      {"ingham", run_ingham}};
  for (const auto& [name, fn] : commands) {
    (void)fn;
    app.add_subcommand(name, "run the " + name + " experiment")->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    json raw = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ValidationError("config: cannot read file " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      raw = json::parse(ss.str(), nullptr, false);
      if (raw.is_discarded())
        throw ValidationError("config: file is not valid JSON: " + config_path);
    }
    const Config cfg(raw);
    const maxns::PhysicalParams p = params_from(cfg);

    std::uint64_t seed = 1;
    if (seed_given) {
      if (seed_flag < 0) throw ValidationError("seed: must be a nonnegative integer");
      seed = static_cast<std::uint64_t>(seed_flag);
    } else {
      const int s = cfg.integer("", "seed", 1);
      if (s < 0) throw ValidationError("seed: must be a nonnegative integer");
      seed = static_cast<std::uint64_t>(s);
    }
    std::string out_dir = "out";
    if (out_given) {
      out_dir = out_flag;
    } else if (cfg.root().contains("output_dir")) {
      if (!cfg.root().at("output_dir").is_string())
        throw ValidationError("output_dir: must be a string");
      out_dir = cfg.root().at("output_dir").get<std::string>();
    }

    std::string cmd_name;
    Runner runner = nullptr;
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) {
        cmd_name = name;
        runner = fn;
      }
    if (runner == nullptr) throw ValidationError("command: no subcommand selected");

    OutDir out{std::filesystem::path(out_dir)};
    const json summary = runner(cfg, p, out, seed);
    out.write("summary.json", summary.dump(2) + "\n");

    json manifest;
    manifest["command"] = cmd_name;
    manifest["version"] = "1.0.0";
    manifest["seed"] = seed;
    manifest["config_hash"] = hex64(fnv1a(raw.dump() + "#" + std::to_string(seed)));
    manifest["files"] = out.files();
    out.write("manifest.json", manifest.dump(2) + "\n");
    std::cout << manifest.dump(2) << std::endl;
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const maxns::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
