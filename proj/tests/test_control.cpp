#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <maxns/control.hpp>
#include <maxns/modal_basis.hpp>
#include <maxns/params.hpp>
#include <maxns/quadrature.hpp>
#include <maxns/spectrum.hpp>
#include <maxns/state_space.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

using namespace maxns;
using Cplx = std::complex<double>;

namespace {

PhysicalParams double_point_params() {
    return derive_constants(1.0, 1.0 / 11.0, 1.0, 72.0 / 121.0, 5.0 / 11.0);
}

PhysicalParams triple_point_params() {
    return derive_constants(1.0, 1.0, 1.0, 8.0 / std::sqrt(27.0), 1.0 / std::sqrt(27.0));
}

ProjectedPair pair_for(int n, const PhysicalParams& p) {
    return mode_matrices(build_basis(solve_mode(n, p), p), p);
}

// Independent Gramian oracle: composite Simpson of e^{tA} B B^* e^{tA^*}
// using Eigen's dense matrix exponential (no shared code with the library).
Eigen::Matrix3cd gramian_expm_oracle(const ProjectedPair& pp, double T, int points) {
    Eigen::Matrix3cd W = Eigen::Matrix3cd::Zero();
    const int m = points - 1;
    const double h = T / m;
    for (int j = 0; j <= m; ++j) {
        double wj = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        Eigen::Matrix3cd E = (pp.A * (j * h)).exp();
        Eigen::Vector3cd v = E * pp.B;
        W += (wj * h / 3.0) * (v * v.adjoint());
    }
    return W;
}

}  // namespace

TEST_CASE("projected generator is the structured Jordan form") {
    // Simple: diagonal of the eigenvalues.
    PhysicalParams p = reference_params();
    for (int n : {1, 5}) {
        ModeSpectrum m = solve_mode(n, p);
        ProjectedPair pp = pair_for(n, p);
        CHECK(pp.dim == 3);
        CHECK(pp.structure == RootStructure::Simple);
        Eigen::Matrix3cd D = Eigen::Matrix3cd::Zero();
        for (int l = 0; l < 3; ++l) D(l, l) = m.lambda[l];
        CHECK((pp.A - D).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + n));
    }

    // Double: one scalar block plus a 2x2 Jordan block with -1 coupling.
    {
        PhysicalParams pd = double_point_params();
        ModeSpectrum m = solve_mode(1, pd);
        ProjectedPair pp = pair_for(1, pd);
        Eigen::Matrix3cd J = Eigen::Matrix3cd::Zero();
        J(0, 0) = m.lambda[0];
        J(1, 1) = J(2, 2) = m.lambda[1];
        J(1, 2) = -1.0;
        CHECK((pp.A - J).cwiseAbs().maxCoeff() < 1e-9);
    }

    // Triple: full 3x3 Jordan block with -1 couplings.
    {
        PhysicalParams pt = triple_point_params();
        ProjectedPair pp = pair_for(1, pt);
        Eigen::Matrix3cd J = Eigen::Matrix3cd::Zero();
        J(0, 0) = J(1, 1) = J(2, 2) = -std::sqrt(3.0);
        J(0, 1) = J(1, 2) = -1.0;
        CHECK((pp.A - J).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("input vector collects the adjoint density components") {
    PhysicalParams p = reference_params();
    int n = 4;
    BasisPair basis = build_basis(solve_mode(n, p), p);
    ProjectedPair pp = mode_matrices(basis, p);
    for (int l = 0; l < 3; ++l) {
        Cplx expect = p.b * std::sqrt(kPi / 2.0) * std::conj(basis.xi_star[l].rho);
        CHECK(std::abs(pp.B(l) - expect) < 1e-12 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("mode exponential matches the dense matrix exponential") {
    for (auto& p : {reference_params(), double_point_params(), triple_point_params()}) {
        ProjectedPair pp = pair_for(1, p);
        for (double t : {0.0, 0.3, 1.7}) {
            Eigen::Matrix3cd ref = (pp.A * t).exp();
            CHECK((mode_exp(pp, t) - ref).cwiseAbs().maxCoeff() < 1e-12 * std::exp(2.0 * t));
        }
    }
}

TEST_CASE("hautus rank condition holds at every structure") {
    CHECK(hautus_check(pair_for(1, reference_params())).ok);
    CHECK(hautus_check(pair_for(37, reference_params())).ok);
    CHECK(hautus_check(pair_for(1, double_point_params())).ok);
    CHECK(hautus_check(pair_for(1, triple_point_params())).ok);
    CHECK(hautus_check(zero_mode_matrices(reference_params())).ok);

    HautusReport hr = hautus_check(pair_for(3, reference_params()));
    for (double sv : hr.min_sv) CHECK(sv > 0.0);
}

TEST_CASE("gramian closed form agrees with quadrature and the dense oracle") {
    PhysicalParams p = reference_params();
    const double T = 1.0;
    double worst_quad = 0.0;
    for (int n = 1; n <= 50; ++n) {
        ProjectedPair pp = pair_for(n, p);
        GramianBlock gb = gramian(pp, T);
        Eigen::Matrix3cd Wq = gramian_quadrature(pp, T, 4097);
        double scale = gb.W.cwiseAbs().maxCoeff();
        worst_quad = std::max(worst_quad, (gb.W - Wq).cwiseAbs().maxCoeff() / scale);
    }
    CHECK(worst_quad < 1e-8);

    // Fully independent dense-exponential oracle on a few modes.
    for (int n : {1, 2, 13}) {
        ProjectedPair pp = pair_for(n, p);
        GramianBlock gb = gramian(pp, T);
        Eigen::Matrix3cd Wo = gramian_expm_oracle(pp, T, 4097);
        CHECK((gb.W - Wo).cwiseAbs().maxCoeff() < 1e-9 * Wo.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("jordan gramians agree with the dense oracle") {
    for (auto& p : {double_point_params(), triple_point_params()}) {
        ProjectedPair pp = pair_for(1, p);
        GramianBlock gb = gramian(pp, 1.0);
        Eigen::Matrix3cd Wo = gramian_expm_oracle(pp, 1.0, 4097);
        CHECK((gb.W - Wo).cwiseAbs().maxCoeff() < 1e-9 * Wo.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("gramians are hermitian positive definite with a working inverse") {
    PhysicalParams p = reference_params();
    for (int n : {1, 25, 120}) {
        GramianBlock gb = gramian(pair_for(n, p), 1.0);
        CHECK((gb.W - gb.W.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * gb.norm);
        CHECK(gb.min_eig > 0.0);
        CHECK(gb.norm >= gb.min_eig);
        CHECK(gb.inv_norm == doctest::Approx(1.0 / gb.min_eig).epsilon(1e-10));
        CHECK((gb.W * gb.W_inv - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() <
              1e-10 * gb.norm * gb.inv_norm);
    }
}

TEST_CASE("controlled transfer equals the gramian at the terminal time") {
    // X(T) = int_0^T e^{(T-s)A} B B^* e^{(T-s)A^*} ds = W_T by substitution.
    for (auto& p : {reference_params(), triple_point_params()}) {
        ProjectedPair pp = pair_for(1, p);
        GramianBlock gb = gramian(pp, 1.0);
        Eigen::Matrix3cd X = controlled_transfer(pp, 1.0, 1.0, 4097);
        CHECK((X - gb.W).cwiseAbs().maxCoeff() < 1e-8 * gb.norm);
    }
}

TEST_CASE("minimum-energy seed steers the mode to zero in closed form") {
    for (auto& p : {reference_params(), double_point_params(), triple_point_params()}) {
        ProjectedPair pp = pair_for(1, p);
        const double T = 1.0;
        GramianBlock gb = gramian(pp, T);
        Eigen::Vector3cd d0(Cplx(1.0, 0.5), Cplx(-0.3, 0.8), Cplx(0.2, -1.1));
        Eigen::Vector3cd q = control_seed(pp, gb, d0);

        Eigen::Vector3cd dT = mode_exp(pp, T) * d0 - controlled_transfer(pp, T, T, 4097) * q;
        CHECK(dT.norm() < 1e-8 * d0.norm());

        // Midpoint of the trajectory follows the variation-of-constants value.
        double t = 0.37 * T;
        Eigen::Vector3cd dt = mode_exp(pp, t) * d0 - controlled_transfer(pp, T, t, 4097) * q;
        // Independent check: march the ODE d' = A d + B g with RK4 using the
        // closed-form control values.
        Eigen::Vector3cd y = d0;
        const int steps = 4000;
        double h = t / steps;
        for (int j = 0; j < steps; ++j) {
            double s = j * h;
            auto f = [&](double ss, const Eigen::Vector3cd& yy) -> Eigen::Vector3cd {
                return pp.A * yy + pp.B * control_value(pp, q, T, ss);
            };
            Eigen::Vector3cd k1 = f(s, y);
            Eigen::Vector3cd k2 = f(s + h / 2, y + (h / 2) * k1);
            Eigen::Vector3cd k3 = f(s + h / 2, y + (h / 2) * k2);
            Eigen::Vector3cd k4 = f(s + h, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        CHECK((y - dt).norm() < 1e-8 * (1.0 + dt.norm()));
    }
}

TEST_CASE("control value implements the adjoint observation of the seed") {
    PhysicalParams p = reference_params();
    ProjectedPair pp = pair_for(2, p);
    Eigen::Vector3cd q(Cplx(0.1, 0.2), Cplx(-0.4, 0.0), Cplx(0.3, 0.9));
    double T = 2.0, t = 0.7;
    Cplx expect = -(pp.B.adjoint() * mode_exp(pp, T - t).adjoint() * q)(0);
    CHECK(std::abs(control_value(pp, q, T, t) - expect) < 1e-13 * (1.0 + std::abs(expect)));
}

TEST_CASE("forced response matches fine quadrature for linear inputs") {
    for (auto& p : {reference_params(), double_point_params(), triple_point_params()}) {
        ProjectedPair pp = pair_for(1, p);
        const double T = 1.4, a = 0.3, b = 0.75;
        const Cplx ga(0.8, -0.4), gb_(-0.2, 1.1);
        Eigen::Vector3cd R = forced_response(pp, T, a, b, ga, gb_);

        // Simpson oracle with the dense exponential.
        Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
        const int m = 4096;
        const double h = (b - a) / m;
        for (int j = 0; j <= m; ++j) {
            double wj = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            double s = a + j * h;
            Cplx g = ga + (gb_ - ga) * ((s - a) / (b - a));
            acc += (wj * h / 3.0) * ((pp.A * (T - s)).exp() * pp.B * g);
        }
        CHECK((R - acc).norm() < 1e-10 * (1.0 + acc.norm()));
    }

    // Degenerate interval contributes nothing.
    ProjectedPair pp = pair_for(1, reference_params());
    CHECK(forced_response(pp, 1.0, 0.4, 0.4, Cplx(1, 1), Cplx(2, 2)).norm() < 1e-30);
}

TEST_CASE("mode zero machinery steers the mean with a constant input") {
    PhysicalParams p = reference_params();
    ProjectedPair pp = zero_mode_matrices(p);
    CHECK(pp.dim == 1);
    CHECK(pp.A.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(pp.B(0) - std::sqrt(p.b)) < 1e-15);

    GramianBlock gb = gramian(pp, 2.5);
    CHECK(std::abs(gb.W(0, 0) - Cplx(p.b * 2.5, 0.0)) < 1e-12);
}

TEST_CASE("assembled null control is linear in the initial state") {
    PhysicalParams p = reference_params();
    const int n_max = 8;
    auto bases = build_family(n_max, p);
    ModalState z0 = random_state(n_max, 5);
    ModalState z2 = z0;
    z2.alpha0 *= 2.0;
    for (auto& d : z2.d)
        for (auto& c : d) c *= 2.0;

    NullControlReport r1 = assemble_control(z0, 1.0, p, bases, 64);
    NullControlReport r2 = assemble_control(z2, 1.0, p, bases, 64);

    // Doubling the data doubles the control exactly (powers of two commute
    // with every floating-point operation involved).
    CHECK((r2.signal.modal_series - 2.0 * r1.signal.modal_series).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r2.energy == doctest::Approx(4.0 * r1.energy).epsilon(1e-14));
    CHECK(r2.z0_norm == doctest::Approx(2.0 * r1.z0_norm).epsilon(1e-14));
}

TEST_CASE("null control mode energies sum to the total") {
    PhysicalParams p = reference_params();
    const int n_max = 6;
    auto bases = build_family(n_max, p);
    NullControlReport r = assemble_control(random_state(n_max, 9), 1.0, p, bases, 64);
    REQUIRE(r.mode_energy.size() == std::size_t(n_max) + 1);
    double sum = 0.0;
    for (double e : r.mode_energy) {
        CHECK(e >= 0.0);
        sum += e;
    }
    CHECK(r.energy == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("approx control returns the zero control when the target is free flow") {
    PhysicalParams p = reference_params();
    const int n_max = 5;
    auto bases = build_family(n_max, p);
    ModalState z0 = random_state(n_max, 21);
    const double T = 2.0;

    ModalState zT = z0;  // free evolution: alpha0 fixed, d_n -> e^{TA_n} d_n
    for (int i = 0; i < n_max; ++i) {
        ProjectedPair pp = mode_matrices(bases[i], p);
        Eigen::Vector3cd d(z0.d[i][0], z0.d[i][1], z0.d[i][2]);
        Eigen::Vector3cd dT = mode_exp(pp, T) * d;
        zT.d[i] = {dT(0), dT(1), dT(2)};
    }

    ApproxControlOptions opt;
    opt.nt_hats = 24;
    opt.nx_hats = 8;
    ApproxControlReport r = approx_control(z0, zT, 0.3, 0.6, T, p, bases, opt);
    CHECK(r.terminal_error < 1e-10 * (1.0 + r.z0_norm));
    CHECK(r.energy < 1e-18);
}
