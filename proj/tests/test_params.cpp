#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <maxns/errors.hpp>
#include <maxns/params.hpp>

#include <cmath>
#include <limits>
#include <string>

using namespace maxns;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("reference configuration derives its constants") {
    PhysicalParams p = reference_params();
    CHECK(p.rho_s == 1.0);
    CHECK(p.a == 1.0);
    CHECK(p.gamma == 1.0);
    CHECK(p.mu == 1.0);
    CHECK(p.kappa == 1.0);

    CHECK(p.b == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.omega0 == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(p.c_wave == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p.T_star == doctest::Approx(2.0 * std::sqrt(2.0) * kPi).epsilon(1e-15));
}

TEST_CASE("derived constants follow their definitions for generic inputs") {
    const double rho_s = 1.7, a = 0.9, gamma = 1.4, mu = 0.3, kappa = 2.5;
    PhysicalParams p = derive_constants(rho_s, a, gamma, mu, kappa);

    const double b = a * gamma * std::pow(rho_s, gamma - 2.0);
    CHECK(p.b == doctest::Approx(b).epsilon(1e-14));
    CHECK(p.omega0 ==
          doctest::Approx(-b * rho_s * rho_s / (mu + kappa * b * rho_s * rho_s)).epsilon(1e-14));
    CHECK(p.c_wave == doctest::Approx(std::sqrt(b * rho_s + mu / (kappa * rho_s))).epsilon(1e-14));
    CHECK(p.T_star == doctest::Approx(4.0 * kPi / p.c_wave).epsilon(1e-14));
}

TEST_CASE("omega0 sits between the slow bound and zero") {
    // -1/kappa < omega0 < 0 holds for every admissible parameter set because
    // omega0 = -1 / (mu / (b rho_s^2) + kappa).
    for (double kappa : {0.2, 1.0, 5.0}) {
        for (double mu : {0.1, 1.0, 10.0}) {
            PhysicalParams p = derive_constants(2.0, 0.5, 1.3, mu, kappa);
            CHECK(p.omega0 < 0.0);
            CHECK(p.omega0 > -1.0 / p.kappa);
        }
    }
}

TEST_CASE("invalid raw constants are rejected with the offending field named") {
    auto expect_reject = [](double rho_s, double a, double gamma, double mu, double kappa,
                            const std::string& field) {
        try {
            derive_constants(rho_s, a, gamma, mu, kappa);
            FAIL_CHECK("expected ValidationError for " << field);
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };
    expect_reject(0.0, 1, 1, 1, 1, "rho_s");
    expect_reject(-2.0, 1, 1, 1, 1, "rho_s");
    expect_reject(1, 0.0, 1, 1, 1, "a");
    expect_reject(1, 1, -1.0, 1, 1, "gamma");
    expect_reject(1, 1, 1, 0.0, 1, "mu");
    expect_reject(1, 1, 1, 1, 0.0, "kappa");
    expect_reject(1, 1, 1, 1, std::nan(""), "kappa");
    expect_reject(std::numeric_limits<double>::infinity(), 1, 1, 1, 1, "rho_s");
}
