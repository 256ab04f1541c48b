#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parthines/stability.hpp"
#include "support.hpp"

using namespace parthines;
using testing::random_admissible;
using testing::uniform;

TEST_CASE("amplification factors: trapezoidal for discrete flavors, exponential for strang") {
    TestSystemParams p{-2.0, -0.5, 0.3, 0.1};
    const double h = 0.4;
    for (auto flavor : {StabilityFlavor::modified, StabilityFlavor::hines}) {
        const auto sf = stability_functions(p, h, flavor);
        CHECK(sf.alpha == doctest::Approx((1.0 - 0.4) / (1.0 + 0.4)).epsilon(1e-15));
        CHECK(sf.beta == doctest::Approx((1.0 - 0.1) / (1.0 + 0.1)).epsilon(1e-15));
    }
    const auto sf = stability_functions(p, h, StabilityFlavor::strang);
    CHECK(sf.alpha == doctest::Approx(std::exp(-0.8)).epsilon(1e-15));
    CHECK(sf.beta == doctest::Approx(std::exp(-0.2)).epsilon(1e-15));

    CHECK_THROWS_AS(stability_functions(p, -1.0, StabilityFlavor::modified), DomainError);
    CHECK_THROWS_AS(stability_functions(TestSystemParams{2.0, -0.5, 0.3, 0.1}, 1.0,
                                        StabilityFlavor::modified),
                    DomainError);  // trapezoidal pole h*mu = 2
}

TEST_CASE("closed-form recursion matrix agrees with the stage assembly") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = random_admissible(rng);
        const double h = std::exp(uniform(rng, -4.0, 1.0));
        if (std::abs(h * p.mu) >= 1.9 || std::abs(h * p.lambda) >= 1.9) continue;
        const Mat2 closed = recursion_matrix(p, h, StabilityFlavor::modified);
        const Mat2 staged = recursion_matrix_from_stages(p, h);
        CHECK(std::abs(closed.trace() - staged.trace()) <= 1e-12);
        CHECK(std::abs(closed.det() - staged.det()) <= 1e-12);
    }
}

TEST_CASE("characteristic polynomial reproduces trace and determinant") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_admissible(rng);
        const double h = std::exp(uniform(rng, -3.0, 0.0));
        if (std::abs(h * p.mu) >= 1.9 || std::abs(h * p.lambda) >= 1.9) continue;
        for (auto flavor : {StabilityFlavor::modified, StabilityFlavor::strang}) {
            const auto sf = stability_functions(p, h, flavor);
            const auto [a1, a0] = char_poly(sf.alpha, sf.beta, p.gamma());
            const Mat2 C = recursion_matrix(p, h, flavor);
            CHECK(a1 == doctest::Approx(-C.trace()).epsilon(1e-11));
            CHECK(a0 == doctest::Approx(C.det()).epsilon(1e-11));
        }
    }
}

TEST_CASE("root moduli on known polynomials") {
    {
        const auto [m1, m2] = char_roots_modulus(-3.0, 2.0);  // roots 1 and 2
        CHECK(std::max(m1, m2) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(std::min(m1, m2) == doctest::Approx(1.0).epsilon(1e-14));
    }
    {
        const auto [m1, m2] = char_roots_modulus(0.0, 0.25);  // +-i/2
        CHECK(m1 == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(m2 == doctest::Approx(0.5).epsilon(1e-14));
    }
    const Mat2 C{0.0, 1.0, -0.25, 0.0};
    CHECK(spectral_radius(C) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("interval criterion is equivalent to the root condition") {
    std::mt19937 rng(123);
    int checked = 0;
    while (checked < 500) {
        const auto p = random_admissible(rng);
        const double h = std::exp(uniform(rng, -4.0, 2.0));
        if (std::abs(h * p.mu) >= 1.9 || std::abs(h * p.lambda) >= 1.9) continue;
        for (auto flavor :
             {StabilityFlavor::modified, StabilityFlavor::hines, StabilityFlavor::strang}) {
            const auto sf = stability_functions(p, h, flavor);
            if (std::abs(sf.alpha) >= 1.0 || std::abs(sf.beta) >= 1.0) continue;
            const auto verdict = is_stable(sf.alpha, sf.beta, p.gamma());
            if (std::abs(verdict.margin) <= 1e-10) continue;  // skip the boundary band
            const double rho = spectral_radius(recursion_matrix(p, h, flavor));
            CHECK(verdict.stable == (rho < 1.0));
            ++checked;
        }
    }
}

TEST_CASE("lower stability bound formula") {
    CHECK(stability_lower_bound(0.0, 0.0) == doctest::Approx(-1.0));
    const double alpha = 0.5, beta = -0.25;
    CHECK(stability_lower_bound(alpha, beta) ==
          doctest::Approx(-(1.0 + alpha) * (1.0 + beta) / ((1.0 - alpha) * (1.0 - beta))));
    CHECK_THROWS_AS(stability_lower_bound(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(is_stable(1.5, 0.0, 0.0), DomainError);
}

TEST_CASE("critical step of the discrete bound at gamma = -1 is exactly 1") {
    TestSystemParams p{-2.0, -2.0, 2.0, -2.0};  // gamma = -1
    REQUIRE(p.admissible());
    for (auto flavor : {StabilityFlavor::modified, StabilityFlavor::hines}) {
        const auto h_crit = stability_boundary_h(p, flavor);
        REQUIRE(h_crit.has_value());
        CHECK(std::abs(*h_crit - 1.0) <= 1e-10);
    }
}

TEST_CASE("discrete flavors are unconditionally stable for nonnegative coupling") {
    TestSystemParams p{-1.0, -3.0, 0.5, 0.5};  // gamma > 0
    CHECK(!stability_boundary_h(p, StabilityFlavor::modified).has_value());
    TestSystemParams q{-1.0, -3.0, 0.5, 0.0};  // gamma = 0
    CHECK(!stability_boundary_h(q, StabilityFlavor::modified).has_value());
}

TEST_CASE("strang remains stable for gamma in (-1, 0) and loses stability below -1") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_admissible(rng);
        // Rescale b so gamma lands in (-1, 0).
        const double target = uniform(rng, -0.95, -0.05);
        p.b = target * p.mu * p.lambda / p.a;
        REQUIRE(p.admissible());
        CHECK(!stability_boundary_h(p, StabilityFlavor::strang).has_value());
    }
    TestSystemParams p{-2.0, -2.0, 4.0, -2.0};  // gamma = -2
    const auto h_crit = stability_boundary_h(p, StabilityFlavor::strang);
    REQUIRE(h_crit.has_value());
    const auto sf = stability_functions(p, *h_crit, StabilityFlavor::strang);
    CHECK(stability_lower_bound(sf.alpha, sf.beta) == doctest::Approx(p.gamma()).epsilon(1e-9));
}

TEST_CASE("discrete critical step matches the closed-form bound 4/(h^2 mu lambda)") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_admissible(rng);
        const double target = uniform(rng, -5.0, -0.1);
        p.b = target * p.mu * p.lambda / p.a;
        REQUIRE(p.admissible());
        const auto h_crit = stability_boundary_h(p, StabilityFlavor::modified);
        REQUIRE(h_crit.has_value());
        const double analytic = std::sqrt(-4.0 / (target * p.mu * p.lambda));
        CHECK(*h_crit == doctest::Approx(analytic).epsilon(1e-9));
    }
}

TEST_CASE("one-sided Lipschitz constants bound and attain the Rayleigh quotients") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_admissible(rng);
        const auto [nu_f, nu_g] = monotonicity_nu(p);

        // Symmetric parts of the two split fields on the full state space.
        const auto rayleigh_f = [&](double c, double s) {
            return p.mu * c * c + p.a * c * s;  // v^T sym([[mu, a],[0,0]]) v
        };
        const auto rayleigh_g = [&](double c, double s) {
            return p.lambda * s * s + p.b * c * s;
        };
        double best_f = -1e300, best_g = -1e300;
        for (int k = 0; k < 2000; ++k) {
            const double theta = uniform(rng, 0.0, 6.2831853072);
            const double c = std::cos(theta), s = std::sin(theta);
            const double rf = rayleigh_f(c, s), rg = rayleigh_g(c, s);
            CHECK(rf <= nu_f + 1e-9);
            CHECK(rg <= nu_g + 1e-9);
            best_f = std::max(best_f, rf);
            best_g = std::max(best_g, rg);
        }
        // Eigen-direction of the symmetric part attains the constant.
        const double phi_f = 0.5 * std::atan2(p.a, p.mu);
        best_f = std::max(best_f, rayleigh_f(std::cos(phi_f), std::sin(phi_f)));
        const double phi_g = 0.5 * std::atan2(p.b, -p.lambda);
        best_g = std::max(best_g, rayleigh_g(std::cos(phi_g), std::sin(phi_g)));
        CHECK(best_f == doctest::Approx(nu_f).epsilon(1e-6));
        CHECK(best_g == doctest::Approx(nu_g).epsilon(1e-6));
    }
}
