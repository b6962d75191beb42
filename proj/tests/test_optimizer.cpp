#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qkd/optimizer.hpp"
#include "qkd/rng.hpp"

using namespace qkd;

namespace {

// Brute-force oracle: maximize 2 mu xi over the constraint surface by a
// projected 1e-3 sweep in mu (nu and xi are then determined).
double brute_force_eta_b(double eta_a) {
    double best = 0.0;
    for (double mu = 1e-3; mu < 1.0; mu += 1e-3) {
        const double nu = eta_a / (2.0 * mu);
        const double xi_sq = 1.0 - mu * mu - nu * nu;
        if (xi_sq < 0.0) continue;
        best = std::max(best, 2.0 * mu * std::sqrt(xi_sq));
    }
    return best;
}

} // namespace

TEST_CASE("optimal_coefficients closed form") {
    SUBCASE("symmetric point") {
        const LagrangeSolution s = optimal_coefficients(std::sqrt(2.0) / 2.0);
        CHECK(s.eta_b == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
        CHECK(s.nu == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.xi == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("degenerate limit") {
        const LagrangeSolution s = optimal_coefficients(1e-9);
        CHECK(s.eta_b == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(s.nu) < 1e-9);
    }
    SUBCASE("3-4-5 check") {
        const LagrangeSolution s = optimal_coefficients(0.6);
        CHECK(s.eta_b == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(optimal_coefficients(0.0), std::invalid_argument);
        CHECK_THROWS_AS(optimal_coefficients(1.0), std::invalid_argument);
        CHECK_THROWS_AS(optimal_coefficients(1.2), std::invalid_argument);
    }
}

TEST_CASE("lagrange_residuals") {
    SUBCASE("closed form satisfies all five equations") {
        Rng rng(3);
        for (int i = 0; i < 20; ++i) {
            const double eta_a = 0.02 + rng.uniform() * 0.96;
            const LagrangeSolution s = optimal_coefficients(eta_a);
            CHECK(s.lambda2 * s.lambda2 - s.lambda1 * s.lambda1 ==
                  doctest::Approx(1.0).epsilon(1e-10));
            for (double r : lagrange_residuals(s, eta_a)) {
                CHECK(std::abs(r) < 1e-10);
            }
        }
    }
    SUBCASE("sensitivity to perturbation") {
        LagrangeSolution s = optimal_coefficients(0.5);
        s.mu += 0.01;
        const auto res = lagrange_residuals(s, 0.5);
        CHECK((std::abs(res[2]) > 1e-3 || std::abs(res[4]) > 1e-3));
    }
    SUBCASE("infeasible triple violates normalization") {
        const LagrangeSolution s{0.9, 0.9, 0.9, 0.0, 1.0, 0.0};
        CHECK(std::abs(lagrange_residuals(s, 0.5)[4]) > 1e-3);
    }
    SUBCASE("negative branch matches up to global sign") {
        const double eta_a = 0.37;
        LagrangeSolution s = optimal_coefficients(eta_a);
        s.mu = -s.mu;
        s.nu = -s.nu;
        s.xi = -s.xi;
        // eta_B = 2 mu xi is invariant under the global sign flip.
        CHECK(2.0 * s.mu * s.xi == doctest::Approx(s.eta_b).epsilon(1e-12));
        CHECK(std::abs(lagrange_residuals(s, eta_a)[3]) < 1e-12);
        CHECK(std::abs(lagrange_residuals(s, eta_a)[4]) < 1e-12);
    }
}

TEST_CASE("frontier") {
    SUBCASE("grid of 3") {
        const auto pts = frontier(3);
        REQUIRE(pts.size() == 3);
        CHECK(pts[0].first == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(pts[0].second == doctest::Approx(0.96825).epsilon(1e-5));
        CHECK(pts[1].second == doctest::Approx(0.86603).epsilon(1e-5));
        CHECK(pts[2].second == doctest::Approx(0.66144).epsilon(1e-5));
    }
    SUBCASE("circle relation and monotonicity") {
        const auto pts = frontier(50);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto [a, b] = pts[i];
            CHECK(a > 0.0);
            CHECK(a < 1.0);
            CHECK(std::abs(a * a + b * b - 1.0) < 1e-12);
            if (i > 0) CHECK(b < pts[i - 1].second);
        }
    }
    SUBCASE("grid bound") {
        CHECK_THROWS_AS(frontier(1), std::invalid_argument);
    }
}

TEST_CASE("closed form matches the brute-force constrained search") {
    for (int i = 1; i <= 20; ++i) {
        const double eta_a = double(i) / 21.0;
        const double expected = std::sqrt(1.0 - eta_a * eta_a);
        CHECK(std::abs(brute_force_eta_b(eta_a) - expected) < 5e-3);
        CHECK(std::abs(optimal_coefficients(eta_a).eta_b - expected) < 1e-12);
    }
}
