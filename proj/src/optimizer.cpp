#include "qkd/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

LagrangeSolution optimal_coefficients(double eta_a) {
    if (!(eta_a > 0.0 && eta_a < 1.0)) {
        throw std::invalid_argument("optimal_coefficients: eta_A must lie in (0, 1)");
    }
    const double root2 = std::sqrt(2.0);
    LagrangeSolution s;
    s.mu = 1.0 / root2;
    s.nu = eta_a / root2;
    s.xi = std::sqrt((1.0 - eta_a * eta_a) / 2.0);
    s.eta_b = std::sqrt(1.0 - eta_a * eta_a);
    // From mu = l2 xi and nu = -l1 xi; note l2^2 - l1^2 = 1.
    s.lambda2 = 1.0 / std::sqrt(1.0 - eta_a * eta_a);
    s.lambda1 = -eta_a / std::sqrt(1.0 - eta_a * eta_a);
    return s;
}

std::array<double, 5> lagrange_residuals(const LagrangeSolution& s, double eta_a) {
    return {
        s.xi - s.lambda1 * s.nu - s.lambda2 * s.mu,
        s.lambda1 * s.mu + s.lambda2 * s.nu,
        s.mu - s.lambda2 * s.xi,
        2.0 * s.mu * s.nu - eta_a,
        s.mu * s.mu + s.nu * s.nu + s.xi * s.xi - 1.0,
    };
}

std::vector<std::pair<double, double>> frontier(int grid) {
    if (grid < 2) {
        throw std::invalid_argument("frontier: grid must be >= 2");
    }
    std::vector<std::pair<double, double>> pts;
    pts.reserve(grid);
    for (int i = 1; i <= grid; ++i) {
        const double eta_a = double(i) / double(grid + 1);
        pts.emplace_back(eta_a, std::sqrt(1.0 - eta_a * eta_a));
    }
    return pts;
}

} // namespace qkd
