#pragma once

#include <array>
#include <utility>
#include <vector>

namespace qkd {

// Stationary point of the constrained clone-quality trade-off: maximize
// eta_B = 2 mu xi subject to 2 mu nu = eta_A and mu^2 + nu^2 + xi^2 = 1.
struct LagrangeSolution {
    double mu;
    double nu;
    double xi;
    double lambda1;
    double lambda2;
    double eta_b;
};

// Closed-form optimum for a fixed eta_A in (0, 1). Positive branch only.
LagrangeSolution optimal_coefficients(double eta_a);

// Residuals of the five stationarity/constraint equations:
//   [xi - l1 nu - l2 mu, l1 mu + l2 nu, mu - l2 xi, 2 mu nu - eta_A,
//    mu^2 + nu^2 + xi^2 - 1]
std::array<double, 5> lagrange_residuals(const LagrangeSolution& sol, double eta_a);

// (eta_A, eta_B) pairs on the optimal frontier eta_A^2 + eta_B^2 = 1,
// sampled at eta_A = i/(grid+1), i = 1..grid (endpoints excluded).
std::vector<std::pair<double, double>> frontier(int grid);

} // namespace qkd
