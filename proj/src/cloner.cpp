#include "qkd/cloner.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_open_interval(double theta) {
    if (!(theta > 0.0 && theta < kPi / 4.0)) {
        throw std::invalid_argument("cloning angle must lie in the open interval (0, pi/4)");
    }
}
} // namespace

double CloneAngles::zero_residual() const {
    return std::cos(theta1) * std::cos(theta2) * std::sin(theta3) -
           std::sin(theta1) * std::sin(theta2) * std::cos(theta3);
}

CloneAngles optimal_angles(double theta) {
    check_open_interval(theta);
    return CloneAngles{kPi / 4.0, theta, theta};
}

CloneCoefficients coefficients(const CloneAngles& angles) {
    if (std::abs(angles.zero_residual()) > 1e-8) {
        throw std::invalid_argument("coefficients: angle triple violates the zero condition");
    }
    const double c1 = std::cos(angles.theta1), s1 = std::sin(angles.theta1);
    const double c2 = std::cos(angles.theta2), s2 = std::sin(angles.theta2);
    const double c3 = std::cos(angles.theta3), s3 = std::sin(angles.theta3);
    CloneCoefficients c;
    c.mu = c1 * c2 * c3 + s1 * s2 * s3;
    c.nu = c1 * s2 * c3 + s1 * c2 * s3;
    c.xi = s1 * c2 * c3 - c1 * s2 * s3;
    return c;
}

ShrinkingFactors shrinking_factors(double theta) {
    check_open_interval(theta);
    return ShrinkingFactors{std::sin(2.0 * theta), std::cos(2.0 * theta)};
}

std::pair<double, double> theoretical_fidelities(double theta) {
    check_open_interval(theta);
    return {(1.0 + std::sin(2.0 * theta)) / 2.0, (1.0 + std::cos(2.0 * theta)) / 2.0};
}

Circuit build_circuit(const CloneAngles& angles) {
    if (std::abs(angles.zero_residual()) > 1e-8) {
        throw std::invalid_argument("build_circuit: angle triple violates the zero condition");
    }
    Circuit c;
    c.push_back(CircuitOp::one_qubit(gates::ry(2.0 * angles.theta1), 1));
    c.push_back(CircuitOp::cnot(1, 2));
    c.push_back(CircuitOp::one_qubit(gates::ry(2.0 * angles.theta2), 2));
    c.push_back(CircuitOp::cnot(2, 1));
    c.push_back(CircuitOp::one_qubit(gates::ry(2.0 * angles.theta3), 1));
    c.push_back(CircuitOp::cnot(0, 1));
    c.push_back(CircuitOp::cnot(0, 2));
    c.push_back(CircuitOp::cnot(1, 0));
    c.push_back(CircuitOp::cnot(2, 0));
    return c;
}

std::pair<DensityMatrix2, DensityMatrix2> clone(double phi, double theta) {
    if (phi < 0.0 || phi >= 2.0 * kPi) {
        throw std::invalid_argument("clone: phi must lie in [0, 2 pi)");
    }
    const CloneAngles angles = optimal_angles(theta);
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cd> amps(8, cd(0));
    amps[0] = cd(r); // |000>
    amps[4] = std::polar(r, phi); // |100>
    Statevector state(3, std::move(amps));
    qkd::apply(state, build_circuit(angles));
    return {state.reduced_density(0), state.reduced_density(1)};
}

} // namespace qkd
