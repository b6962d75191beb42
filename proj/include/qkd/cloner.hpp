#pragma once

#include <utility>

#include "qkd/statevector.hpp"

namespace qkd {

// Rotation angles of the three-qubit cloning circuit. A valid phase-covariant
// instance satisfies the zero condition
//   cos(t1) cos(t2) sin(t3) - sin(t1) sin(t2) cos(t3) = 0.
struct CloneAngles {
    double theta1;
    double theta2;
    double theta3;

    double zero_residual() const;
};

// Cloning-transformation coefficients; mu^2 + nu^2 + xi^2 = 1.
struct CloneCoefficients {
    double mu;
    double nu;
    double xi;
};

// eta_A scales Bob's clone, eta_B Eve's; optimal cloners sit on the circle
// eta_A^2 + eta_B^2 = 1.
struct ShrinkingFactors {
    double eta_a;
    double eta_b;
};

// Optimal angle triple (pi/4, theta, theta) for theta in (0, pi/4).
CloneAngles optimal_angles(double theta);

// (mu, nu, xi) from the angle triple. Throws if the zero condition is
// violated beyond 1e-8.
CloneCoefficients coefficients(const CloneAngles& angles);

// (sin 2theta, cos 2theta) for the optimal cloner.
ShrinkingFactors shrinking_factors(double theta);

// Exact clone fidelities (F_A, F_B) = ((1+sin 2theta)/2, (1+cos 2theta)/2).
std::pair<double, double> theoretical_fidelities(double theta);

// Three-qubit cloning circuit acting on |psi> (x) |0> (x) |0>. Qubit 0
// carries the state to clone, qubit 1 becomes the second clone, qubit 2
// is the ancilla. Endpoint angles are accepted; they are valid circuit
// instances even though the optimal-cloner domain is open.
Circuit build_circuit(const CloneAngles& angles);

// Runs the optimal cloner on the equatorial input (|0> + e^{i phi}|1>)/sqrt(2)
// and returns (rho_A, rho_B): Bob's forwarded clone and Eve's kept clone.
std::pair<DensityMatrix2, DensityMatrix2> clone(double phi, double theta);

} // namespace qkd
