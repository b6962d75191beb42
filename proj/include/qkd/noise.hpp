#pragma once

#include <span>
#include <string>

#include "qkd/statevector.hpp"

namespace qkd {

// Stochastic gate-error rates. Defaults are the noiseless model; the
// hardware-like preset used in the experiments is {0.0004, 0.027, 0}.
struct NoiseModel {
    double p1 = 0.0; // per single-qubit gate
    double p2 = 0.0; // per two-qubit gate, applied to both qubits
    double p_readout = 0.0; // per measured bit

    bool is_zero() const { return p1 == 0.0 && p2 == 0.0 && p_readout == 0.0; }
    bool gates_noiseless() const { return p1 == 0.0 && p2 == 0.0; }
    void validate() const;

    static NoiseModel hardware_default() { return NoiseModel{0.0004, 0.027, 0.0}; }
};

// With probability p per target qubit, applies a uniformly random Pauli from
// {X, Y, Z} to that qubit (one depolarizing trajectory step).
void apply_gate_noise(Statevector& state, std::span<const int> targets, double p, Rng& rng);

// Each '0'/'1' character independently flipped with probability p_readout.
std::string flip_readout(const std::string& bits, double p_readout, Rng& rng);

// Runs the circuit with a depolarizing trajectory step after every gate, on
// that gate's qubits (both qubits for a CNOT).
void apply_with_noise(Statevector& state, const Circuit& circuit, const NoiseModel& noise, Rng& rng);

} // namespace qkd
