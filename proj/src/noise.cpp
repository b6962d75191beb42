#include "qkd/noise.hpp"

#include <stdexcept>

namespace qkd {

void NoiseModel::validate() const {
    for (double p : {p1, p2, p_readout}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("NoiseModel: probabilities must lie in [0, 1]");
        }
    }
}

void apply_gate_noise(Statevector& state, std::span<const int> targets, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("apply_gate_noise: p must lie in [0, 1]");
    }
    if (p == 0.0) return;
    for (int q : targets) {
        if (!rng.bernoulli(p)) continue;
        switch (rng.uniform_int(3)) {
            case 0: state.apply_1q(gates::pauli_x(), q); break;
            case 1: state.apply_1q(gates::pauli_y(), q); break;
            default: state.apply_1q(gates::pauli_z(), q); break;
        }
    }
}

std::string flip_readout(const std::string& bits, double p_readout, Rng& rng) {
    if (!(p_readout >= 0.0 && p_readout <= 1.0)) {
        throw std::invalid_argument("flip_readout: p must lie in [0, 1]");
    }
    std::string out = bits;
    if (p_readout == 0.0) return out;
    for (char& c : out) {
        if (rng.bernoulli(p_readout)) c = (c == '0') ? '1' : '0';
    }
    return out;
}

void apply_with_noise(Statevector& state, const Circuit& circuit, const NoiseModel& noise, Rng& rng) {
    noise.validate();
    for (const CircuitOp& op : circuit) {
        if (op.kind == CircuitOp::Kind::OneQubit) {
            state.apply_1q(op.gate, op.target);
            const int targets[] = {op.target};
            apply_gate_noise(state, targets, noise.p1, rng);
        } else {
            state.apply_cnot(op.control, op.target);
            const int targets[] = {op.control, op.target};
            apply_gate_noise(state, targets, noise.p2, rng);
        }
    }
}

} // namespace qkd
