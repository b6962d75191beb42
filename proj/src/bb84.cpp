#include "qkd/bb84.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/cloner.hpp"

namespace qkd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Bb84State make_state(int bit, Basis basis) {
    if (basis == Basis::X) return bit ? Bb84State::Plus : Bb84State::Minus;
    return bit ? Bb84State::PlusI : Bb84State::MinusI;
}

int state_bit(Bb84State s) {
    return (s == Bb84State::Plus || s == Bb84State::PlusI) ? 1 : 0;
}

Basis state_basis(Bb84State s) {
    return (s == Bb84State::Plus || s == Bb84State::Minus) ? Basis::X : Basis::Y;
}

const char* state_label(Bb84State s) {
    switch (s) {
        case Bb84State::Plus: return "plus";
        case Bb84State::Minus: return "minus";
        case Bb84State::PlusI: return "plus_i";
        default: return "minus_i";
    }
}

std::optional<Bb84State> state_from_label(const std::string& label) {
    if (label == "plus") return Bb84State::Plus;
    if (label == "minus") return Bb84State::Minus;
    if (label == "plus_i") return Bb84State::PlusI;
    if (label == "minus_i") return Bb84State::MinusI;
    return std::nullopt;
}

double state_phase(Bb84State s) {
    switch (s) {
        case Bb84State::Plus: return 0.0;
        case Bb84State::Minus: return kPi;
        case Bb84State::PlusI: return kPi / 2.0;
        default: return 3.0 * kPi / 2.0;
    }
}

std::array<cd, 2> state_ket(Bb84State s) {
    const double r = 1.0 / std::sqrt(2.0);
    return {cd(r), std::polar(r, state_phase(s))};
}

Circuit prep_circuit(Bb84State s, int qubit) {
    Circuit c;
    c.push_back(CircuitOp::one_qubit(gates::hadamard(), qubit));
    switch (s) {
        case Bb84State::Plus: break;
        case Bb84State::Minus: c.push_back(CircuitOp::one_qubit(gates::pauli_z(), qubit)); break;
        case Bb84State::PlusI: c.push_back(CircuitOp::one_qubit(gates::s_gate(), qubit)); break;
        case Bb84State::MinusI: c.push_back(CircuitOp::one_qubit(gates::s_dagger(), qubit)); break;
    }
    return c;
}

Circuit basis_rotation(Basis basis, int qubit) {
    Circuit c;
    if (basis == Basis::Y) {
        c.push_back(CircuitOp::one_qubit(gates::s_dagger(), qubit));
    }
    c.push_back(CircuitOp::one_qubit(gates::hadamard(), qubit));
    return c;
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("binary_entropy: p must lie in [0, 1]");
    }
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double eve_qber_from_bob(double e_b) {
    if (!(e_b >= 0.0 && e_b <= 0.5)) {
        throw std::invalid_argument("eve_qber_from_bob: e_B must lie in [0, 1/2]");
    }
    return 0.5 - std::sqrt(e_b * (1.0 - e_b));
}

double mutual_info(double e) {
    if (!(e >= 0.0 && e <= 0.5)) {
        throw std::invalid_argument("mutual_info: e must lie in [0, 1/2]");
    }
    return 1.0 - binary_entropy(e);
}

TheoryPoint theory_curves(double theta) {
    if (!(theta >= 0.0 && theta <= kPi / 4.0)) {
        throw std::invalid_argument("theory_curves: theta must lie in [0, pi/4]");
    }
    TheoryPoint p;
    p.e_b = (1.0 - std::sin(2.0 * theta)) / 2.0;
    p.e_e = (1.0 - std::cos(2.0 * theta)) / 2.0;
    p.i_ab = mutual_info(p.e_b);
    p.i_ae = mutual_info(p.e_e);
    return p;
}

ProtocolResult run_protocol(std::int64_t rounds, std::optional<double> eve_theta,
                            const NoiseModel& noise, std::uint64_t seed) {
    if (rounds < 1) {
        throw std::invalid_argument("run_protocol: rounds must be >= 1");
    }
    noise.validate();

    Circuit eve_circuit;
    if (eve_theta) {
        eve_circuit = build_circuit(optimal_angles(*eve_theta));
    }

    ProtocolResult result;
    result.rounds = rounds;
    std::int64_t bob_errors = 0, eve_errors = 0;

    for (std::int64_t r = 0; r < rounds; ++r) {
        Rng rng = Rng::derive(seed, {static_cast<std::uint64_t>(r)});
        const int a_bit = static_cast<int>(rng.uniform_int(2));
        const Basis a_basis = rng.uniform_int(2) ? Basis::Y : Basis::X;
        const Basis b_basis = rng.uniform_int(2) ? Basis::Y : Basis::X;
        const Bb84State sent = make_state(a_bit, a_basis);

        Circuit circuit = prep_circuit(sent, 0);
        if (eve_theta) {
            circuit.insert(circuit.end(), eve_circuit.begin(), eve_circuit.end());
        }
        for (const CircuitOp& op : basis_rotation(b_basis, 0)) circuit.push_back(op);
        if (eve_theta) {
            // Eve measures her stored clone in Alice's announced basis.
            for (const CircuitOp& op : basis_rotation(a_basis, 1)) circuit.push_back(op);
        }

        Statevector state(eve_theta ? 3 : 1);
        apply_with_noise(state, circuit, noise, rng);
        std::string outcome = state.bitstring(state.sample_index(rng));
        // Only q0 (Bob) and, with an eavesdropper, q1 (Eve) are read out;
        // the ancilla is discarded unmeasured.
        const std::size_t measured = eve_theta ? 2 : 1;
        outcome = flip_readout(outcome.substr(0, measured), noise.p_readout, rng) +
                  outcome.substr(measured);

        const int bob_bit = outcome[0] == '0' ? 1 : 0;
        int eve_bit;
        if (eve_theta) {
            eve_bit = outcome[1] == '0' ? 1 : 0;
        } else {
            eve_bit = static_cast<int>(rng.uniform_int(2));
        }

        if (a_basis != b_basis) continue; // sifted away
        result.alice_bits.push_back(a_bit);
        result.bob_bits.push_back(bob_bit);
        result.eve_bits.push_back(eve_bit);
        result.sifted_bases.push_back(a_basis);
        bob_errors += (bob_bit != a_bit);
        eve_errors += (eve_bit != a_bit);
    }

    result.sifted_length = static_cast<std::int64_t>(result.alice_bits.size());
    if (result.sifted_length > 0) {
        result.e_b_hat = double(bob_errors) / double(result.sifted_length);
        result.e_e_hat = double(eve_errors) / double(result.sifted_length);
    }
    return result;
}

RateReport rate_report(double e_b) {
    if (!(e_b >= 0.0 && e_b <= 0.5)) {
        throw std::invalid_argument("rate_report: e_B must lie in [0, 1/2]");
    }
    RateReport rep;
    rep.i_ab = mutual_info(e_b);
    rep.i_ae = mutual_info(eve_qber_from_bob(e_b));
    // I(B;E) = I(A;E) under this symmetric individual attack.
    rep.s = rep.i_ab - rep.i_ae;
    rep.insecure = rep.s <= 0.0;
    return rep;
}

} // namespace qkd
