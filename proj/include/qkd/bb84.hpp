#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkd/noise.hpp"
#include "qkd/statevector.hpp"

namespace qkd {

// Equatorial encoding bases: X = {|+>, |->}, Y = {|+i>, |-i>}.
enum class Basis { X, Y };

enum class Bb84State { Plus, Minus, PlusI, MinusI };

// Encoding convention: bit 1 -> |+> / |+i>, bit 0 -> |-> / |-i>.
Bb84State make_state(int bit, Basis basis);
int state_bit(Bb84State s);
Basis state_basis(Bb84State s);
const char* state_label(Bb84State s); // "plus", "minus", "plus_i", "minus_i"
std::optional<Bb84State> state_from_label(const std::string& label);
double state_phase(Bb84State s); // equatorial phase phi
std::array<cd, 2> state_ket(Bb84State s);

// Gates preparing the state from |0> on `qubit`:
//   |+> = H|0>, |-> = Z H|0>, |+i> = S H|0>, |-i> = S^dag H|0>.
Circuit prep_circuit(Bb84State s, int qubit);

// Gates mapping the basis states onto the computational basis, so that
// measurement outcome 0 <-> bit 1 (|+> or |+i>) and outcome 1 <-> bit 0.
Circuit basis_rotation(Basis basis, int qubit);

// Sifted-key outcome of a protocol run.
struct ProtocolResult {
    std::int64_t rounds = 0;
    std::int64_t sifted_length = 0;
    std::vector<int> alice_bits;
    std::vector<int> bob_bits;
    std::vector<int> eve_bits;
    std::vector<Basis> sifted_bases;
    double e_b_hat = 0.0;
    double e_e_hat = 0.0;
};

// Information quantities in bits per sifted symbol. `s` is the raw key rate
// I(A;B) - I(A;E); consumers clamp to zero when reporting an insecure link.
struct RateReport {
    double i_ab;
    double i_ae;
    double s;
    bool insecure;
};

// Base-2 binary entropy with h(0) = h(1) = 0.
double binary_entropy(double p);

// Eve's error rate induced by the optimal cloner when Bob observes e_B:
// e_E = 1/2 - sqrt(e_B (1 - e_B)).
double eve_qber_from_bob(double e_b);

// 1 - h(e).
double mutual_info(double e);

struct TheoryPoint {
    double e_b;
    double e_e;
    double i_ab;
    double i_ae;
};

// Error rates and mutual informations of the optimal cloner at angle theta,
// evaluated on the closed interval [0, pi/4].
TheoryPoint theory_curves(double theta);

// Runs BB84 steps 1-3. When eve_theta is set, every qubit passes through the
// cloning circuit: Eve keeps qubit 1 and forwards qubit 0 to Bob, measuring
// her clone in Alice's announced basis after sifting. Without an
// eavesdropper, Eve's bits are uniform guesses.
ProtocolResult run_protocol(std::int64_t rounds, std::optional<double> eve_theta,
                            const NoiseModel& noise, std::uint64_t seed);

// Key-rate evaluation from Bob's observed error rate.
RateReport rate_report(double e_b);

} // namespace qkd
