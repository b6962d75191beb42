#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qkd/rng.hpp"

namespace qkd {

using cd = std::complex<double>;

// 2x2 complex matrix, row major.
using Mat2 = std::array<cd, 4>;

namespace gates {

Mat2 identity();
Mat2 ry(double theta); // [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
Mat2 phase(double phi); // diag(1, e^{i phi})
Mat2 hadamard();
Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();
Mat2 s_gate();
Mat2 s_dagger();

bool is_unitary(const Mat2& g, double tol = 1e-10);

} // namespace gates

// Single-qubit density matrix, row major.
struct DensityMatrix2 {
    std::array<cd, 4> m{};

    cd operator()(int row, int col) const { return m[2 * row + col]; }
    cd& operator()(int row, int col) { return m[2 * row + col]; }

    double trace_real() const { return ((*this)(0, 0) + (*this)(1, 1)).real(); }
};

// <psi|rho|psi> for a normalized pure state psi. Throws if psi is not
// normalized within 1e-8.
double fidelity_pure(const DensityMatrix2& rho, const std::array<cd, 2>& psi);

// Dense pure-state register for up to 4 qubits.
//
// Qubit ordering: qubit 0 is the most significant bit of the basis-state
// index, i.e. basis index b encodes |q0 q1 ... q_{n-1}> with q0 = top bit.
class Statevector {
public:
    explicit Statevector(int n_qubits); // |0...0>
    Statevector(int n_qubits, std::vector<cd> amps); // must be normalized

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cd>& amps() const { return amps_; }
    cd amp(std::size_t index) const { return amps_.at(index); }
    double norm_sq() const;

    // Applies I (x) ... (x) gate (x) ... (x) I with gate on `target`.
    // Rejects non-unitary gates (tolerance 1e-10) and bad indices.
    void apply_1q(const Mat2& gate, int target);

    // Flips `target` on basis states where `control` is 1.
    void apply_cnot(int control, int target);

    // One multinomial draw from |amps|^2, returned as a basis index.
    std::size_t sample_index(Rng& rng) const;

    // `shots` independent draws, aggregated into bitstring -> count.
    std::map<std::string, std::int64_t> sample(std::int64_t shots, Rng& rng) const;

    // Partial trace over every qubit except `keep`.
    DensityMatrix2 reduced_density(int keep) const;

    // Basis index -> "q0 q1 ..." bitstring of length n_qubits.
    std::string bitstring(std::size_t index) const;

    // Extracts qubit q's bit from a basis index.
    int bit_of(std::size_t index, int qubit) const;

private:
    int n_;
    std::vector<cd> amps_;
};

// One gate in a compiled circuit.
struct CircuitOp {
    enum class Kind { OneQubit, Cnot };

    Kind kind = Kind::OneQubit;
    Mat2 gate{}; // OneQubit only
    int target = 0;
    int control = -1; // Cnot only

    static CircuitOp one_qubit(const Mat2& gate, int target);
    static CircuitOp cnot(int control, int target);
};

using Circuit = std::vector<CircuitOp>;

void apply(Statevector& state, const Circuit& circuit);

} // namespace qkd
