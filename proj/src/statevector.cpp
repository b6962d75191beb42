#include "qkd/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

namespace gates {

Mat2 identity() { return {cd(1), cd(0), cd(0), cd(1)}; }

Mat2 ry(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {cd(c), cd(-s), cd(s), cd(c)};
}

Mat2 phase(double phi) {
    return {cd(1), cd(0), cd(0), std::polar(1.0, phi)};
}

Mat2 hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    return {cd(r), cd(r), cd(r), cd(-r)};
}

Mat2 pauli_x() { return {cd(0), cd(1), cd(1), cd(0)}; }
Mat2 pauli_y() { return {cd(0), cd(0, -1), cd(0, 1), cd(0)}; }
Mat2 pauli_z() { return {cd(1), cd(0), cd(0), cd(-1)}; }
Mat2 s_gate() { return phase(M_PI / 2.0); }
Mat2 s_dagger() { return phase(-M_PI / 2.0); }

bool is_unitary(const Mat2& g, double tol) {
    // U^dag U == I, entry-wise.
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            cd e(0);
            for (int k = 0; k < 2; ++k) {
                e += std::conj(g[2 * k + i]) * g[2 * k + j];
            }
            if (std::abs(e - (i == j ? cd(1) : cd(0))) > tol) return false;
        }
    }
    return true;
}

} // namespace gates

double fidelity_pure(const DensityMatrix2& rho, const std::array<cd, 2>& psi) {
    const double nrm = std::norm(psi[0]) + std::norm(psi[1]);
    if (std::abs(nrm - 1.0) > 1e-8) {
        throw std::invalid_argument("fidelity_pure: psi is not normalized");
    }
    cd f(0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            f += std::conj(psi[i]) * rho(i, j) * psi[j];
        }
    }
    return f.real();
}

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 4) {
        throw std::invalid_argument("Statevector: n_qubits must be in [1, 4]");
    }
    amps_.assign(std::size_t(1) << n_qubits, cd(0));
    amps_[0] = cd(1);
}

Statevector::Statevector(int n_qubits, std::vector<cd> amps) : n_(n_qubits), amps_(std::move(amps)) {
    if (n_qubits < 1 || n_qubits > 4) {
        throw std::invalid_argument("Statevector: n_qubits must be in [1, 4]");
    }
    if (amps_.size() != (std::size_t(1) << n_qubits)) {
        throw std::invalid_argument("Statevector: amplitude count must be 2^n");
    }
    if (std::abs(norm_sq() - 1.0) > 1e-8) {
        throw std::invalid_argument("Statevector: amplitudes are not normalized");
    }
}

double Statevector::norm_sq() const {
    double s = 0.0;
    for (const cd& a : amps_) s += std::norm(a);
    return s;
}

void Statevector::apply_1q(const Mat2& gate, int target) {
    if (target < 0 || target >= n_) {
        throw std::out_of_range("apply_1q: target out of range");
    }
    if (!gates::is_unitary(gate)) {
        throw std::invalid_argument("apply_1q: gate is not unitary");
    }
    // Qubit 0 is the most significant index bit.
    const std::size_t stride = std::size_t(1) << (n_ - 1 - target);
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & stride) continue;
        const cd a0 = amps_[base];
        const cd a1 = amps_[base | stride];
        amps_[base] = gate[0] * a0 + gate[1] * a1;
        amps_[base | stride] = gate[2] * a0 + gate[3] * a1;
    }
}

void Statevector::apply_cnot(int control, int target) {
    if (control < 0 || control >= n_ || target < 0 || target >= n_) {
        throw std::out_of_range("apply_cnot: qubit index out of range");
    }
    if (control == target) {
        throw std::invalid_argument("apply_cnot: control equals target");
    }
    const std::size_t cbit = std::size_t(1) << (n_ - 1 - control);
    const std::size_t tbit = std::size_t(1) << (n_ - 1 - target);
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(amps_[i], amps_[i | tbit]);
        }
    }
}

std::size_t Statevector::sample_index(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        acc += std::norm(amps_[i]);
        if (u < acc) return i;
    }
    return dim - 1; // roundoff fallback
}

std::map<std::string, std::int64_t> Statevector::sample(std::int64_t shots, Rng& rng) const {
    if (shots < 1) {
        throw std::invalid_argument("sample: shots must be >= 1");
    }
    std::map<std::string, std::int64_t> counts;
    for (std::int64_t s = 0; s < shots; ++s) {
        ++counts[bitstring(sample_index(rng))];
    }
    return counts;
}

DensityMatrix2 Statevector::reduced_density(int keep) const {
    if (keep < 0 || keep >= n_) {
        throw std::out_of_range("reduced_density: index out of range");
    }
    const std::size_t kbit = std::size_t(1) << (n_ - 1 - keep);
    const std::size_t dim = amps_.size();
    DensityMatrix2 rho;
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & kbit) continue; // i has keep-bit 0
        const std::size_t j = i | kbit;
        rho(0, 0) += amps_[i] * std::conj(amps_[i]);
        rho(0, 1) += amps_[i] * std::conj(amps_[j]);
        rho(1, 0) += amps_[j] * std::conj(amps_[i]);
        rho(1, 1) += amps_[j] * std::conj(amps_[j]);
    }
    return rho;
}

std::string Statevector::bitstring(std::size_t index) const {
    std::string s(n_, '0');
    for (int q = 0; q < n_; ++q) {
        s[q] = bit_of(index, q) ? '1' : '0';
    }
    return s;
}

int Statevector::bit_of(std::size_t index, int qubit) const {
    return (index >> (n_ - 1 - qubit)) & 1u;
}

CircuitOp CircuitOp::one_qubit(const Mat2& gate, int target) {
    CircuitOp op;
    op.kind = Kind::OneQubit;
    op.gate = gate;
    op.target = target;
    return op;
}

CircuitOp CircuitOp::cnot(int control, int target) {
    CircuitOp op;
    op.kind = Kind::Cnot;
    op.control = control;
    op.target = target;
    return op;
}

void apply(Statevector& state, const Circuit& circuit) {
    for (const CircuitOp& op : circuit) {
        if (op.kind == CircuitOp::Kind::OneQubit) {
            state.apply_1q(op.gate, op.target);
        } else {
            state.apply_cnot(op.control, op.target);
        }
    }
}

} // namespace qkd
