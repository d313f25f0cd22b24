#pragma once

// The CNOT gate and the gate-noise model: a two-qubit depolarizing channel
// applied to the gate's qubits after each CNOT.

#include "entpur/qlinalg.hpp"

namespace entpur {

/// Probability that a CNOT fully depolarizes the two qubits it acts on.
struct GateNoise {
    double p_gate = 0.0;
};

/// CNOT with the control as the more significant slot: |10> <-> |11>.
inline ComplexMatrix cnot_unitary() {
    ComplexMatrix u(4);
    u(0b00, 0b00) = 1.0;
    u(0b01, 0b01) = 1.0;
    u(0b11, 0b10) = 1.0;
    u(0b10, 0b11) = 1.0;
    return u;
}

/// rho' = (1-p) rho + p (I/4 on {q_a,q_b}) (x) tr_{q_a,q_b}(rho).
/// The noise term is the maximally mixed state on the gate qubits, tensored
/// with the untouched reduced state of the rest; trace preserving.
inline DensityMatrix depolarize_two_qubits(const DensityMatrix& rho, int q_a, int q_b, double p) {
    detail::require_two_distinct_qubits(q_a, q_b, rho.n_qubits, "depolarize_two_qubits");
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("depolarize_two_qubits: p must lie in [0,1]");

    const int n = rho.n_qubits;
    const int d = rho.dim();
    ComplexMatrix out = rho.matrix;
    for (cplx& v : out.data) v *= 1.0 - p;

    if (n == 2) {
        for (int i = 0; i < d; ++i) out(i, i) += p * 0.25;
        return DensityMatrix(n, std::move(out));
    }

    const DensityMatrix reduced = partial_trace(rho, {q_a, q_b});
    const int bit_a = 1 << (n - 1 - q_a);
    const int bit_b = 1 << (n - 1 - q_b);
    const int mask = bit_a | bit_b;

    std::vector<int> kept_bits;
    for (int q = 0; q < n; ++q)
        if (q != q_a && q != q_b) kept_bits.push_back(1 << (n - 1 - q));
    const int m = static_cast<int>(kept_bits.size());
    auto kept_index = [&](int i) {
        int r = 0;
        for (int k = 0; k < m; ++k)
            if (i & kept_bits[k]) r |= 1 << (m - 1 - k);
        return r;
    };

    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if ((r & mask) == (c & mask))
                out(r, c) += p * 0.25 * reduced.matrix(kept_index(r), kept_index(c));
    return DensityMatrix(n, std::move(out));
}

/// Ideal CNOT(control -> target) followed by the two-qubit depolarizer on
/// exactly the gate's qubits.
inline DensityMatrix noisy_cnot(const DensityMatrix& rho, int control, int target,
                                const GateNoise& noise) {
    const DensityMatrix after_gate = apply_two_qubit_unitary(rho, cnot_unitary(), control, target);
    return depolarize_two_qubits(after_gate, control, target, noise.p_gate);
}

} // namespace entpur
