#pragma once

// Bell states, Werner-form inputs, the random depolarized-Bell input
// ensemble, and Bell-basis decompositions.

#include <array>
#include <cmath>
#include <random>

#include "entpur/qlinalg.hpp"

namespace entpur {

/// The four Bell states, labeled by (amplitude bit a, phase bit p):
/// PhiPlus=(0,0), PhiMinus=(0,1), PsiPlus=(1,0), PsiMinus=(1,1).
/// PsiPlus = (|01> + |10>)/sqrt(2) is the purification target.
enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};

inline PureStateVector bell_state(BellKind kind) {
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<cplx> amps(4);
    switch (kind) {
        case BellKind::PhiPlus:  amps[0b00] = s; amps[0b11] = s;  break;
        case BellKind::PhiMinus: amps[0b00] = s; amps[0b11] = -s; break;
        case BellKind::PsiPlus:  amps[0b01] = s; amps[0b10] = s;  break;
        case BellKind::PsiMinus: amps[0b01] = s; amps[0b10] = -s; break;
    }
    return PureStateVector(2, std::move(amps));
}

/// Projector |bell><bell| as a raw matrix.
inline ComplexMatrix bell_projector(BellKind kind) {
    return DensityMatrix::from_pure(bell_state(kind)).matrix;
}

/// f |PsiPlus><PsiPlus| + (1-f)/3 (other three Bell projectors).
inline DensityMatrix werner_from_fidelity(double f) {
    if (!(f >= 0.0 && f <= 1.0))
        throw DomainError("werner_from_fidelity: f must lie in [0,1]");
    ComplexMatrix m(4);
    auto add = [&](const ComplexMatrix& p, double w) {
        for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] += w * p.data[i];
    };
    add(bell_projector(BellKind::PsiPlus), f);
    const double rest = (1.0 - f) / 3.0;
    add(bell_projector(BellKind::PsiMinus), rest);
    add(bell_projector(BellKind::PhiPlus), rest);
    add(bell_projector(BellKind::PhiMinus), rest);
    return DensityMatrix(2, std::move(m));
}

/// (1-q) |PsiPlus><PsiPlus| + q I/4; equals werner_from_fidelity(1 - 3q/4).
inline DensityMatrix depolarized_bell(double q) {
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("depolarized_bell: q must lie in [0,1]");
    ComplexMatrix m = bell_projector(BellKind::PsiPlus);
    for (cplx& v : m.data) v *= 1.0 - q;
    for (int i = 0; i < 4; ++i) m(i, i) += q * 0.25;
    return DensityMatrix(2, std::move(m));
}

/// Uniform double in [0,1) from the top 53 bits of one engine draw. Spelled
/// out (rather than uniform_real_distribution) so the stream is bit-identical
/// across standard library implementations.
inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Ideal Bell pair followed by a depolarizing channel of random strength
/// q ~ Uniform[0,1]; deterministic for a fixed engine state.
inline DensityMatrix random_input_state(std::mt19937_64& rng) {
    return depolarized_bell(uniform53(rng));
}

/// Diagonal weights of a two-qubit state in the Bell basis plus the largest
/// off-diagonal magnitude.
struct BellCoefficients {
    double psi_plus = 0.0;
    double psi_minus = 0.0;
    double phi_plus = 0.0;
    double phi_minus = 0.0;
    double off_diag_norm = 0.0;

    double& weight(BellKind k) {
        switch (k) {
            case BellKind::PhiPlus:  return phi_plus;
            case BellKind::PhiMinus: return phi_minus;
            case BellKind::PsiPlus:  return psi_plus;
            default:                 return psi_minus;
        }
    }
    double weight(BellKind k) const { return const_cast<BellCoefficients*>(this)->weight(k); }
    double sum() const { return psi_plus + psi_minus + phi_plus + phi_minus; }
};

inline BellCoefficients bell_basis_coefficients(const DensityMatrix& rho) {
    if (rho.n_qubits != 2)
        throw DimensionMismatch("bell_basis_coefficients: expects a 2-qubit state");
    BellCoefficients out;
    for (BellKind j : kAllBellKinds) {
        const PureStateVector bj = bell_state(j);
        for (BellKind k : kAllBellKinds) {
            const PureStateVector bk = bell_state(k);
            cplx elem = 0.0;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    elem += std::conj(bj.amplitudes[r]) * rho.matrix(r, c) * bk.amplitudes[c];
            if (j == k)
                out.weight(j) = elem.real();
            else
                out.off_diag_norm = std::max(out.off_diag_norm, std::abs(elem));
        }
    }
    return out;
}

} // namespace entpur
