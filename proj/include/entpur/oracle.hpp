#pragma once

// Matrix-free verification oracle for the noiseless round: the bilateral
// CNOT and parity post-selection acting on Bell-diagonal states, computed by
// enumerating Bell-pair combinations through amplitude/phase bit rules.

#include <cmath>
#include <utility>

#include "entpur/states.hpp"

namespace entpur {

/// Bell state as (amplitude bit, phase bit):
/// Phi+=(0,0), Phi-=(0,1), Psi+=(1,0), Psi-=(1,1).
struct BellBitLabel {
    int amplitude_bit = 0;
    int phase_bit = 0;

    friend bool operator==(const BellBitLabel&, const BellBitLabel&) = default;
};

inline BellBitLabel bell_bits(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus:  return {0, 0};
        case BellKind::PhiMinus: return {0, 1};
        case BellKind::PsiPlus:  return {1, 0};
        default:                 return {1, 1};
    }
}

inline BellKind bell_kind(const BellBitLabel& label) {
    if (label.amplitude_bit == 0)
        return label.phase_bit == 0 ? BellKind::PhiPlus : BellKind::PhiMinus;
    return label.phase_bit == 0 ? BellKind::PsiPlus : BellKind::PsiMinus;
}

/// Bilateral CNOT on a (source pair, target pair) Bell-state product:
/// amplitude bits propagate source -> target, phase bits target -> source.
inline std::pair<BellBitLabel, BellBitLabel> bilateral_cnot_action(BellBitLabel source,
                                                                   BellBitLabel target) {
    const BellBitLabel source_out{source.amplitude_bit, source.phase_bit ^ target.phase_bit};
    const BellBitLabel target_out{source.amplitude_bit ^ target.amplitude_bit, target.phase_bit};
    return {source_out, target_out};
}

/// One noiseless round on a Bell-diagonal state: all 16 Bell-pair
/// combinations are enumerated with product weights; a combination is kept
/// when the post-CNOT target has amplitude bit 0 (its two measurement
/// outcomes agree), and kept source weights are pooled and renormalized.
/// Returns the output weights and the success probability.
inline std::pair<BellCoefficients, double> noiseless_round_bell_diagonal(
    const BellCoefficients& weights) {
    for (BellKind k : kAllBellKinds)
        if (weights.weight(k) < -1e-12)
            throw DomainError("noiseless_round_bell_diagonal: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-9)
        throw DomainError("noiseless_round_bell_diagonal: weights must sum to 1");

    BellCoefficients kept;
    double kept_weight = 0.0;
    for (BellKind source : kAllBellKinds) {
        for (BellKind target : kAllBellKinds) {
            const double w = weights.weight(source) * weights.weight(target);
            const auto [source_out, target_out] =
                bilateral_cnot_action(bell_bits(source), bell_bits(target));
            if (target_out.amplitude_bit != 0) continue;
            kept.weight(bell_kind(source_out)) += w;
            kept_weight += w;
        }
    }
    for (BellKind k : kAllBellKinds) kept.weight(k) /= kept_weight;
    return {kept, kept_weight};
}

} // namespace entpur
