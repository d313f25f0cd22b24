#pragma once

// One purification round (two copies, bilateral CNOT, parity post-selection)
// and the recursive trajectory iteration on i.i.d. copies.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "entpur/channels.hpp"
#include "entpur/states.hpp"

namespace entpur {

struct ProtocolConfig {
    GateNoise noise{};
    /// Replace the state by its Werner form between rounds (sensitivity probe;
    /// weakens the iterated protocol, off by default).
    bool twirl_between_rounds = false;
    /// Apply the bilateral Rx(pi/2) x Rx(-pi/2) rotation between rounds.
    /// This is the local operation the bare circuit needs for iterated
    /// purification to converge; see bilateral_x_rotation.
    bool rotate_between_rounds = true;
    int max_rounds = 10000;
    double convergence_tol = 1e-9;
    double zero_prob_tol = 1e-14;
};

struct RoundOutcome {
    DensityMatrix output_state;
    double success_probability = 0.0;
    double output_fidelity = 0.0;
};

enum class TerminationCause { Converged, MaxRounds, ZeroProbability };

struct TrajectoryRecord {
    double input_fidelity = 0.0;
    std::vector<double> fidelities;  // F after each round
    TerminationCause terminated_by = TerminationCause::MaxRounds;

    double final_fidelity() const {
        return fidelities.empty() ? input_fidelity : fidelities.back();
    }
};

inline const PureStateVector& purification_target() {
    static const PureStateVector target = bell_state(BellKind::PsiPlus);
    return target;
}

/// One round per the circuit: rho (x) rho on qubits (A1,B1,A2,B2), noisy
/// CNOTs A1->A2 and B1->B2 (kept pair controls, measured pair targets),
/// post-selection on equal outcomes of (A2,B2). Returns the renormalized
/// kept pair, the success probability, and its fidelity with PsiPlus.
inline RoundOutcome purification_round(const DensityMatrix& rho, const ProtocolConfig& config) {
    if (rho.n_qubits != 2)
        throw DimensionMismatch("purification_round: expects a 2-qubit state");

    DensityMatrix joint(4, tensor_product(rho.matrix, rho.matrix));
    joint = noisy_cnot(joint, 0, 2, config.noise);  // Alice: A1 -> A2
    joint = noisy_cnot(joint, 1, 3, config.noise);  // Bob:   B1 -> B2

    PostselectResult sel = postselect_equal_outcomes(joint, 2, 3);
    if (sel.probability < config.zero_prob_tol)
        throw ZeroProbability("purification_round: success probability below zero_prob_tol");

    const double f = fidelity_with_pure(sel.state, purification_target());
    return {std::move(sel.state), sel.probability, f};
}

/// Deterministic equivalent of random bilateral twirling: replaces rho by
/// the Werner state of the same PsiPlus fidelity.
inline DensityMatrix twirl_to_werner(const DensityMatrix& rho) {
    if (rho.n_qubits != 2) throw DimensionMismatch("twirl_to_werner: expects a 2-qubit state");
    return werner_from_fidelity(fidelity_with_pure(rho, purification_target()));
}

/// Local rotation Rx(pi/2) on qubit 0 and Rx(-pi/2) on qubit 1. Fixes
/// PsiPlus (fidelity is preserved exactly) and swaps the PsiMinus and
/// PhiMinus Bell weights, which moves the phase-error weight out of the Psi
/// sector between rounds. Without it the bare circuit pumps PsiMinus weight
/// back into the kept pair and every mixed trajectory stalls at F = 1/2.
inline DensityMatrix bilateral_x_rotation(const DensityMatrix& rho) {
    if (rho.n_qubits != 2)
        throw DimensionMismatch("bilateral_x_rotation: expects a 2-qubit state");
    static const ComplexMatrix u = [] {
        const double s = 1.0 / std::sqrt(2.0);
        ComplexMatrix rx_pos(2), rx_neg(2);  // Rx(pi/2), Rx(-pi/2)
        rx_pos(0, 0) = s;          rx_pos(0, 1) = cplx(0, -s);
        rx_pos(1, 0) = cplx(0, -s); rx_pos(1, 1) = s;
        rx_neg(0, 0) = s;          rx_neg(0, 1) = cplx(0, s);
        rx_neg(1, 0) = cplx(0, s);  rx_neg(1, 1) = s;
        return tensor_product(rx_pos, rx_neg);
    }();
    return apply_two_qubit_unitary(rho, u, 0, 1);
}

/// Iterates purification_round on two identical copies of the previous
/// output, recording F after every round. Stops when |F_{k+1} - F_k| falls
/// below convergence_tol, at max_rounds, or when post-selection hits zero
/// probability; the cause is recorded, never thrown.
inline TrajectoryRecord iterate_trajectory(const DensityMatrix& rho0,
                                           const ProtocolConfig& config) {
    if (config.max_rounds < 1)
        throw DomainError("iterate_trajectory: max_rounds must be at least 1");
    if (!(config.convergence_tol > 0.0))
        throw DomainError("iterate_trajectory: convergence_tol must be positive");

    TrajectoryRecord record;
    record.input_fidelity = fidelity_with_pure(rho0, purification_target());
    record.fidelities.reserve(std::min(config.max_rounds, 256));
    record.terminated_by = TerminationCause::MaxRounds;

    DensityMatrix state = rho0;
    double f_prev = record.input_fidelity;
    for (int round = 0; round < config.max_rounds; ++round) {
        std::optional<RoundOutcome> outcome;
        try {
            outcome = purification_round(state, config);
        } catch (const ZeroProbability&) {
            record.terminated_by = TerminationCause::ZeroProbability;
            break;
        }
        record.fidelities.push_back(outcome->output_fidelity);
        state = std::move(outcome->output_state);
        if (config.twirl_between_rounds) state = twirl_to_werner(state);
        if (config.rotate_between_rounds) state = bilateral_x_rotation(state);
        if (std::abs(outcome->output_fidelity - f_prev) < config.convergence_tol) {
            record.terminated_by = TerminationCause::Converged;
            break;
        }
        f_prev = outcome->output_fidelity;
    }
    return record;
}

} // namespace entpur
