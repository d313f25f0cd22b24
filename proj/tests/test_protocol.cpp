#include <catch2/catch_amalgamated.hpp>

#include "entpur/entpur.hpp"
#include "test_support.hpp"

using namespace entpur;
using testsupport::bell_diagonal;
using testsupport::make_rng;
using testsupport::noisy_round_closed_form;
using testsupport::random_bell_weights;
using testsupport::random_density_matrix;

namespace {

ProtocolConfig config_at(double p_gate) {
    ProtocolConfig c;
    c.noise.p_gate = p_gate;
    return c;
}

DensityMatrix maximally_mixed_2q() {
    ComplexMatrix m = ComplexMatrix::identity(4);
    for (cplx& v : m.data) v *= 0.25;
    return DensityMatrix(2, std::move(m));
}

} // namespace

TEST_CASE("purification_round on the target state is transparent") {
    const RoundOutcome out = purification_round(
        DensityMatrix::from_pure(bell_state(BellKind::PsiPlus)), config_at(0.0));
    REQUIRE(out.output_fidelity == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(out.success_probability == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("purification_round on the maximally mixed state") {
    for (double p : {0.0, 0.3, 0.9}) {
        const RoundOutcome out = purification_round(maximally_mixed_2q(), config_at(p));
        REQUIRE(out.output_fidelity == Catch::Approx(0.25).margin(1e-9));
        REQUIRE(out.success_probability == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(max_abs_diff(out.output_state.matrix, maximally_mixed_2q().matrix) <= 1e-12);
    }
}

TEST_CASE("noiseless round on werner(0.75) hits the enumeration constants") {
    const RoundOutcome out = purification_round(werner_from_fidelity(0.75), config_at(0.0));
    REQUIRE(out.output_fidelity == Catch::Approx(41.0 / 52.0).margin(1e-12));
    REQUIRE(out.success_probability == Catch::Approx(13.0 / 18.0).margin(1e-12));
}

TEST_CASE("F=0.5 is a one-round fixed point of the noiseless map") {
    const RoundOutcome out = purification_round(werner_from_fidelity(0.5), config_at(0.0));
    REQUIRE(out.output_fidelity == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("swapping the two identical copies leaves the round outcome unchanged") {
    // Same circuit wired with pair 2 as controls/kept and pair 1 as
    // targets/measured; for i.i.d. copies the outcome must match.
    auto rng = make_rng(51);
    const DensityMatrix rho = random_density_matrix(rng, 2);
    const ProtocolConfig config = config_at(0.07);

    const RoundOutcome reference = purification_round(rho, config);

    DensityMatrix joint(4, tensor_product(rho.matrix, rho.matrix));
    joint = noisy_cnot(joint, 2, 0, config.noise);
    joint = noisy_cnot(joint, 3, 1, config.noise);
    const PostselectResult sel = postselect_equal_outcomes(joint, 0, 1);

    REQUIRE(sel.probability == Catch::Approx(reference.success_probability).margin(1e-12));
    REQUIRE(max_abs_diff(sel.state.matrix, reference.output_state.matrix) <= 1e-12);
}

TEST_CASE("Alice's and Bob's noisy CNOTs commute") {
    auto rng = make_rng(52);
    const DensityMatrix rho = random_density_matrix(rng, 2);
    const GateNoise noise{0.08};

    DensityMatrix joint(4, tensor_product(rho.matrix, rho.matrix));
    const DensityMatrix ab = noisy_cnot(noisy_cnot(joint, 0, 2, noise), 1, 3, noise);
    const DensityMatrix ba = noisy_cnot(noisy_cnot(joint, 1, 3, noise), 0, 2, noise);
    REQUIRE(max_abs_diff(ab.matrix, ba.matrix) <= 1e-12);
}

TEST_CASE("noiseless round keeps Bell-diagonal states Bell diagonal") {
    auto rng = make_rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = random_bell_weights(rng);
        const RoundOutcome out =
            purification_round(bell_diagonal(w[0], w[1], w[2], w[3]), config_at(0.0));
        REQUIRE(bell_basis_coefficients(out.output_state).off_diag_norm <= 1e-10);
    }
}

TEST_CASE("round success probability stays within [0,1]") {
    auto rng = make_rng(54);
    for (double p : {0.0, 0.2, 0.7}) {
        const RoundOutcome out = purification_round(random_density_matrix(rng, 2), config_at(p));
        REQUIRE(out.success_probability >= 0.0);
        REQUIRE(out.success_probability <= 1.0 + 1e-12);
        REQUIRE(out.output_fidelity ==
                Catch::Approx(fidelity_with_pure(out.output_state,
                                                 bell_state(BellKind::PsiPlus)))
                    .margin(1e-12));
    }
}

TEST_CASE("noisy round matches the Bell-weight closed form") {
    // Independent route: on Bell-diagonal inputs the two depolarizers only
    // ever inject I/16, so the round is a (1-p)^2 mixture of the ideal round
    // and a fair coin on the maximally mixed state.
    auto rng = make_rng(55);
    for (double p : {0.0, 0.05, 0.12, 0.5}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto w = random_bell_weights(rng);
            const RoundOutcome out =
                purification_round(bell_diagonal(w[0], w[1], w[2], w[3]), config_at(p));
            const auto expected = noisy_round_closed_form(w, p);

            REQUIRE(out.success_probability ==
                    Catch::Approx(expected.success_probability).margin(1e-12));
            const BellCoefficients got = bell_basis_coefficients(out.output_state);
            const auto got_w = testsupport::weights_array(got);
            for (int i = 0; i < 4; ++i)
                REQUIRE(got_w[i] == Catch::Approx(expected.weights[i]).margin(1e-12));
            REQUIRE(got.off_diag_norm <= 1e-10);
        }
    }
}

TEST_CASE("twirl_to_werner fixed points and projection") {
    const DensityMatrix w06 = werner_from_fidelity(0.6);
    REQUIRE(max_abs_diff(twirl_to_werner(w06).matrix, w06.matrix) <= 1e-12);

    const DensityMatrix pure = DensityMatrix::from_pure(bell_state(BellKind::PsiPlus));
    REQUIRE(max_abs_diff(twirl_to_werner(pure).matrix, pure.matrix) <= 1e-12);

    const DensityMatrix mixed = bell_diagonal(0.7, 0.2, 0.05, 0.05);
    REQUIRE(max_abs_diff(twirl_to_werner(mixed).matrix,
                         werner_from_fidelity(0.7).matrix) <= 1e-12);
}

TEST_CASE("bilateral_x_rotation swaps PsiMinus and PhiMinus weights") {
    auto rng = make_rng(56);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = random_bell_weights(rng);
        const DensityMatrix rotated = bilateral_x_rotation(bell_diagonal(w[0], w[1], w[2], w[3]));
        const BellCoefficients got = bell_basis_coefficients(rotated);
        REQUIRE(got.psi_plus == Catch::Approx(w[0]).margin(1e-12));
        REQUIRE(got.psi_minus == Catch::Approx(w[3]).margin(1e-12));
        REQUIRE(got.phi_plus == Catch::Approx(w[2]).margin(1e-12));
        REQUIRE(got.phi_minus == Catch::Approx(w[1]).margin(1e-12));
        REQUIRE(got.off_diag_norm <= 1e-12);
    }

    // fidelity with the target is preserved for arbitrary states
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho = random_density_matrix(rng, 2);
        REQUIRE(fidelity_with_pure(bilateral_x_rotation(rho), bell_state(BellKind::PsiPlus)) ==
                Catch::Approx(fidelity_with_pure(rho, bell_state(BellKind::PsiPlus)))
                    .margin(1e-12));
    }

    // Werner states are invariant
    const DensityMatrix w07 = werner_from_fidelity(0.7);
    REQUIRE(max_abs_diff(bilateral_x_rotation(w07).matrix, w07.matrix) <= 1e-12);
}

TEST_CASE("iterate_trajectory purifies werner(0.8) at p=0") {
    const TrajectoryRecord rec = iterate_trajectory(werner_from_fidelity(0.8), config_at(0.0));
    REQUIRE(rec.input_fidelity == Catch::Approx(0.8).margin(1e-12));

    double prev = rec.input_fidelity;
    bool reached = false;
    int rounds_to_099 = 0;
    for (std::size_t k = 0; k < rec.fidelities.size(); ++k) {
        REQUIRE(rec.fidelities[k] >= prev - 1e-12);  // monotone nondecreasing
        prev = rec.fidelities[k];
        if (!reached && rec.fidelities[k] >= 0.99) {
            reached = true;
            rounds_to_099 = static_cast<int>(k) + 1;
        }
    }
    REQUIRE(reached);
    REQUIRE(rounds_to_099 <= 30);
    REQUIRE(rec.final_fidelity() >= 0.99);
}

TEST_CASE("iterate_trajectory degrades werner(0.4) at p=0") {
    const TrajectoryRecord rec = iterate_trajectory(werner_from_fidelity(0.4), config_at(0.0));
    REQUIRE(rec.fidelities.front() < 0.4);
    REQUIRE(rec.final_fidelity() < 0.4);
}

TEST_CASE("iterate_trajectory cannot purify werner(0.9) at p=0.12") {
    const TrajectoryRecord rec = iterate_trajectory(werner_from_fidelity(0.9), config_at(0.12));
    REQUIRE(rec.final_fidelity() < 0.5);  // falls into the degraded regime
}

TEST_CASE("trajectory fidelity sequence matches the closed-form iteration") {
    // Dual route for the full iteration including the inter-round rotation
    // (a PsiMinus/PhiMinus swap in Bell-weight coordinates).
    const double p = 0.05;
    std::array<double, 4> w = {0.7, 0.1, 0.1, 0.1};

    ProtocolConfig config = config_at(p);
    config.max_rounds = 40;
    config.convergence_tol = 1e-15;
    const TrajectoryRecord rec = iterate_trajectory(werner_from_fidelity(0.7), config);

    for (double f_dense : rec.fidelities) {
        const auto step = noisy_round_closed_form(w, p);
        REQUIRE(f_dense == Catch::Approx(step.weights[0]).margin(1e-10));
        w = step.weights;
        std::swap(w[1], w[3]);  // inter-round rotation
    }
}

TEST_CASE("iterate_trajectory records zero-probability termination") {
    ProtocolConfig config = config_at(0.0);
    config.zero_prob_tol = 0.6;  // the mixed state succeeds with probability 1/2
    const TrajectoryRecord rec = iterate_trajectory(maximally_mixed_2q(), config);
    REQUIRE(rec.terminated_by == TerminationCause::ZeroProbability);
    REQUIRE(rec.fidelities.empty());
    REQUIRE_THROWS_AS(purification_round(maximally_mixed_2q(), config), ZeroProbability);
}

TEST_CASE("iterate_trajectory honors max_rounds") {
    ProtocolConfig config = config_at(0.0);
    config.max_rounds = 3;
    config.convergence_tol = 1e-300;
    const TrajectoryRecord rec = iterate_trajectory(werner_from_fidelity(0.8), config);
    REQUIRE(rec.fidelities.size() == 3);
    REQUIRE(rec.terminated_by == TerminationCause::MaxRounds);
}

TEST_CASE("purification_round rejects non-2-qubit inputs") {
    auto rng = make_rng(57);
    REQUIRE_THROWS_AS(purification_round(random_density_matrix(rng, 4), config_at(0.0)),
                      DimensionMismatch);
}

TEST_CASE("iterate_trajectory validates its configuration") {
    ProtocolConfig config = config_at(0.0);
    config.max_rounds = 0;
    REQUIRE_THROWS_AS(iterate_trajectory(werner_from_fidelity(0.8), config), DomainError);
    config.max_rounds = 10;
    config.convergence_tol = 0.0;
    REQUIRE_THROWS_AS(iterate_trajectory(werner_from_fidelity(0.8), config), DomainError);
}
