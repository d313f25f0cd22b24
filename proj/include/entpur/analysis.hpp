#pragma once

// Extraction of F_min and F_infinity, the sweep over gate error rates, and
// the noise threshold located by bisection.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "entpur/protocol.hpp"

namespace entpur {

enum class TrajectoryClass { Purified, Degraded, Stalled };

/// Purified: converged with a net fidelity gain above 1e-6.
/// Degraded: net loss beyond 1e-6, or terminated by zero probability.
/// Stalled: everything else (fixed points, marginal net change).
inline TrajectoryClass classify_trajectory(const TrajectoryRecord& record) {
    const double net = record.final_fidelity() - record.input_fidelity;
    if (record.terminated_by == TerminationCause::Converged && net > 1e-6)
        return TrajectoryClass::Purified;
    if (record.terminated_by == TerminationCause::ZeroProbability || net < -1e-6)
        return TrajectoryClass::Degraded;
    return TrajectoryClass::Stalled;
}

struct SweepRow {
    double p_gate = 0.0;
    std::optional<double> f_min;
    std::optional<double> f_infty;
};

struct ThresholdReport {
    std::vector<SweepRow> rows;
    double p_th = 0.0;
    double f_at_threshold = 0.0;
};

namespace detail {

inline ProtocolConfig analysis_config(double p_gate, double traj_tol) {
    ProtocolConfig config;
    config.noise.p_gate = p_gate;
    config.convergence_tol = traj_tol;
    return config;
}

/// Bisection-side resolution of a trajectory: Purified counts, Degraded does
/// not, and Stalled is resolved by the sign of the last nonzero fidelity
/// change (exact ties count as unpurifiable).
inline bool counts_as_purified(const TrajectoryRecord& record) {
    switch (classify_trajectory(record)) {
        case TrajectoryClass::Purified: return true;
        case TrajectoryClass::Degraded: return false;
        case TrajectoryClass::Stalled: break;
    }
    double prev = record.input_fidelity;
    double last_delta = 0.0;
    for (double f : record.fidelities) {
        if (f != prev) last_delta = f - prev;
        prev = f;
    }
    return last_delta > 0.0;
}

inline bool werner_input_purifies(double f0, const ProtocolConfig& config) {
    return counts_as_purified(iterate_trajectory(werner_from_fidelity(f0), config));
}

} // namespace detail

/// Minimum purifiable input Werner fidelity at the given gate error rate,
/// located by bisection over F0 in [0.25, 1]; the bracket is seeded by a
/// descending probe grid (step 0.01). Returns nullopt when no probe
/// classifies as purified (no purifiable inputs at this noise level).
inline std::optional<double> find_f_min(double p_gate, double f_tol = 5e-4,
                                        double traj_tol = 1e-9) {
    if (!(p_gate >= 0.0 && p_gate <= 1.0))
        throw DomainError("find_f_min: p_gate must lie in [0,1]");
    if (!(f_tol > 0.0)) throw DomainError("find_f_min: f_tol must be positive");

    const ProtocolConfig config = detail::analysis_config(p_gate, traj_tol);
    std::optional<double> hi;
    for (int k = 0; k <= 73; ++k) {  // 0.99 down to 0.26
        const double f0 = 0.99 - 0.01 * k;
        if (detail::werner_input_purifies(f0, config)) {
            hi = f0;
            break;
        }
    }
    if (!hi) return std::nullopt;

    double lo = 0.25;
    double up = *hi;
    while (up - lo > f_tol) {
        const double mid = 0.5 * (lo + up);
        if (detail::werner_input_purifies(mid, config))
            up = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + up);
}

/// Asymptotic fidelity reached from the ideal input |PsiPlus>. Returns
/// nullopt when the trajectory falls into the degraded regime: the limit is
/// reported only while it stays above the noiseless divergence fidelity 0.5
/// (purifying asymptotes sit well above it, the degraded attractor at 1/4).
inline std::optional<double> find_f_infty(double p_gate, double tol = 1e-9) {
    if (!(p_gate >= 0.0 && p_gate <= 1.0))
        throw DomainError("find_f_infty: p_gate must lie in [0,1]");
    if (!(tol > 0.0)) throw DomainError("find_f_infty: tol must be positive");

    const ProtocolConfig config = detail::analysis_config(p_gate, tol);
    const TrajectoryRecord record =
        iterate_trajectory(DensityMatrix::from_pure(purification_target()), config);
    const double limit = record.final_fidelity();
    if (record.terminated_by == TerminationCause::ZeroProbability || limit < 0.5)
        return std::nullopt;
    return limit;
}

/// One row of (p_gate, F_min, F_infinity).
inline SweepRow sweep_row(double p_gate, double f_tol = 5e-4, double traj_tol = 1e-9) {
    return {p_gate, find_f_min(p_gate, f_tol, traj_tol), find_f_infty(p_gate, traj_tol)};
}

/// Rows for every requested gate error rate; values absent beyond threshold.
inline std::vector<SweepRow> sweep(const std::vector<double>& p_values, double f_tol = 5e-4,
                                   double traj_tol = 1e-9) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 0.2)) throw DomainError("sweep: p values must lie in [0, 0.2]");
    std::vector<SweepRow> rows;
    rows.reserve(p_values.size());
    for (double p : p_values) rows.push_back(sweep_row(p, f_tol, traj_tol));
    return rows;
}

/// Bisection on p_gate for the boundary where find_f_min becomes absent,
/// i.e. where F_min and F_infinity have converged and purification stops
/// being possible. Requires purification possible at p_lo (with a positive
/// F_infinity - F_min gap) and impossible at p_hi.
inline ThresholdReport find_threshold(double p_lo, double p_hi, double p_tol = 2e-3,
                                      double f_tol = 5e-4, double traj_tol = 1e-9,
                                      double gap_tol = 1e-6) {
    if (!(p_lo >= 0.0 && p_hi <= 1.0 && p_lo < p_hi))
        throw DomainError("find_threshold: need 0 <= p_lo < p_hi <= 1");
    if (!(p_tol > 0.0)) throw DomainError("find_threshold: p_tol must be positive");

    std::map<double, SweepRow> rows;
    auto row_at = [&](double p) -> const SweepRow& {
        auto it = rows.find(p);
        if (it == rows.end()) it = rows.emplace(p, sweep_row(p, f_tol, traj_tol)).first;
        return it->second;
    };

    const SweepRow& low = row_at(p_lo);
    if (!low.f_min || !low.f_infty || *low.f_infty - *low.f_min <= gap_tol)
        throw BracketError("find_threshold: purification not possible at the lower bracket edge");
    if (row_at(p_hi).f_min)
        throw BracketError("find_threshold: purification still possible at the upper bracket edge");

    double lo = p_lo;
    double hi = p_hi;
    while (hi - lo > p_tol) {
        const double mid = 0.5 * (lo + hi);
        if (row_at(mid).f_min)
            lo = mid;
        else
            hi = mid;
    }

    ThresholdReport report;
    report.p_th = 0.5 * (lo + hi);
    for (const auto& [p, row] : rows) report.rows.push_back(row);

    // Meeting fidelity: read off the last row where purification still works.
    const SweepRow& last = rows.at(lo);
    report.f_at_threshold =
        last.f_infty ? 0.5 * (*last.f_min + *last.f_infty) : *last.f_min;
    return report;
}

} // namespace entpur
