#pragma once

// Dense complex linear algebra for systems of up to a few qubits: tensor
// products, embedded two-qubit unitaries, partial trace, parity
// post-selection, fidelity, and physicality checks.
//
// Convention used everywhere: qubit 0 is the MOST significant bit of a
// computational-basis label, so a 4-qubit basis state reads |q0 q1 q2 q3>.

#include <cmath>
#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "entpur/errors.hpp"

namespace entpur {

using cplx = std::complex<double>;

/// Bit of `qubit` in basis label `index` of an `n_qubits` register.
constexpr int qubit_bit(int index, int qubit, int n_qubits) {
    return (index >> (n_qubits - 1 - qubit)) & 1;
}

/// Dense square complex matrix, flat row-major storage.
struct ComplexMatrix {
    int dim = 0;
    std::vector<cplx> data;

    ComplexMatrix() = default;
    explicit ComplexMatrix(int d) : dim(d), data(static_cast<std::size_t>(d) * d) {}

    cplx& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * dim + c]; }
    const cplx& operator()(int r, int c) const {
        return data[static_cast<std::size_t>(r) * dim + c];
    }

    static ComplexMatrix identity(int d) {
        ComplexMatrix m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim != b.dim) throw DimensionMismatch("matrix product: dimensions differ");
    ComplexMatrix out(a.dim);
    for (int r = 0; r < a.dim; ++r)
        for (int k = 0; k < a.dim; ++k) {
            const cplx ark = a(r, k);
            if (ark == cplx{}) continue;
            for (int c = 0; c < a.dim; ++c) out(r, c) += ark * b(k, c);
        }
    return out;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.dim);
    for (int r = 0; r < a.dim; ++r)
        for (int c = 0; c < a.dim; ++c) out(c, r) = std::conj(a(r, c));
    return out;
}

inline cplx trace(const ComplexMatrix& a) {
    cplx t = 0.0;
    for (int i = 0; i < a.dim; ++i) t += a(i, i);
    return t;
}

/// Largest entrywise |a - b|.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim != b.dim) throw DimensionMismatch("max_abs_diff: dimensions differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

/// Largest deviation from Hermiticity, max |m[i][j] - conj(m[j][i])|.
inline double hermiticity_deviation(const ComplexMatrix& m) {
    double dev = 0.0;
    for (int r = 0; r < m.dim; ++r)
        for (int c = r; c < m.dim; ++c)
            dev = std::max(dev, std::abs(m(r, c) - std::conj(m(c, r))));
    return dev;
}

/// Normalized pure state on n qubits.
struct PureStateVector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    PureStateVector(int n, std::vector<cplx> amps)
        : n_qubits(n), amplitudes(std::move(amps)) {
        if (n < 1 || amplitudes.size() != (std::size_t{1} << n))
            throw DimensionMismatch("PureStateVector: amplitude count != 2^n_qubits");
        double norm2 = 0.0;
        for (const cplx& a : amplitudes) norm2 += std::norm(a);
        if (std::abs(norm2 - 1.0) > 1e-12)
            throw DomainError("PureStateVector: not normalized");
    }

    int dim() const { return 1 << n_qubits; }
};

/// Density matrix on n qubits. Construction enforces unit trace and
/// Hermiticity at 1e-10; positivity is checked on demand (check_physical),
/// never silently repaired.
struct DensityMatrix {
    int n_qubits = 0;
    ComplexMatrix matrix;

    DensityMatrix(int n, ComplexMatrix m) : n_qubits(n), matrix(std::move(m)) {
        if (n < 1 || matrix.dim != (1 << n))
            throw DimensionMismatch("DensityMatrix: dim != 2^n_qubits");
        if (std::abs(trace(matrix) - cplx{1.0}) > 1e-10)
            throw DomainError("DensityMatrix: trace deviates from 1 beyond 1e-10");
        if (hermiticity_deviation(matrix) > 1e-10)
            throw DomainError("DensityMatrix: not Hermitian within 1e-10");
    }

    static DensityMatrix from_pure(const PureStateVector& psi) {
        ComplexMatrix m(psi.dim());
        for (int r = 0; r < psi.dim(); ++r)
            for (int c = 0; c < psi.dim(); ++c)
                m(r, c) = psi.amplitudes[r] * std::conj(psi.amplitudes[c]);
        return DensityMatrix(psi.n_qubits, std::move(m));
    }

    int dim() const { return matrix.dim; }
};

/// Kronecker product; a's index is the more significant block.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.dim * b.dim);
    for (int ra = 0; ra < a.dim; ++ra)
        for (int ca = 0; ca < a.dim; ++ca) {
            const cplx v = a(ra, ca);
            if (v == cplx{}) continue;
            for (int rb = 0; rb < b.dim; ++rb)
                for (int cb = 0; cb < b.dim; ++cb)
                    out(ra * b.dim + rb, ca * b.dim + cb) = v * b(rb, cb);
        }
    return out;
}

namespace detail {

inline void require_two_distinct_qubits(int q_a, int q_b, int n_qubits, const char* who) {
    if (q_a < 0 || q_a >= n_qubits || q_b < 0 || q_b >= n_qubits)
        throw IndexError(std::string(who) + ": qubit index out of range");
    if (q_a == q_b) throw IndexError(std::string(who) + ": qubit indices must differ");
}

} // namespace detail

/// Conjugates rho by the unitary u (4x4) acting on (q_hi, q_lo), with q_hi
/// as the more significant of u's two qubit slots, identity elsewhere.
inline DensityMatrix apply_two_qubit_unitary(const DensityMatrix& rho, const ComplexMatrix& u,
                                             int q_hi, int q_lo) {
    detail::require_two_distinct_qubits(q_hi, q_lo, rho.n_qubits, "apply_two_qubit_unitary");
    if (u.dim != 4) throw DimensionMismatch("apply_two_qubit_unitary: u must be 4x4");
    if (max_abs_diff(adjoint(u) * u, ComplexMatrix::identity(4)) > 1e-10)
        throw NotUnitary("apply_two_qubit_unitary: u fails unitarity at 1e-10");

    const int n = rho.n_qubits;
    const int d = rho.dim();
    const int bit_hi = 1 << (n - 1 - q_hi);
    const int bit_lo = 1 << (n - 1 - q_lo);
    const int mask = bit_hi | bit_lo;
    auto sub_of = [&](int i) { return 2 * ((i & bit_hi) != 0) + ((i & bit_lo) != 0); };
    auto with_sub = [&](int i, int sub) {
        return (i & ~mask) | ((sub & 2) ? bit_hi : 0) | ((sub & 1) ? bit_lo : 0);
    };

    // rho' = U rho U^d, contracted over the two embedded slots only.
    ComplexMatrix tmp(d);
    for (int r = 0; r < d; ++r) {
        const int sr = sub_of(r);
        for (int c = 0; c < d; ++c) {
            cplx acc = 0.0;
            for (int s = 0; s < 4; ++s) acc += u(sr, s) * rho.matrix(with_sub(r, s), c);
            tmp(r, c) = acc;
        }
    }
    ComplexMatrix out(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            const int sc = sub_of(c);
            cplx acc = 0.0;
            for (int s = 0; s < 4; ++s) acc += tmp(r, with_sub(c, s)) * std::conj(u(sc, s));
            out(r, c) = acc;
        }
    return DensityMatrix(n, std::move(out));
}

/// Reduced state after tracing out `traced_qubits`; ordering of the
/// remaining qubits is preserved.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& traced_qubits) {
    const int n = rho.n_qubits;
    if (traced_qubits.empty()) throw IndexError("partial_trace: traced set is empty");
    if (static_cast<int>(traced_qubits.size()) >= n)
        throw IndexError("partial_trace: traced set must be a strict subset of qubits");
    for (int q : traced_qubits)
        if (q < 0 || q >= n) throw IndexError("partial_trace: qubit index out of range");

    int traced_mask = 0;
    for (int q : traced_qubits) traced_mask |= 1 << (n - 1 - q);

    std::vector<int> kept_bits;  // bit positions of kept qubits, qubit order preserved
    for (int q = 0; q < n; ++q)
        if (!traced_qubits.count(q)) kept_bits.push_back(1 << (n - 1 - q));

    const int m = static_cast<int>(kept_bits.size());
    auto kept_index = [&](int i) {
        int out = 0;
        for (int k = 0; k < m; ++k)
            if (i & kept_bits[k]) out |= 1 << (m - 1 - k);
        return out;
    };

    const int d = rho.dim();
    ComplexMatrix out(1 << m);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if ((r & traced_mask) == (c & traced_mask))
                out(kept_index(r), kept_index(c)) += rho.matrix(r, c);
    return DensityMatrix(m, std::move(out));
}

struct PostselectResult {
    DensityMatrix state;
    double probability;
};

/// Projects onto equal computational-basis outcomes of (q_a, q_b), pools the
/// 00 and 11 branches, traces the measured pair out and renormalizes.
/// Throws ZeroProbability below 1e-14.
inline PostselectResult postselect_equal_outcomes(const DensityMatrix& rho, int q_a, int q_b) {
    detail::require_two_distinct_qubits(q_a, q_b, rho.n_qubits, "postselect_equal_outcomes");
    const int n = rho.n_qubits;
    const int d = rho.dim();
    const int bit_a = 1 << (n - 1 - q_a);
    const int bit_b = 1 << (n - 1 - q_b);
    const int mask = bit_a | bit_b;

    // P00 rho P00 + P11 rho P11: entries whose (q_a,q_b) bits agree on both
    // sides and are 00 or 11.
    ComplexMatrix pooled(d);
    cplx pooled_trace = 0.0;
    for (int r = 0; r < d; ++r) {
        const int rm = r & mask;
        if (rm != 0 && rm != mask) continue;
        for (int c = 0; c < d; ++c)
            if ((c & mask) == rm) pooled(r, c) = rho.matrix(r, c);
        pooled_trace += rho.matrix(r, r);
    }
    const double prob = pooled_trace.real();
    if (prob < 1e-14)
        throw ZeroProbability("postselect_equal_outcomes: outcome probability below 1e-14");

    // Normalize by the complex trace: rounding noise puts ~1e-22i on diagonal
    // entries, and tensor_product doubles any trace deviation each round
    // ((1+z)^2 = 1+2z), so dividing by the real part alone lets the imaginary
    // component compound across a long trajectory.
    for (cplx& v : pooled.data) v /= pooled_trace;
    DensityMatrix normalized(n, std::move(pooled));
    return {partial_trace(normalized, {q_a, q_b}), prob};
}

/// <psi| rho |psi>. The imaginary part must vanish within 1e-10.
inline double fidelity_with_pure(const DensityMatrix& rho, const PureStateVector& psi) {
    if (rho.n_qubits != psi.n_qubits)
        throw DimensionMismatch("fidelity_with_pure: qubit counts differ");
    const int d = rho.dim();
    cplx f = 0.0;
    for (int r = 0; r < d; ++r) {
        cplx row = 0.0;
        for (int c = 0; c < d; ++c) row += rho.matrix(r, c) * psi.amplitudes[c];
        f += std::conj(psi.amplitudes[r]) * row;
    }
    if (std::abs(f.imag()) > 1e-10)
        throw DomainError("fidelity_with_pure: fidelity has a non-real component");
    return f.real();
}

struct PhysicalityReport {
    double trace_deviation = 0.0;
    double hermiticity_dev = 0.0;
    double min_eigenvalue = 0.0;
    bool ok = true;  // all three within the tolerance passed to check_physical

    bool within(double tol) const {
        return trace_deviation <= tol && hermiticity_dev <= tol && min_eigenvalue >= -tol;
    }
};

/// Trace deviation, Hermiticity deviation and smallest eigenvalue of rho.
/// Reports only; never throws, never clamps.
inline PhysicalityReport check_physical(const DensityMatrix& rho, double tol = 1e-9) {
    PhysicalityReport rep;
    rep.trace_deviation = std::abs(trace(rho.matrix) - cplx{1.0});
    rep.hermiticity_dev = hermiticity_deviation(rho.matrix);

    const int d = rho.dim();
    Eigen::MatrixXcd m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = rho.matrix(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = solver.eigenvalues().minCoeff();
    rep.ok = rep.within(tol);
    return rep;
}

} // namespace entpur
