#pragma once

// Incrementally maintained similarity criterion S = trace(X^T A X) and its
// closed-form deltas under row perturbations and pair swaps, plus the greedy
// pair-swap optimization loop that runs on an in-model index range.
//
// The state never owns the data matrix X; callers pass the pool (in its
// current order) to every operation. Only the first state.rows() rows of X
// are in the model.

#include "elmvis/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <utility>

namespace elmvis {

struct SimilarityState {
    Matrix A;     // n x n projection (hat) matrix, fixed for the state's lifetime
    Matrix Xhat;  // n x d predictions, kept equal to A * X.topRows(n)
    double S = 0.0;

    // Running S and Xhat are re-derived from scratch every resync_interval
    // accepted updates to bound floating-point drift.
    long accepted_since_resync = 0;
    long resync_interval = 4096;

    Index rows() const { return A.rows(); }
    Index dim() const { return Xhat.cols(); }
};

struct SwapOutcome {
    bool accepted = false;
    double delta = 0.0;  // change in S the swap would produce (applied iff accepted)
    Index a = -1;
    Index b = -1;
};

struct RefineResult {
    long accepted = 0;
    double S_final = 0.0;
    double min_delta = std::numeric_limits<double>::infinity();  // over accepted swaps
};

// Direct evaluation of trace(X^T A X) over the first A.rows() rows of X.
inline double similarity_score(const Matrix& a, const Matrix& x) {
    const Index n = a.rows();
    return (x.topRows(n).cwiseProduct(a * x.topRows(n))).sum();
}

// Re-derive Xhat and S from A and the current X; discards accumulated error.
inline void resync(SimilarityState& state, const Matrix& x) {
    const Index n = state.rows();
    if (x.rows() < n)
        throw ArgumentError("resync: X has fewer rows than the state");
    state.Xhat.noalias() = state.A * x.topRows(n);
    state.S = (x.topRows(n).cwiseProduct(state.Xhat)).sum();
    state.accepted_since_resync = 0;
}

inline SimilarityState init_state(Matrix a, const Matrix& x) {
    if (a.rows() != a.cols())
        throw ArgumentError("init_state: projection matrix must be square");
    if (x.rows() < a.rows())
        throw ArgumentError("init_state: X has fewer rows than the projection");

    SimilarityState state;
    state.A = std::move(a);
    resync(state, x);
    return state;
}

// Change in S if row a moved by delta and the least-squares fit were redone:
//   dS = A[a,a] |delta|^2 + 2 <xhat_a, delta>.
// Exact because A depends only on the inputs, not on X.
inline double delta_row(const SimilarityState& state, Index a, const RowVector& delta) {
    if (a < 0 || a >= state.rows())
        throw ArgumentError("delta_row: row index out of range");
    if (delta.size() != state.dim())
        throw ArgumentError("delta_row: delta width does not match data dimension");
    if (!delta.allFinite())
        throw NumericError("delta_row: non-finite delta");

    return state.A(a, a) * delta.squaredNorm() + 2.0 * state.Xhat.row(a).dot(delta);
}

namespace detail {

inline void note_accept(SimilarityState& state, const Matrix& x) {
    if (++state.accepted_since_resync >= state.resync_interval)
        resync(state, x);
}

} // namespace detail

// Applies the row move: X.row(a) += delta, Xhat += A[:,a] * delta, S += dS.
inline void apply_row_update(SimilarityState& state, Matrix& x, Index a, const RowVector& delta) {
    const double d_s = delta_row(state, a, delta);
    state.Xhat.noalias() += state.A.col(a) * delta;
    x.row(a) += delta;
    state.S += d_s;
    detail::note_accept(state, x);
}

// Change in S for exchanging in-model rows a and b. With delta = x_b - x_a:
//   dS = (A[a,a] + A[b,b] - 2 A[a,b]) |delta|^2 + 2 (xhat_a - xhat_b) . delta
// which equals the two sequential row moves (+delta at a, -delta at b).
inline double delta_pair_swap(const SimilarityState& state, const Matrix& x, Index a, Index b) {
    const Index n = state.rows();
    if (a < 0 || a >= n || b < 0 || b >= n)
        throw ArgumentError("delta_pair_swap: row index out of range");
    if (a == b)
        throw ArgumentError("delta_pair_swap: indices must differ");

    const RowVector delta = x.row(b) - x.row(a);
    const double coeff = state.A(a, a) + state.A(b, b) - 2.0 * state.A(a, b);
    return coeff * delta.squaredNorm() + 2.0 * (state.Xhat.row(a) - state.Xhat.row(b)).dot(delta);
}

inline void apply_pair_swap(SimilarityState& state, Matrix& x, Index a, Index b) {
    const double d_s = delta_pair_swap(state, x, a, b);
    const RowVector delta = x.row(b) - x.row(a);
    state.Xhat.noalias() += (state.A.col(a) - state.A.col(b)) * delta;
    x.row(a).swap(x.row(b));
    state.S += d_s;
    detail::note_accept(state, x);
}

inline long default_swap_stagnation(Index lo, Index hi) {
    return std::max<long>(1000, 20 * static_cast<long>(hi - lo));
}

// Deltas inside the floating-point noise band of the running score are ties,
// not improvements. Treating them as wins can loop forever: a mathematically
// zero delta may round positive in both directions of the same exchange.
inline constexpr double kTieNoiseRel = 1e-12;

inline bool improves(double delta, double s) {
    return delta > kTieNoiseRel * (1.0 + std::abs(s));
}

// Greedy pair-swap optimization over positions [lo, hi): draws unordered
// pairs uniformly, accepts only strict improvements (ties and noise-level
// deltas rejected, so accepted steps are strictly increasing in S), and
// stops after `stagnation` consecutive rejections.
//
// When `order` is given its entries are exchanged alongside the rows, so an
// external permutation stays in step with X. When `trace` is given, one CSV
// record (step,a,b,delta,S) is appended per accepted swap.
inline RefineResult elmvis_plus_run(SimilarityState& state, Matrix& x, Index lo, Index hi,
                                    long stagnation, std::mt19937_64& rng,
                                    std::vector<Index>* order = nullptr,
                                    std::ostream* trace = nullptr) {
    if (lo < 0 || lo >= hi || hi > state.rows())
        throw ArgumentError("elmvis_plus_run: invalid index range");
    if (stagnation < 1)
        throw ArgumentError("elmvis_plus_run: stagnation must be >= 1");
    if (order && static_cast<Index>(order->size()) < hi)
        throw ArgumentError("elmvis_plus_run: order vector shorter than range");

    RefineResult result;
    result.S_final = state.S;
    if (hi - lo < 2)
        return result;  // single position: no pair to exchange

    if (trace)
        *trace << "step,a,b,delta,S\n";

    std::uniform_int_distribution<Index> pick(lo, hi - 1);
    long rejections = 0;
    long step = 0;
    while (rejections < stagnation) {
        const Index a = pick(rng);
        const Index b = pick(rng);
        if (a == b)
            continue;  // not a pair; redraw without counting

        ++step;
        const double d_s = delta_pair_swap(state, x, a, b);
        if (improves(d_s, state.S)) {
            apply_pair_swap(state, x, a, b);
            if (order)
                std::swap((*order)[a], (*order)[b]);
            ++result.accepted;
            result.min_delta = std::min(result.min_delta, d_s);
            rejections = 0;
            if (trace)
                *trace << step << ',' << a << ',' << b << ','
                       << format_double(d_s) << ',' << format_double(state.S) << '\n';
        } else {
            ++rejections;
        }
    }
    result.S_final = state.S;
    return result;
}

inline RefineResult elmvis_plus_run(SimilarityState& state, Matrix& x, Index lo, Index hi,
                                    long stagnation, std::uint64_t seed,
                                    std::vector<Index>* order = nullptr,
                                    std::ostream* trace = nullptr) {
    std::mt19937_64 rng(seed);
    return elmvis_plus_run(state, x, lo, hi, stagnation, rng, order, trace);
}

} // namespace elmvis
