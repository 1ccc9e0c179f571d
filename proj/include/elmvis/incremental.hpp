#pragma once

// Growth scheme for assigning pool samples to visualization coordinates.
// Positions are split three ways: a fixed prefix that no longer moves, a
// candidate window being optimized, and the untouched remainder of the pool.
// Candidates improve by stealing better-fitting samples from the pool; once
// proposals stagnate the candidates are frozen and a new batch is admitted.
//
// Index convention: i_A and i_B are counts that double as range bounds.
// Fixed positions are [0, i_A), candidates [i_A, i_B), available samples
// [i_B, N), all zero-based half-open. One-based inclusive descriptions of
// the same scheme (candidates i_A..i_B, available i_B+1..N) map onto these
// by shifting each endpoint down by one and dropping the inclusive upper
// bound.

#include "elmvis/common.hpp"
#include "elmvis/elm.hpp"
#include "elmvis/similarity.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace elmvis {

struct Partition {
    std::vector<Index> perm;  // perm[p] = pool sample currently at position p
    Index i_A = 0;            // fixed count; fixed positions are [0, i_A)
    Index i_B = 0;            // in-model count; candidates occupy [i_A, i_B)
    Index N = 0;

    static Partition identity(Index n) {
        if (n < 1)
            throw ArgumentError("Partition: pool must have at least one sample");
        Partition part;
        part.perm.resize(static_cast<std::size_t>(n));
        std::iota(part.perm.begin(), part.perm.end(), Index{0});
        part.N = n;
        return part;
    }

    Index candidates() const { return i_B - i_A; }
    Index available() const { return N - i_B; }
};

// Pins pool sample x_index to position v_index before any optimization.
// Literal sequential swaps: each pair moves its sample into place and the
// displaced sample to wherever the seeded one came from. Afterwards all
// seeded samples are fixed (i_A = i_B = number of pairs). Callers that need
// the fixed positions to be exactly the seeded ones must pass v_index values
// 0..m-1; run() arranges that by reordering coordinate rows first.
inline void seed_fixed(Partition& part, const std::vector<std::pair<Index, Index>>& pairs) {
    if (part.i_A != 0 || part.i_B != 0)
        throw ArgumentError("seed_fixed: partition already has fixed or candidate samples");

    std::vector<bool> v_seen(static_cast<std::size_t>(part.N), false);
    std::vector<bool> x_seen(static_cast<std::size_t>(part.N), false);
    for (const auto& [v, x] : pairs) {
        if (v < 0 || v >= part.N || x < 0 || x >= part.N)
            throw ArgumentError("seed_fixed: pair index out of range");
        if (v_seen[static_cast<std::size_t>(v)] || x_seen[static_cast<std::size_t>(x)])
            throw ArgumentError("seed_fixed: duplicate position or sample in pairs");
        v_seen[static_cast<std::size_t>(v)] = true;
        x_seen[static_cast<std::size_t>(x)] = true;
    }

    std::vector<Index> pos_of(static_cast<std::size_t>(part.N));
    for (Index p = 0; p < part.N; ++p)
        pos_of[static_cast<std::size_t>(part.perm[static_cast<std::size_t>(p)])] = p;

    for (const auto& [v, x] : pairs) {
        const Index p = pos_of[static_cast<std::size_t>(x)];
        std::swap(part.perm[static_cast<std::size_t>(v)], part.perm[static_cast<std::size_t>(p)]);
        pos_of[static_cast<std::size_t>(part.perm[static_cast<std::size_t>(p)])] = p;
        pos_of[static_cast<std::size_t>(part.perm[static_cast<std::size_t>(v)])] = v;
    }
    part.i_A = part.i_B = static_cast<Index>(pairs.size());
}

// Uniform draw of a candidate position and an available sample position.
inline std::pair<Index, Index> propose_candidate_swap(std::mt19937_64& rng, const Partition& part) {
    if (part.i_A >= part.i_B)
        throw StateError("propose_candidate_swap: no candidate positions");
    if (part.i_B >= part.N)
        throw StateError("propose_candidate_swap: available pool exhausted");
    std::uniform_int_distribution<Index> pick_a(part.i_A, part.i_B - 1);
    std::uniform_int_distribution<Index> pick_b(part.i_B, part.N - 1);
    return {pick_a(rng), pick_b(rng)};
}

// One inner-loop proposal: try replacing the candidate at position a with
// the available sample at position b. Only row a is in the model, so the
// criterion change is the single-row delta; the displaced sample returns to
// the pool and contributes nothing.
inline SwapOutcome candidate_step(SimilarityState& state, Matrix& x, Partition& part,
                                  std::mt19937_64& rng) {
    if (state.rows() != part.i_B)
        throw ArgumentError("candidate_step: state covers a different number of rows than i_B");

    const auto [a, b] = propose_candidate_swap(rng, part);
    const RowVector delta = x.row(b) - x.row(a);

    SwapOutcome out;
    out.a = a;
    out.b = b;
    out.delta = delta_row(state, a, delta);
    if (improves(out.delta, state.S)) {
        const RowVector displaced = x.row(a);
        apply_row_update(state, x, a, delta);  // row a now holds sample b's content
        x.row(b) = displaced;
        std::swap(part.perm[static_cast<std::size_t>(a)], part.perm[static_cast<std::size_t>(b)]);
        out.accepted = true;
    }
    return out;
}

// Model width grows with the in-model sample count: L = ceil(i_B / 4)
// clamped to [4, 256]. Deterministic and non-decreasing.
inline Index default_neuron_schedule(Index i_b) {
    const Index quarter = (i_b + 3) / 4;
    return std::clamp<Index>(quarter, 4, 256);
}

inline long default_inner_stagnation(Index i_a, Index i_b) {
    return std::max<long>(500, 10 * static_cast<long>(i_b - i_a));
}

struct PromotionRecord {
    long iteration = 0;
    Index i_A = 0;
    Index i_B = 0;
    Index L = 0;
    double S = 0.0;
    long accepted_swaps = 0;  // accepted during the loop that preceded this promotion
};

inline std::string to_json_line(const PromotionRecord& rec) {
    std::ostringstream out;
    out << "{\"iteration\":" << rec.iteration << ",\"i_A\":" << rec.i_A << ",\"i_B\":" << rec.i_B
        << ",\"L\":" << rec.L << ",\"S\":" << format_double(rec.S)
        << ",\"accepted_swaps\":" << rec.accepted_swaps << "}";
    return out.str();
}

struct ProgressSnapshot {
    Index i_A = 0;
    Index i_B = 0;
    double S = 0.0;
};

// Single-writer seqlock. The run loop publishes at promotion boundaries; any
// number of readers may poll concurrently and always observe a mutually
// consistent (i_A, i_B, S) triple. Readers retry while a write is in flight
// (odd version) or raced past them.
class ProgressChannel {
  public:
    void publish(const ProgressSnapshot& snap) {
        const std::uint64_t v = version_.load(std::memory_order_relaxed);
        version_.store(v + 1, std::memory_order_release);
        std::atomic_thread_fence(std::memory_order_release);
        i_a_.store(snap.i_A, std::memory_order_relaxed);
        i_b_.store(snap.i_B, std::memory_order_relaxed);
        s_.store(snap.S, std::memory_order_relaxed);
        std::atomic_thread_fence(std::memory_order_release);
        version_.store(v + 2, std::memory_order_release);
    }

    ProgressSnapshot read() const {
        for (;;) {
            const std::uint64_t v1 = version_.load(std::memory_order_acquire);
            if (v1 & 1)
                continue;
            std::atomic_thread_fence(std::memory_order_acquire);
            ProgressSnapshot snap;
            snap.i_A = i_a_.load(std::memory_order_relaxed);
            snap.i_B = i_b_.load(std::memory_order_relaxed);
            snap.S = s_.load(std::memory_order_relaxed);
            std::atomic_thread_fence(std::memory_order_acquire);
            if (version_.load(std::memory_order_relaxed) == v1)
                return snap;
        }
    }

  private:
    std::atomic<std::uint64_t> version_{0};
    std::atomic<Index> i_a_{0};
    std::atomic<Index> i_b_{0};
    std::atomic<double> s_{0.0};
};

// Accounting for projection-matrix storage. Every A built during a run is
// registered, so tests can assert that peak usage scales with i_B^2 and not
// with the pool size.
struct AllocationStats {
    long long current_elements = 0;
    long long peak_elements = 0;

    void add(long long elements) {
        current_elements += elements;
        peak_elements = std::max(peak_elements, current_elements);
    }
    void remove(long long elements) { current_elements -= elements; }
};

// Everything that must be rebuilt when the in-model row count changes.
struct ModelContext {
    const Matrix* V = nullptr;  // coordinate rows in position order
    Activation activation = Activation::Tanh;
    double rcond = 1e-9;
    std::uint64_t seed = 0;
    std::function<Index(Index)> neuron_schedule;  // unset: default_neuron_schedule
    long promotions = 0;                          // salts weight drawing per rebuild
    ElmModel model;
    AllocationStats* alloc = nullptr;  // optional
};

// Freezes the current candidates and admits up to k new ones from the pool:
// i_A <- i_B, i_B <- min(i_B + k, limit). The model and similarity state are
// rebuilt over the first i_B rows; hidden weights are re-drawn only when the
// scheduled width changes, salted by the promotion counter so every rebuild
// is deterministic. A limit below N caps growth early (the default -1 places
// the whole pool).
inline void promote(Partition& part, SimilarityState& state, ModelContext& ctx, Matrix& x,
                    long k, Index limit = -1) {
    if (k < 1)
        throw ArgumentError("promote: k must be >= 1");
    if (!ctx.V)
        throw ArgumentError("promote: model context has no coordinates");
    if (limit < 0)
        limit = part.N;

    const Index prev_i_b = part.i_B;
    part.i_A = part.i_B;
    part.i_B = std::min<Index>(part.i_B + static_cast<Index>(k), limit);
    if (part.i_B == prev_i_b && !ctx.model.empty()) {
        ++ctx.promotions;  // finalizing promotion: nothing to rebuild
        return;
    }

    const Index n = part.i_B;
    const Index width = ctx.neuron_schedule ? ctx.neuron_schedule(n) : default_neuron_schedule(n);
    if (!ctx.model.empty() && width < ctx.model.neurons())
        throw ArgumentError("promote: neuron schedule must be non-decreasing");
    if (ctx.model.empty() || width != ctx.model.neurons())
        ctx.model = init_model(ctx.V->cols(), width, ctx.activation,
                               ctx.seed ^ static_cast<std::uint64_t>(ctx.promotions));

    const Matrix h = hidden_layer(ctx.model, ctx.V->topRows(n));
    Matrix a = projection_matrix(h, ctx.rcond);

    const long long old_elements =
        static_cast<long long>(state.rows()) * static_cast<long long>(state.rows());
    if (ctx.alloc)
        ctx.alloc->add(static_cast<long long>(n) * static_cast<long long>(n));

    const long resync_interval = state.resync_interval;
    state = init_state(std::move(a), x);
    state.resync_interval = resync_interval;

    if (ctx.alloc)
        ctx.alloc->remove(old_elements);
    ++ctx.promotions;
}

struct RunConfig {
    long k = 8;                 // candidates admitted per promotion
    long stagnation_inner = 0;  // consecutive rejections ending an inner loop; 0 = default rule
    std::function<Index(Index)> neuron_schedule;  // unset: default_neuron_schedule
    bool refine_each_iteration = false;  // interleave pair-swap refinement over [0, i_B)
    long refine_stagnation = 0;          // 0 = default_swap_stagnation(0, i_B)
    double rcond = 1e-9;
    std::uint64_t seed = 0;
    std::vector<std::pair<Index, Index>> initial_pairs;  // (position, sample) pins
    Index max_samples = 0;                               // 0 = place the whole pool
    Activation activation = Activation::Tanh;
    long resync_interval = 4096;
    std::function<void(const PromotionRecord&)> progress;  // per-promotion sink
    ProgressChannel* channel = nullptr;                    // optional live snapshots
};

struct RefineSpan {
    Index i_B = 0;
    double S_before = 0.0;
    double S_after = 0.0;
    long accepted = 0;
};

struct FitResult {
    std::vector<Index> final_perm;  // final_perm[p] = pool sample shown at position p
    std::vector<std::pair<Index, double>> S_history;  // (i_B, S) snapshots in loop order
    ElmModel model;
    Matrix beta;         // least-squares output weights of the final model
    Index in_model = 0;  // number of samples actually placed (= final i_B)
    std::vector<Index> in_model_positions;  // ascending positions holding placed samples
    long total_accepted = 0;
    double min_accepted_delta = std::numeric_limits<double>::infinity();
    std::vector<RefineSpan> refinements;
    // Pool samples occupying the fixed range at each promotion, in growth
    // order; with refinement off, each entry extends the previous one.
    std::vector<std::vector<Index>> prefix_snapshots;
    AllocationStats projection_alloc;
};

namespace detail {

inline void validate_run_inputs(const Matrix& v, const Matrix& x, const RunConfig& cfg,
                                Index limit) {
    if (v.rows() < 1 || v.cols() < 1 || x.cols() < 1)
        throw ArgumentError("run: empty coordinate or data matrix");
    if (v.rows() != x.rows())
        throw ArgumentError("run: coordinate and data row counts differ");
    if (!v.allFinite() || !x.allFinite())
        throw ArgumentError("run: inputs must be finite");
    if (cfg.k < 1)
        throw ArgumentError("run: k must be >= 1");
    if (cfg.rcond <= 0.0)
        throw ArgumentError("run: rcond must be positive");
    if (cfg.resync_interval < 1)
        throw ArgumentError("run: resync interval must be >= 1");
    if (cfg.max_samples < 0 || cfg.max_samples > v.rows())
        throw ArgumentError("run: max_samples outside [0, N]");
    if (static_cast<Index>(cfg.initial_pairs.size()) > limit)
        throw ArgumentError("run: more seed pairs than samples to place");

    std::vector<bool> v_seen(static_cast<std::size_t>(v.rows()), false);
    std::vector<bool> x_seen(static_cast<std::size_t>(v.rows()), false);
    for (const auto& [pos, sample] : cfg.initial_pairs) {
        if (pos < 0 || pos >= v.rows() || sample < 0 || sample >= v.rows())
            throw ArgumentError("run: seed pair index out of range");
        if (v_seen[static_cast<std::size_t>(pos)] || x_seen[static_cast<std::size_t>(sample)])
            throw ArgumentError("run: duplicate position or sample in seed pairs");
        v_seen[static_cast<std::size_t>(pos)] = true;
        x_seen[static_cast<std::size_t>(sample)] = true;
    }
}

} // namespace detail

// Full growth loop: seed -> repeat { inner candidate loop until stagnation,
// optional pair-swap refinement over [0, i_B), promote } until every position
// up to the limit is fixed.
//
// Seeded positions must form the fixed prefix internally, but callers pin
// arbitrary coordinates; the loop therefore works in a compacted position
// order (seeded coordinates first) and translates back when reporting.
inline FitResult run(const Matrix& v, const Matrix& x, const RunConfig& cfg) {
    const Index n_pool = v.rows();
    const Index limit = cfg.max_samples > 0 ? cfg.max_samples : n_pool;
    detail::validate_run_inputs(v, x, cfg, limit);

    // v_order[internal position] = caller position; seeded coordinates first.
    std::vector<Index> v_order;
    v_order.reserve(static_cast<std::size_t>(n_pool));
    std::vector<bool> taken(static_cast<std::size_t>(n_pool), false);
    for (const auto& [pos, sample] : cfg.initial_pairs) {
        v_order.push_back(pos);
        taken[static_cast<std::size_t>(pos)] = true;
    }
    for (Index p = 0; p < n_pool; ++p)
        if (!taken[static_cast<std::size_t>(p)])
            v_order.push_back(p);

    Matrix v_work(n_pool, v.cols());
    for (Index p = 0; p < n_pool; ++p)
        v_work.row(p) = v.row(v_order[static_cast<std::size_t>(p)]);

    Partition part = Partition::identity(n_pool);
    if (!cfg.initial_pairs.empty()) {
        std::vector<std::pair<Index, Index>> internal_pairs;
        internal_pairs.reserve(cfg.initial_pairs.size());
        for (std::size_t i = 0; i < cfg.initial_pairs.size(); ++i)
            internal_pairs.emplace_back(static_cast<Index>(i), cfg.initial_pairs[i].second);
        seed_fixed(part, internal_pairs);
    }

    Matrix x_work(n_pool, x.cols());
    for (Index p = 0; p < n_pool; ++p)
        x_work.row(p) = x.row(part.perm[static_cast<std::size_t>(p)]);

    FitResult result;
    ModelContext ctx;
    ctx.V = &v_work;
    ctx.activation = cfg.activation;
    ctx.rcond = cfg.rcond;
    ctx.seed = cfg.seed;
    ctx.neuron_schedule = cfg.neuron_schedule;
    ctx.alloc = &result.projection_alloc;

    SimilarityState state;
    state.resync_interval = cfg.resync_interval;

    std::mt19937_64 rng(cfg.seed);
    long iteration = 0;

    const auto record_promotion = [&](long accepted) {
        result.S_history.emplace_back(part.i_B, state.S);
        result.prefix_snapshots.emplace_back(part.perm.begin(),
                                             part.perm.begin() + part.i_A);
        if (cfg.progress)
            cfg.progress({iteration, part.i_A, part.i_B, ctx.model.neurons(), state.S, accepted});
        if (cfg.channel)
            cfg.channel->publish({part.i_A, part.i_B, state.S});
    };

    promote(part, state, ctx, x_work, cfg.k, limit);
    record_promotion(0);

    while (part.i_A < limit) {
        ++iteration;
        long accepted_this = 0;

        if (part.i_A < part.i_B && part.i_B < part.N) {
            const long stagnation = cfg.stagnation_inner > 0
                                        ? cfg.stagnation_inner
                                        : default_inner_stagnation(part.i_A, part.i_B);
            long rejections = 0;
            while (rejections < stagnation) {
                const SwapOutcome out = candidate_step(state, x_work, part, rng);
                if (out.accepted) {
                    ++accepted_this;
                    ++result.total_accepted;
                    result.min_accepted_delta = std::min(result.min_accepted_delta, out.delta);
                    rejections = 0;
                } else {
                    ++rejections;
                }
            }
            result.S_history.emplace_back(part.i_B, state.S);
        }

        if (cfg.refine_each_iteration && part.i_B >= 2) {
            const long stagnation = cfg.refine_stagnation > 0
                                        ? cfg.refine_stagnation
                                        : default_swap_stagnation(0, part.i_B);
            RefineSpan span{part.i_B, state.S, state.S, 0};
            const RefineResult refined =
                elmvis_plus_run(state, x_work, 0, part.i_B, stagnation, rng, &part.perm);
            span.S_after = refined.S_final;
            span.accepted = refined.accepted;
            result.refinements.push_back(span);
            accepted_this += refined.accepted;
            result.total_accepted += refined.accepted;
            if (refined.accepted > 0)
                result.min_accepted_delta =
                    std::min(result.min_accepted_delta, refined.min_delta);
            result.S_history.emplace_back(part.i_B, state.S);
        }

        promote(part, state, ctx, x_work, cfg.k, limit);
        record_promotion(accepted_this);
    }

    result.model = ctx.model;
    const Matrix h = hidden_layer(ctx.model, v_work.topRows(part.i_B));
    result.beta = solve_output_weights(h, x_work.topRows(part.i_B), cfg.rcond);
    result.in_model = part.i_B;

    result.final_perm.resize(static_cast<std::size_t>(n_pool));
    for (Index p = 0; p < n_pool; ++p)
        result.final_perm[static_cast<std::size_t>(v_order[static_cast<std::size_t>(p)])] =
            part.perm[static_cast<std::size_t>(p)];

    result.in_model_positions.assign(v_order.begin(), v_order.begin() + part.i_B);
    std::sort(result.in_model_positions.begin(), result.in_model_positions.end());

    ctx.alloc = nullptr;
    return result;
}

} // namespace elmvis
