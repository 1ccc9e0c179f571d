#include "doctest.h"

#include "elmvis/dataio.hpp"
#include "elmvis/eval.hpp"
#include "elmvis/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

using elmvis::Index;
using elmvis::Matrix;

namespace {

Matrix randn(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix out(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            out(r, c) = gauss(rng);
    return out;
}

// Upper chi-squared quantile via the Wilson-Hilferty cube approximation.
double chi2_quantile(double df, double z) {
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

// Two well-separated clusters of noisy direction vectors, classes
// interleaved so the pool order carries no block structure.
Matrix two_cluster_pool(Index per_class, double separation, double noise, std::uint64_t seed,
                        std::vector<long>& labels) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise);
    Matrix out(2 * per_class, 4);
    labels.clear();
    for (Index i = 0; i < 2 * per_class; ++i) {
        const long cls = i % 2;
        labels.push_back(cls);
        for (Index c = 0; c < 4; ++c)
            out(i, c) = gauss(rng);
        out(i, cls) += separation;
    }
    return out;
}

bool is_permutation_of_all(const std::vector<Index>& perm) {
    std::vector<Index> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<Index>(i))
            return false;
    return true;
}

} // namespace

TEST_CASE("seed_fixed pins samples to positions") {
    SUBCASE("empty pair list leaves the partition untouched") {
        elmvis::Partition part = elmvis::Partition::identity(6);
        elmvis::seed_fixed(part, {});
        CHECK(part.i_A == 0);
        CHECK(part.i_B == 0);
        for (Index p = 0; p < 6; ++p)
            CHECK(part.perm[static_cast<std::size_t>(p)] == p);
    }

    SUBCASE("identity pairs keep the prefix in place") {
        elmvis::Partition part = elmvis::Partition::identity(6);
        elmvis::seed_fixed(part, {{0, 0}, {1, 1}, {2, 2}});
        CHECK(part.i_A == 3);
        CHECK(part.i_B == 3);
        for (Index p = 0; p < 6; ++p)
            CHECK(part.perm[static_cast<std::size_t>(p)] == p);
    }

    SUBCASE("scattered pairs land each sample at its position") {
        elmvis::Partition part = elmvis::Partition::identity(8);
        const std::vector<std::pair<Index, Index>> pairs = {{5, 1}, {0, 6}, {3, 3}, {7, 0}};
        elmvis::seed_fixed(part, pairs);
        CHECK(part.i_A == 4);
        CHECK(part.i_B == 4);
        for (const auto& [v, x] : pairs)
            CHECK(part.perm[static_cast<std::size_t>(v)] == x);
        CHECK(is_permutation_of_all(part.perm));
    }

    SUBCASE("a hundred seeds across five classes") {
        // 20 seeds per class, class c owning samples [30c, 30c+30); seeded
        // positions interleave the classes across the first 100 slots.
        elmvis::Partition part = elmvis::Partition::identity(150);
        std::vector<std::pair<Index, Index>> pairs;
        for (Index cls = 0; cls < 5; ++cls)
            for (Index i = 0; i < 20; ++i)
                pairs.emplace_back(i * 5 + cls, cls * 30 + i);
        elmvis::seed_fixed(part, pairs);
        CHECK(part.i_A == 100);
        CHECK(part.i_B == 100);
        for (const auto& [v, x] : pairs)
            CHECK(part.perm[static_cast<std::size_t>(v)] == x);
        CHECK(is_permutation_of_all(part.perm));
    }

    SUBCASE("invalid pairs are rejected") {
        elmvis::Partition part = elmvis::Partition::identity(4);
        CHECK_THROWS_AS(elmvis::seed_fixed(part, {{0, 4}}), elmvis::ArgumentError);
        CHECK_THROWS_AS(elmvis::seed_fixed(part, {{4, 0}}), elmvis::ArgumentError);
        CHECK_THROWS_AS(elmvis::seed_fixed(part, {{0, 1}, {0, 2}}), elmvis::ArgumentError);
        CHECK_THROWS_AS(elmvis::seed_fixed(part, {{0, 1}, {1, 1}}), elmvis::ArgumentError);
        elmvis::seed_fixed(part, {{0, 0}});
        CHECK_THROWS_AS(elmvis::seed_fixed(part, {{1, 1}}), elmvis::ArgumentError);
    }
}

TEST_CASE("propose_candidate_swap draws uniformly from the right ranges") {
    std::mt19937_64 rng(5);

    SUBCASE("single candidate, single available: only one proposal exists") {
        elmvis::Partition part = elmvis::Partition::identity(2);
        part.i_A = 0;
        part.i_B = 1;
        for (int i = 0; i < 20; ++i) {
            const auto [a, b] = elmvis::propose_candidate_swap(rng, part);
            CHECK(a == 0);
            CHECK(b == 1);
        }
    }

    SUBCASE("draws stay inside the candidate and available ranges") {
        elmvis::Partition part = elmvis::Partition::identity(12);
        part.i_A = 3;
        part.i_B = 7;
        for (int i = 0; i < 1000; ++i) {
            const auto [a, b] = elmvis::propose_candidate_swap(rng, part);
            CHECK(a >= 3);
            CHECK(a < 7);
            CHECK(b >= 7);
            CHECK(b < 12);
        }
    }

    SUBCASE("joint distribution passes a chi-squared uniformity test") {
        elmvis::Partition part = elmvis::Partition::identity(16);
        part.i_A = 2;
        part.i_B = 6;
        const int draws = 10000;
        std::vector<long> counts(4 * 10, 0);
        for (int i = 0; i < draws; ++i) {
            const auto [a, b] = elmvis::propose_candidate_swap(rng, part);
            ++counts[static_cast<std::size_t>((a - 2) * 10 + (b - 6))];
        }
        const double expected = static_cast<double>(draws) / 40.0;
        double stat = 0.0;
        for (const long c : counts)
            stat += (c - expected) * (c - expected) / expected;
        // 39 degrees of freedom at p = 0.01.
        CHECK(stat < chi2_quantile(39.0, 2.3263478740408408));
    }

    SUBCASE("exhausted or empty ranges are state errors") {
        elmvis::Partition part = elmvis::Partition::identity(4);
        part.i_A = 2;
        part.i_B = 2;
        CHECK_THROWS_AS(elmvis::propose_candidate_swap(rng, part), elmvis::StateError);
        part.i_B = 4;
        CHECK_THROWS_AS(elmvis::propose_candidate_swap(rng, part), elmvis::StateError);
    }
}

TEST_CASE("candidate_step replaces candidates only when the score improves") {
    // i_A=0, i_B=1, N=2 forces the proposal (0, 1), making outcomes exact.
    const auto single_candidate_state = [](const Matrix& x) {
        Matrix a(1, 1);
        a << 1.0;
        return elmvis::init_state(a, x);
    };

    SUBCASE("identical sample is a zero-delta rejection") {
        Matrix x(2, 2);
        x << 0.5, 0.25, 0.5, 0.25;
        elmvis::Partition part = elmvis::Partition::identity(2);
        part.i_B = 1;
        elmvis::SimilarityState state = single_candidate_state(x);
        std::mt19937_64 rng(1);
        const elmvis::SwapOutcome out = elmvis::candidate_step(state, x, part, rng);
        CHECK_FALSE(out.accepted);
        CHECK(out.delta == 0.0);
    }

    SUBCASE("harmful replacement leaves everything bitwise unchanged") {
        Matrix x(2, 2);
        x << 1.0, 0.0, 0.5, 0.0;  // candidate already aligned better than the pool sample
        elmvis::Partition part = elmvis::Partition::identity(2);
        part.i_B = 1;
        elmvis::SimilarityState state = single_candidate_state(x);
        const Matrix x_before = x;
        const double s_before = state.S;
        std::mt19937_64 rng(1);
        const elmvis::SwapOutcome out = elmvis::candidate_step(state, x, part, rng);
        CHECK_FALSE(out.accepted);
        CHECK(out.delta == doctest::Approx(-0.75).epsilon(1e-12));
        CHECK((x.array() == x_before.array()).all());
        CHECK(state.S == s_before);
        CHECK(part.perm[0] == 0);
        CHECK(part.perm[1] == 1);
    }

    SUBCASE("beneficial replacement moves the sample in and the old one out") {
        Matrix x(2, 2);
        x << 0.5, 0.0, 1.0, 0.0;
        elmvis::Partition part = elmvis::Partition::identity(2);
        part.i_B = 1;
        elmvis::SimilarityState state = single_candidate_state(x);
        const double s_before = state.S;
        std::mt19937_64 rng(1);
        const elmvis::SwapOutcome out = elmvis::candidate_step(state, x, part, rng);
        CHECK(out.accepted);
        CHECK(out.delta == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(x(0, 0) == 1.0);  // pool sample now in the model
        CHECK(x(1, 0) == 0.5);  // displaced candidate back in the pool
        CHECK(part.perm[0] == 1);
        CHECK(part.perm[1] == 0);
        CHECK(state.S == doctest::Approx(s_before + out.delta).epsilon(1e-12));
        // Scratch recomputation over the in-model row agrees.
        CHECK(state.S == doctest::Approx(x(0, 0) * x(0, 0)).epsilon(1e-12));
    }

    SUBCASE("random instance: accepted steps match scratch recomputation") {
        const Matrix v = randn(20, 2, 31);
        const elmvis::ElmModel model = elmvis::init_model(2, 5, elmvis::Activation::Tanh, 32);
        const Matrix a = elmvis::projection_matrix(elmvis::hidden_layer(model, v.topRows(8)));
        Matrix x = randn(20, 3, 33);
        elmvis::Partition part = elmvis::Partition::identity(20);
        part.i_A = 2;
        part.i_B = 8;
        elmvis::SimilarityState state = elmvis::init_state(a, x);

        std::mt19937_64 rng(34);
        long accepted = 0;
        for (int i = 0; i < 300; ++i) {
            const elmvis::SwapOutcome out = elmvis::candidate_step(state, x, part, rng);
            if (out.accepted) {
                ++accepted;
                CHECK(out.delta > 0.0);
                CHECK(out.a >= 2);
                CHECK(out.a < 8);
                CHECK(out.b >= 8);
            }
        }
        CHECK(accepted > 0);
        const double scratch = (x.topRows(8).cwiseProduct(a * x.topRows(8))).sum();
        CHECK(std::abs(state.S - scratch) <= 1e-8 * std::max(1.0, std::abs(scratch)));
        CHECK(is_permutation_of_all(part.perm));
    }

    SUBCASE("state size must match the partition") {
        Matrix x(3, 2);
        x.setZero();
        elmvis::Partition part = elmvis::Partition::identity(3);
        part.i_B = 2;
        elmvis::SimilarityState state = single_candidate_state(x);
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(elmvis::candidate_step(state, x, part, rng), elmvis::ArgumentError);
    }
}

TEST_CASE("default schedules") {
    CHECK(elmvis::default_neuron_schedule(1) == 4);
    CHECK(elmvis::default_neuron_schedule(8) == 4);
    CHECK(elmvis::default_neuron_schedule(16) == 4);
    CHECK(elmvis::default_neuron_schedule(20) == 5);
    CHECK(elmvis::default_neuron_schedule(100) == 25);
    CHECK(elmvis::default_neuron_schedule(1024) == 256);
    CHECK(elmvis::default_neuron_schedule(4096) == 256);
    for (Index i = 2; i <= 2000; ++i)
        CHECK(elmvis::default_neuron_schedule(i) >= elmvis::default_neuron_schedule(i - 1));

    CHECK(elmvis::default_inner_stagnation(0, 8) == 500);
    CHECK(elmvis::default_inner_stagnation(10, 110) == 1000);
    CHECK(elmvis::default_swap_stagnation(0, 10) == 1000);
    CHECK(elmvis::default_swap_stagnation(0, 300) == 6000);
}

TEST_CASE("promote freezes candidates and rebuilds the model") {
    const Matrix v = randn(40, 2, 51);
    Matrix x = randn(40, 3, 52);
    elmvis::Partition part = elmvis::Partition::identity(40);
    elmvis::seed_fixed(part, {{0, 0}, {1, 1}});

    elmvis::AllocationStats stats;
    elmvis::ModelContext ctx;
    ctx.V = &v;
    ctx.seed = 7;
    ctx.alloc = &stats;

    elmvis::SimilarityState state;

    elmvis::promote(part, state, ctx, x, 1);
    CHECK(part.i_A == 2);
    CHECK(part.i_B == 3);
    CHECK(state.rows() == 3);
    CHECK(ctx.model.neurons() == 4);
    CHECK(stats.current_elements == 9);

    // The rebuilt score equals a from-scratch evaluation of the same model.
    const double oracle = elmvis::oracle_similarity(ctx.model, v.topRows(3), x.topRows(3));
    CHECK(std::abs(state.S - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));

    const Matrix weights_before = ctx.model.weights();
    elmvis::promote(part, state, ctx, x, 1);
    CHECK(part.i_A == 3);
    CHECK(part.i_B == 4);
    // Same scheduled width: the hidden weights are reused, not re-drawn.
    CHECK((ctx.model.weights().array() == weights_before.array()).all());
    CHECK(stats.current_elements == 16);
    CHECK(stats.peak_elements <= 2 * 16);

    elmvis::promote(part, state, ctx, x, 28);
    CHECK(part.i_A == 4);
    CHECK(part.i_B == 32);
    CHECK(ctx.model.neurons() == 8);  // width changed, weights re-drawn
    CHECK(stats.current_elements == 32 * 32);
    CHECK(stats.peak_elements <= 2 * 32 * 32);

    // Growth is capped by the limit and never regresses.
    elmvis::promote(part, state, ctx, x, 100, 36);
    CHECK(part.i_A == 32);
    CHECK(part.i_B == 36);
    elmvis::promote(part, state, ctx, x, 100, 36);
    CHECK(part.i_A == 36);
    CHECK(part.i_B == 36);

    CHECK_THROWS_AS(elmvis::promote(part, state, ctx, x, 0), elmvis::ArgumentError);
}

TEST_CASE("promote rejects a shrinking neuron schedule") {
    const Matrix v = randn(20, 2, 61);
    Matrix x = randn(20, 2, 62);
    elmvis::Partition part = elmvis::Partition::identity(20);
    elmvis::ModelContext ctx;
    ctx.V = &v;
    ctx.neuron_schedule = [](Index i_b) { return i_b >= 8 ? Index{4} : Index{8}; };
    elmvis::SimilarityState state;

    elmvis::promote(part, state, ctx, x, 4);  // i_B = 4, width 8
    CHECK(ctx.model.neurons() == 8);
    CHECK_THROWS_AS(elmvis::promote(part, state, ctx, x, 4), elmvis::ArgumentError);
}

TEST_CASE("promotion records serialize as stable JSON lines") {
    elmvis::PromotionRecord rec;
    rec.iteration = 3;
    rec.i_A = 8;
    rec.i_B = 16;
    rec.L = 4;
    rec.S = 1.5;
    rec.accepted_swaps = 12;
    CHECK(elmvis::to_json_line(rec) ==
          "{\"iteration\":3,\"i_A\":8,\"i_B\":16,\"L\":4,\"S\":1.5,\"accepted_swaps\":12}");
}

TEST_CASE("progress channel snapshots are always mutually consistent") {
    elmvis::ProgressChannel channel;
    channel.publish({1, 2, 0.5});
    const elmvis::ProgressSnapshot first = channel.read();
    CHECK(first.i_A == 1);
    CHECK(first.i_B == 2);
    CHECK(first.S == 0.5);

    // Writer publishes linked values; readers must never observe a mix of
    // two publications.
    std::atomic<bool> stop{false};
    std::atomic<long> violations{0};
    std::thread writer([&channel, &stop] {
        for (Index v = 0; v < 200000 && !stop.load(); ++v)
            channel.publish({v, v + 1, static_cast<double>(v) * 0.5});
    });
    std::vector<std::thread> readers;
    for (int r = 0; r < 2; ++r)
        readers.emplace_back([&channel, &violations] {
            for (int i = 0; i < 100000; ++i) {
                const elmvis::ProgressSnapshot snap = channel.read();
                if (snap.i_B != snap.i_A + 1 ||
                    snap.S != static_cast<double>(snap.i_A) * 0.5)
                    violations.fetch_add(1);
            }
        });
    for (auto& t : readers)
        t.join();
    stop.store(true);
    writer.join();
    CHECK(violations.load() == 0);
}

TEST_CASE("run grows the model over the whole pool") {
    const Matrix v = randn(24, 2, 71);
    const Matrix x = randn(24, 3, 72);

    elmvis::RunConfig cfg;
    cfg.seed = 5;
    cfg.k = 8;
    cfg.stagnation_inner = 200;

    std::vector<elmvis::PromotionRecord> records;
    cfg.progress = [&records](const elmvis::PromotionRecord& rec) { records.push_back(rec); };

    const elmvis::FitResult fit = elmvis::run(v, x, cfg);

    CHECK(fit.in_model == 24);
    CHECK(is_permutation_of_all(fit.final_perm));
    CHECK(fit.in_model_positions.size() == 24);
    CHECK(fit.model.neurons() == elmvis::default_neuron_schedule(24));
    CHECK(fit.beta.rows() == fit.model.neurons());
    CHECK(fit.beta.cols() == 3);

    // One record per promotion, ending fully fixed.
    REQUIRE(!records.empty());
    CHECK(records.front().iteration == 0);
    CHECK(records.front().i_A == 0);
    CHECK(records.back().i_A == 24);
    for (std::size_t i = 1; i < records.size(); ++i) {
        CHECK(records[i].i_A >= records[i - 1].i_A);
        CHECK(records[i].i_B >= records[i - 1].i_B);
    }

    // S never decreases while the model is unchanged.
    for (std::size_t i = 1; i < fit.S_history.size(); ++i)
        if (fit.S_history[i].first == fit.S_history[i - 1].first)
            CHECK(fit.S_history[i].second >= fit.S_history[i - 1].second);

    // Fixed samples stay fixed: every snapshot is a prefix of the last.
    REQUIRE(!fit.prefix_snapshots.empty());
    const std::vector<Index>& final_prefix = fit.prefix_snapshots.back();
    CHECK(final_prefix.size() == 24);
    for (const auto& snap : fit.prefix_snapshots)
        for (std::size_t i = 0; i < snap.size(); ++i)
            CHECK(snap[i] == final_prefix[i]);

    // Unseeded runs keep caller positions, so the final score is checkable
    // from the outside against a from-scratch evaluation.
    Matrix arranged(24, 3);
    for (Index p = 0; p < 24; ++p)
        arranged.row(p) = x.row(fit.final_perm[static_cast<std::size_t>(p)]);
    const double oracle = elmvis::oracle_similarity(fit.model, v, arranged, cfg.rcond);
    CHECK(std::abs(fit.S_history.back().second - oracle) <=
          1e-7 * std::max(1.0, std::abs(oracle)));

    // Determinism: the same configuration reproduces everything.
    const elmvis::FitResult again = elmvis::run(v, x, cfg);
    CHECK(again.final_perm == fit.final_perm);
    REQUIRE(again.S_history.size() == fit.S_history.size());
    for (std::size_t i = 0; i < fit.S_history.size(); ++i) {
        CHECK(again.S_history[i].first == fit.S_history[i].first);
        CHECK(again.S_history[i].second == fit.S_history[i].second);
    }
}

TEST_CASE("run with max_samples keeps the projector small") {
    const Matrix v = randn(200, 2, 81);
    const Matrix x = randn(200, 3, 82);

    elmvis::RunConfig cfg;
    cfg.seed = 9;
    cfg.max_samples = 40;
    cfg.stagnation_inner = 150;

    const elmvis::FitResult fit = elmvis::run(v, x, cfg);
    CHECK(fit.in_model == 40);
    CHECK(fit.in_model_positions.size() == 40);
    for (Index p = 0; p < 40; ++p)
        CHECK(fit.in_model_positions[static_cast<std::size_t>(p)] == p);
    CHECK(is_permutation_of_all(fit.final_perm));
    CHECK(fit.projection_alloc.peak_elements <= 2 * 40 * 40);
    CHECK(fit.projection_alloc.current_elements == 40 * 40);
}

TEST_CASE("run honors seeded pairs at arbitrary positions") {
    const Matrix v = randn(30, 2, 91);
    const Matrix x = randn(30, 3, 92);

    elmvis::RunConfig cfg;
    cfg.seed = 11;
    cfg.stagnation_inner = 150;
    cfg.initial_pairs = {{17, 4}, {2, 9}, {25, 0}};

    const elmvis::FitResult fit = elmvis::run(v, x, cfg);
    CHECK(is_permutation_of_all(fit.final_perm));
    for (const auto& [pos, sample] : cfg.initial_pairs)
        CHECK(fit.final_perm[static_cast<std::size_t>(pos)] == sample);
}

TEST_CASE("interleaved refinement never lowers the score") {
    const Matrix v = randn(32, 2, 101);
    const Matrix x = randn(32, 3, 102);

    elmvis::RunConfig cfg;
    cfg.seed = 13;
    cfg.stagnation_inner = 150;
    cfg.refine_each_iteration = true;
    cfg.refine_stagnation = 300;

    const elmvis::FitResult fit = elmvis::run(v, x, cfg);
    CHECK(!fit.refinements.empty());
    for (const auto& span : fit.refinements) {
        CHECK(span.S_after >= span.S_before);
        if (span.accepted > 0)
            CHECK(span.S_after > span.S_before);
    }
    CHECK(is_permutation_of_all(fit.final_perm));

    // Refinement may reorder the fixed range, but in-model membership only
    // grows: every snapshot's samples appear in all later snapshots.
    for (std::size_t j = 1; j < fit.prefix_snapshots.size(); ++j) {
        std::vector<Index> prev = fit.prefix_snapshots[j - 1];
        std::vector<Index> next = fit.prefix_snapshots[j];
        std::sort(prev.begin(), prev.end());
        std::sort(next.begin(), next.end());
        CHECK(std::includes(next.begin(), next.end(), prev.begin(), prev.end()));
    }
}

TEST_CASE("run separates two clusters on a line") {
    std::vector<long> labels;
    const Matrix pool = two_cluster_pool(30, 6.0, 0.25, 111, labels);
    const Matrix x = elmvis::normalize_rows(pool);
    const Matrix v = elmvis::make_layout({elmvis::LayoutKind::Grid, 1, 1.0}, 60, 0);

    elmvis::RunConfig cfg;
    cfg.seed = 0;
    cfg.refine_each_iteration = true;
    // Two neurons on a line can only fit smooth maps, so a contiguous
    // placement of each cluster is the only well-reconstructed optimum;
    // larger models happily fit alternating blocks.
    cfg.neuron_schedule = [](Index) { return Index{2}; };

    const elmvis::FitResult fit = elmvis::run(v, x, cfg);
    CHECK(is_permutation_of_all(fit.final_perm));

    // Each half of the line should be dominated by one cluster.
    for (int half = 0; half < 2; ++half) {
        long count0 = 0;
        for (Index p = half * 30; p < (half + 1) * 30; ++p)
            if (labels[static_cast<std::size_t>(fit.final_perm[static_cast<std::size_t>(p)])] == 0)
                ++count0;
        const double purity =
            std::max(count0, 30 - count0) / 30.0;
        CHECK(purity >= 0.9);
    }
}

TEST_CASE("run rejects invalid configurations") {
    const Matrix v = randn(10, 2, 121);
    const Matrix x = randn(10, 3, 122);
    elmvis::RunConfig cfg;

    elmvis::RunConfig bad_k = cfg;
    bad_k.k = 0;
    CHECK_THROWS_AS(elmvis::run(v, x, bad_k), elmvis::ArgumentError);

    elmvis::RunConfig bad_max = cfg;
    bad_max.max_samples = 11;
    CHECK_THROWS_AS(elmvis::run(v, x, bad_max), elmvis::ArgumentError);

    elmvis::RunConfig bad_pairs = cfg;
    bad_pairs.initial_pairs = {{0, 0}, {1, 0}};
    CHECK_THROWS_AS(elmvis::run(v, x, bad_pairs), elmvis::ArgumentError);

    CHECK_THROWS_AS(elmvis::run(v, randn(9, 3, 123), cfg), elmvis::ArgumentError);

    elmvis::RunConfig bad_rcond = cfg;
    bad_rcond.rcond = 0.0;
    CHECK_THROWS_AS(elmvis::run(v, x, bad_rcond), elmvis::ArgumentError);
}
