#pragma once

// Scoring and ground-truth arbitration: similarity recomputed from scratch
// (no incremental shortcuts), confusion matrices, class matching up to
// relabeling, and reconstruction accuracy against a known arrangement.

#include "elmvis/common.hpp"
#include "elmvis/elm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace elmvis {

// Builds H, the projection, and the predictions from nothing but the model
// and the raw matrices; the arbiter every delta formula is tested against.
inline double oracle_similarity(const ElmModel& model, const Matrix& v, const Matrix& x,
                                double rcond = 1e-9) {
    if (v.rows() != x.rows())
        throw ArgumentError("oracle_similarity: coordinate and data row counts differ");
    const Matrix h = hidden_layer(model, v);
    const Matrix a = projection_matrix(h, rcond);
    return (x.cwiseProduct(a * x)).sum();
}

struct OracleReport {
    double S_direct = 0.0;
    double S_incremental = 0.0;
    double rel_error = 0.0;
};

inline OracleReport make_oracle_report(double s_direct, double s_incremental) {
    OracleReport report;
    report.S_direct = s_direct;
    report.S_incremental = s_incremental;
    report.rel_error =
        std::abs(s_direct - s_incremental) / std::max(std::abs(s_direct), 1e-10);
    return report;
}

struct ConfusionMatrix {
    std::vector<std::vector<long>> counts;  // counts[true_class][assigned_class]

    Index k() const { return static_cast<Index>(counts.size()); }

    long total() const {
        long sum = 0;
        for (const auto& row : counts)
            for (long c : row)
                sum += c;
        return sum;
    }

    // Rows scaled to percent of their class total; all-zero rows stay zero.
    Matrix percentages() const {
        Matrix out = Matrix::Zero(k(), k());
        for (Index i = 0; i < k(); ++i) {
            long row_sum = 0;
            for (long c : counts[static_cast<std::size_t>(i)])
                row_sum += c;
            if (row_sum == 0)
                continue;
            for (Index j = 0; j < k(); ++j)
                out(i, j) = 100.0 * static_cast<double>(counts[static_cast<std::size_t>(i)]
                                                              [static_cast<std::size_t>(j)]) /
                            static_cast<double>(row_sum);
        }
        return out;
    }
};

inline ConfusionMatrix confusion(const std::vector<long>& true_labels,
                                 const std::vector<long>& assigned_labels, Index k) {
    if (true_labels.size() != assigned_labels.size())
        throw ArgumentError("confusion: label sequences differ in length");
    if (k < 1)
        throw ArgumentError("confusion: class count must be >= 1");

    ConfusionMatrix cm;
    cm.counts.assign(static_cast<std::size_t>(k), std::vector<long>(static_cast<std::size_t>(k), 0));
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const long t = true_labels[i];
        const long a = assigned_labels[i];
        if (t < 0 || t >= k || a < 0 || a >= k)
            throw ArgumentError("confusion: label out of range at position " + std::to_string(i));
        ++cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(a)];
    }
    return cm;
}

struct BestPermutation {
    double accuracy = 1.0;
    std::vector<Index> perm;  // perm[true_class] = assigned class matched to it
};

// Unsupervised pairing fixes classes only up to relabeling, so accuracy is
// taken over the class permutation maximizing the matched count. Exhaustive
// k! search keeps the arbiter trivially correct; k is capped accordingly.
inline BestPermutation best_permutation_accuracy(const ConfusionMatrix& cm) {
    const Index k = cm.k();
    if (k > 10)
        throw CapabilityError(
            "best_permutation_accuracy: factorial search supports at most 10 classes; "
            "reduce the class count");

    BestPermutation best;
    best.perm.resize(static_cast<std::size_t>(k));
    std::iota(best.perm.begin(), best.perm.end(), Index{0});
    const long total = cm.total();
    if (k == 0 || total == 0)
        return best;  // vacuous matching

    std::vector<Index> perm = best.perm;
    long best_sum = -1;
    do {
        long sum = 0;
        for (Index i = 0; i < k; ++i)
            sum += cm.counts[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        if (sum > best_sum) {
            best_sum = sum;
            best.perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    best.accuracy = static_cast<double>(best_sum) / static_cast<double>(total);
    return best;
}

struct ReconstructionScore {
    double class_level = 0.0;   // same class at the position as the true arrangement
    double sample_exact = 0.0;  // exactly the true pool row at the position
};

// truth[p] names the pool row that belongs at position p; for a pool built
// by shuffling a reference matrix, that is the inverse of the shuffle
// permutation. labels are per pool row.
inline ReconstructionScore reconstruction_accuracy(const std::vector<Index>& final_perm,
                                                   const std::vector<Index>& truth,
                                                   const std::vector<long>& labels) {
    if (final_perm.size() != truth.size() || final_perm.size() != labels.size())
        throw ArgumentError("reconstruction_accuracy: sequence lengths differ");
    if (final_perm.empty())
        throw ArgumentError("reconstruction_accuracy: empty sequences");

    const auto n = final_perm.size();
    long exact = 0;
    long class_match = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const Index got = final_perm[p];
        const Index want = truth[p];
        if (got < 0 || got >= static_cast<Index>(n) || want < 0 || want >= static_cast<Index>(n))
            throw ArgumentError("reconstruction_accuracy: index out of range at position " +
                                std::to_string(p));
        if (got == want)
            ++exact;
        if (labels[static_cast<std::size_t>(got)] == labels[static_cast<std::size_t>(want)])
            ++class_match;
    }

    ReconstructionScore score;
    score.class_level = static_cast<double>(class_match) / static_cast<double>(n);
    score.sample_exact = static_cast<double>(exact) / static_cast<double>(n);
    return score;
}

namespace detail {

inline void append_s_history(std::ostringstream& out,
                             const std::vector<std::pair<Index, double>>& s_history) {
    out << "\"S_history\":[";
    for (std::size_t i = 0; i < s_history.size(); ++i) {
        if (i > 0)
            out << ',';
        out << '[' << s_history[i].first << ',' << format_double(s_history[i].second) << ']';
    }
    out << ']';
}

} // namespace detail

// Key order and float formatting are fixed so reruns serialize identically.
inline std::string metrics_json(const std::vector<std::pair<Index, double>>& s_history) {
    std::ostringstream out;
    out << '{';
    detail::append_s_history(out, s_history);
    out << "}\n";
    return out.str();
}

inline std::string metrics_json(const ConfusionMatrix& cm, const BestPermutation& best,
                                const std::vector<std::pair<Index, double>>& s_history) {
    std::ostringstream out;
    out << "{\"confusion\":[";
    for (Index i = 0; i < cm.k(); ++i) {
        if (i > 0)
            out << ',';
        out << '[';
        for (Index j = 0; j < cm.k(); ++j) {
            if (j > 0)
                out << ',';
            out << cm.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        out << ']';
    }
    out << "],\"best_perm\":[";
    for (std::size_t i = 0; i < best.perm.size(); ++i) {
        if (i > 0)
            out << ',';
        out << best.perm[i];
    }
    out << "],\"accuracy\":" << format_double(best.accuracy) << ',';
    detail::append_s_history(out, s_history);
    out << "}\n";
    return out.str();
}

} // namespace elmvis
