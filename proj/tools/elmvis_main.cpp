// Command-line front end: incremental visualization runs, pairing
// experiments, standalone refinement of saved arrangements, and randomized
// oracle-agreement checks.
//
// Exit codes: 0 success, 1 numeric failure or violated oracle threshold,
// 2 usage errors (bad flags, missing or malformed files).

#include "elmvis/elmvis.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace {

using elmvis::Index;
using elmvis::Matrix;
using elmvis::RowVector;

// Flags shared by the subcommands that execute an incremental fit.
struct RunFlags {
    long k = 8;
    long stagnation = 0;           // 0: default rule
    std::string neurons = "auto";  // "auto" or a fixed width
    bool refine = false;
    long refine_stagnation = 0;
    double rcond = 1e-9;
    std::uint64_t seed = 0;
    long max_samples = 0;
    bool no_normalize = false;
    elmvis::Activation activation = elmvis::Activation::Tanh;
    std::string seeds_file;
    std::string out_dir;
    std::string config_file;
};

void add_run_flags(CLI::App& cmd, RunFlags& flags) {
    cmd.add_option("--k", flags.k, "Candidates admitted per promotion")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--stagnation", flags.stagnation,
                   "Consecutive rejections ending an inner loop (0 = auto)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_option("--neurons", flags.neurons, "Hidden width: 'auto' growth schedule or a number")
        ->capture_default_str();
    cmd.add_flag("--refine", flags.refine, "Run pair-swap refinement over [0, i_B) each iteration");
    cmd.add_option("--refine-stagnation", flags.refine_stagnation,
                   "Consecutive rejections ending a refinement (0 = auto)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_option("--rcond", flags.rcond, "Singular-value cutoff for the pseudoinverse")
        ->capture_default_str();
    cmd.add_option("--seed", flags.seed, "Random seed")->capture_default_str();
    cmd.add_option("--max-samples", flags.max_samples,
                   "Stop after placing this many samples (0 = whole pool)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_flag("--no-normalize", flags.no_normalize, "Skip unit-normalizing data rows");
    cmd.add_option("--activation", flags.activation, "Hidden activation")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, elmvis::Activation>{{"sigmoid", elmvis::Activation::Sigmoid},
                                                      {"tanh", elmvis::Activation::Tanh},
                                                      {"linear", elmvis::Activation::Linear}},
            CLI::ignore_case))
        ->default_str("tanh");
    cmd.add_option("--seeds-file", flags.seeds_file,
                   "CSV of position,sample pairs pinned before optimization")
        ->check(CLI::ExistingFile);
    cmd.add_option("--out", flags.out_dir, "Output directory");
    cmd.add_option("--config", flags.config_file,
                   "Flat key=value file applied where flags are absent")
        ->check(CLI::ExistingFile);
}

// Feeds config-file entries through each option's own converter and checks.
// Applied after parsing, so command-line values always win; required options
// are therefore enforced by the subcommand handlers, not the parser.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    if (path.empty())
        return;
    std::ifstream in(path);
    if (!in)
        throw elmvis::DataError(path + ": cannot open");

    const auto trim = [](const std::string& text) {
        const auto first = text.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            return std::string{};
        return text.substr(first, text.find_last_not_of(" \t\r") - first + 1);
    };

    struct Entry {
        long line;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries;
    std::map<std::string, std::size_t> slot;  // last occurrence of a key wins

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#' || text.front() == ';')
            continue;
        const auto eq = text.find('=');
        const std::string key = eq == std::string::npos ? std::string{} : trim(text.substr(0, eq));
        if (key.empty())
            throw elmvis::ParseError(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        std::string value = trim(text.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        const auto [it, inserted] = slot.try_emplace(key, entries.size());
        if (inserted)
            entries.push_back(Entry{line_no, key, value});
        else
            entries[it->second] = Entry{line_no, key, value};
    }

    for (const Entry& entry : entries) {
        const std::string where = path + ":" + std::to_string(entry.line);
        if (entry.key == "config")
            throw elmvis::ParseError(where + ": config files do not nest");
        CLI::Option* op = cmd.get_option_no_throw("--" + entry.key);
        if (op == nullptr && entry.key.size() == 1)
            op = cmd.get_option_no_throw("-" + entry.key);
        if (op == nullptr)
            throw elmvis::ParseError(where + ": unknown option '" + entry.key + "'");
        if (op->count() > 0)
            continue;
        try {
            if (op->get_expected_min() == 0) {
                // Flag option: route through flag-value semantics ("true" when bare).
                op->add_result(op->get_flag_value("--" + entry.key,
                                                  entry.value.empty() ? "true" : entry.value));
            } else {
                op->add_result(entry.value);
            }
            op->run_callback();
        } catch (const CLI::Error& e) {
            throw elmvis::ParseError(where + ": " + e.what());
        }
    }
}

void require_flag(const std::string& value, const char* name) {
    if (value.empty())
        throw elmvis::ArgumentError(std::string(name) + " is required");
}

Index parse_neurons(const std::string& text) {
    if (text == "auto")
        return 0;
    long value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || value < 1)
        throw elmvis::ArgumentError("--neurons expects 'auto' or a positive integer, got '" +
                                    text + "'");
    return static_cast<Index>(value);
}

elmvis::RunConfig to_run_config(const RunFlags& flags) {
    elmvis::RunConfig cfg;
    cfg.k = flags.k;
    cfg.stagnation_inner = flags.stagnation;
    cfg.refine_each_iteration = flags.refine;
    cfg.refine_stagnation = flags.refine_stagnation;
    cfg.rcond = flags.rcond;
    cfg.seed = flags.seed;
    cfg.max_samples = static_cast<Index>(flags.max_samples);
    cfg.activation = flags.activation;
    if (const Index fixed = parse_neurons(flags.neurons); fixed > 0)
        cfg.neuron_schedule = [fixed](Index) { return fixed; };
    if (!flags.seeds_file.empty())
        cfg.initial_pairs = elmvis::load_index_pairs(flags.seeds_file);
    return cfg;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw elmvis::DataError(path.string() + ": cannot open for writing");
    out << content;
    if (!out)
        throw elmvis::DataError(path.string() + ": write failed");
}

std::vector<std::pair<Index, Index>> order_rows(const elmvis::FitResult& fit) {
    std::vector<std::pair<Index, Index>> rows;
    rows.reserve(fit.in_model_positions.size());
    for (const Index p : fit.in_model_positions)
        rows.emplace_back(p, fit.final_perm[static_cast<std::size_t>(p)]);
    return rows;
}

// Runs the fit with a progress sink writing JSON lines into out_dir.
elmvis::FitResult run_with_progress(const Matrix& v, const Matrix& x, elmvis::RunConfig cfg,
                                    const std::filesystem::path& out_dir) {
    std::ofstream progress(out_dir / "progress.jsonl");
    if (!progress)
        throw elmvis::DataError((out_dir / "progress.jsonl").string() + ": cannot open for writing");
    cfg.progress = [&progress](const elmvis::PromotionRecord& rec) {
        progress << elmvis::to_json_line(rec) << '\n';
    };
    return elmvis::run(v, x, cfg);
}

struct VisualizeFlags {
    std::string data_file;
    std::string layout = "grid";
    long dims = 2;
    double extent = 1.0;
    std::string labels_file;
    RunFlags run;
};

int cmd_visualize(const VisualizeFlags& flags) {
    require_flag(flags.data_file, "--data");
    require_flag(flags.run.out_dir, "--out");
    const Matrix pool = elmvis::load_matrix(flags.data_file);
    const Matrix x = flags.run.no_normalize ? pool : elmvis::normalize_rows(pool);

    std::vector<long> labels;
    if (!flags.labels_file.empty()) {
        labels = elmvis::load_labels(flags.labels_file);
        if (static_cast<Index>(labels.size()) != x.rows())
            throw elmvis::ArgumentError("--labels row count does not match --data");
    }

    elmvis::VisLayout layout;
    layout.dims = static_cast<Index>(flags.dims);
    layout.extent = flags.extent;
    if (flags.layout == "grid")
        layout.kind = elmvis::LayoutKind::Grid;
    else if (flags.layout == "normal")
        layout.kind = elmvis::LayoutKind::Normal;
    else if (flags.layout == "uniform")
        layout.kind = elmvis::LayoutKind::Uniform;
    else
        throw elmvis::ArgumentError("--layout must be grid, normal, or uniform");

    const Matrix v = elmvis::make_layout(layout, x.rows(), flags.run.seed);

    const std::filesystem::path out_dir(flags.run.out_dir);
    std::filesystem::create_directories(out_dir);
    const elmvis::FitResult fit = run_with_progress(v, x, to_run_config(flags.run), out_dir);

    elmvis::save_order_csv((out_dir / "order.csv").string(), order_rows(fit));
    write_text_file(out_dir / "metrics.json", elmvis::metrics_json(fit.S_history));

    if (layout.dims == 2) {
        Matrix points(fit.in_model, 2);
        std::vector<long> marker_labels;
        for (std::size_t i = 0; i < fit.in_model_positions.size(); ++i) {
            const Index p = fit.in_model_positions[i];
            points.row(static_cast<Index>(i)) = v.row(p);
            if (!labels.empty())
                marker_labels.push_back(
                    labels[static_cast<std::size_t>(fit.final_perm[static_cast<std::size_t>(p)])]);
        }
        write_text_file(out_dir / "scatter.svg",
                        elmvis::scatter_svg(points, labels.empty() ? nullptr : &marker_labels));
    }
    return 0;
}

struct PairFlags {
    std::string inputs_file;
    std::string outputs_file;
    std::string true_labels_file;
    std::string input_labels_file;
    long classes = 0;  // 0: infer from labels
    RunFlags run;
};

int cmd_pair(const PairFlags& flags) {
    require_flag(flags.inputs_file, "--inputs");
    require_flag(flags.outputs_file, "--outputs");
    require_flag(flags.true_labels_file, "--true-labels");
    require_flag(flags.run.out_dir, "--out");
    const Matrix inputs = elmvis::load_matrix(flags.inputs_file);
    const Matrix pool = elmvis::load_matrix(flags.outputs_file);
    const Matrix x = flags.run.no_normalize ? pool : elmvis::normalize_rows(pool);

    const std::vector<long> pool_labels = elmvis::load_labels(flags.true_labels_file);
    if (static_cast<Index>(pool_labels.size()) != x.rows())
        throw elmvis::ArgumentError("--true-labels row count does not match --outputs");

    // Position p's assigned class: explicit file, or the argmax of the
    // one-hot-style input row.
    std::vector<long> input_labels;
    if (!flags.input_labels_file.empty()) {
        input_labels = elmvis::load_labels(flags.input_labels_file);
        if (static_cast<Index>(input_labels.size()) != inputs.rows())
            throw elmvis::ArgumentError("--input-labels row count does not match --inputs");
    } else {
        input_labels.reserve(static_cast<std::size_t>(inputs.rows()));
        for (Index r = 0; r < inputs.rows(); ++r) {
            Index arg = 0;
            inputs.row(r).maxCoeff(&arg);
            input_labels.push_back(arg);
        }
    }

    long k_classes = flags.classes;
    if (k_classes == 0) {
        for (const long l : pool_labels)
            k_classes = std::max(k_classes, l + 1);
        for (const long l : input_labels)
            k_classes = std::max(k_classes, l + 1);
    }

    const std::filesystem::path out_dir(flags.run.out_dir);
    std::filesystem::create_directories(out_dir);
    const elmvis::FitResult fit = run_with_progress(inputs, x, to_run_config(flags.run), out_dir);

    std::vector<long> truth;
    std::vector<long> assigned;
    for (const Index p : fit.in_model_positions) {
        truth.push_back(pool_labels[static_cast<std::size_t>(fit.final_perm[static_cast<std::size_t>(p)])]);
        assigned.push_back(input_labels[static_cast<std::size_t>(p)]);
    }
    const elmvis::ConfusionMatrix cm =
        elmvis::confusion(truth, assigned, static_cast<Index>(k_classes));
    const elmvis::BestPermutation best = elmvis::best_permutation_accuracy(cm);

    std::ostringstream cm_csv;
    for (Index i = 0; i < cm.k(); ++i) {
        for (Index j = 0; j < cm.k(); ++j) {
            if (j > 0)
                cm_csv << ',';
            cm_csv << cm.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        cm_csv << '\n';
    }
    write_text_file(out_dir / "confusion.csv", cm_csv.str());
    write_text_file(out_dir / "metrics.json", elmvis::metrics_json(cm, best, fit.S_history));
    elmvis::save_order_csv((out_dir / "order.csv").string(), order_rows(fit));
    return 0;
}

struct RefineFlags {
    std::string data_file;
    std::string layout_file;
    std::string order_file;
    std::string neurons = "auto";
    long stagnation = 0;
    std::uint64_t seed = 0;
    double rcond = 1e-9;
    bool no_normalize = false;
    elmvis::Activation activation = elmvis::Activation::Tanh;
    std::string trace_file;
    std::string out_dir;
    std::string config_file;
};

int cmd_refine(const RefineFlags& flags) {
    require_flag(flags.data_file, "--data");
    require_flag(flags.layout_file, "--layout-file");
    require_flag(flags.order_file, "--order");
    require_flag(flags.out_dir, "--out");
    const Matrix pool = elmvis::load_matrix(flags.data_file);
    const Matrix x_pool = flags.no_normalize ? pool : elmvis::normalize_rows(pool);
    const Matrix v = elmvis::load_matrix(flags.layout_file);
    const auto order = elmvis::load_index_pairs(flags.order_file);

    const Index n = static_cast<Index>(order.size());
    if (v.rows() != n)
        throw elmvis::ArgumentError("--layout-file row count does not match --order entries");

    // order.csv lists (position, sample); positions must cover 0..n-1 once.
    std::vector<Index> perm(static_cast<std::size_t>(n), -1);
    std::vector<bool> sample_seen(static_cast<std::size_t>(x_pool.rows()), false);
    for (const auto& [position, sample] : order) {
        if (position < 0 || position >= n)
            throw elmvis::ArgumentError("--order position " + std::to_string(position) +
                                        " outside [0, " + std::to_string(n) + ")");
        if (sample < 0 || sample >= x_pool.rows())
            throw elmvis::ArgumentError("--order sample " + std::to_string(sample) +
                                        " outside the data pool");
        if (perm[static_cast<std::size_t>(position)] != -1)
            throw elmvis::ArgumentError("--order repeats position " + std::to_string(position));
        if (sample_seen[static_cast<std::size_t>(sample)])
            throw elmvis::ArgumentError("--order repeats sample " + std::to_string(sample));
        perm[static_cast<std::size_t>(position)] = sample;
        sample_seen[static_cast<std::size_t>(sample)] = true;
    }

    Matrix x(n, x_pool.cols());
    for (Index p = 0; p < n; ++p)
        x.row(p) = x_pool.row(perm[static_cast<std::size_t>(p)]);

    const Index fixed = parse_neurons(flags.neurons);
    const Index width = fixed > 0 ? fixed : elmvis::default_neuron_schedule(n);
    const elmvis::ElmModel model =
        elmvis::init_model(v.cols(), width, flags.activation, flags.seed);
    const Matrix h = elmvis::hidden_layer(model, v);
    elmvis::SimilarityState state =
        elmvis::init_state(elmvis::projection_matrix(h, flags.rcond), x);

    const double s_before = state.S;
    const long stagnation =
        flags.stagnation > 0 ? flags.stagnation : elmvis::default_swap_stagnation(0, n);

    const std::filesystem::path out_dir(flags.out_dir);
    std::filesystem::create_directories(out_dir);

    elmvis::RefineResult refined;
    if (!flags.trace_file.empty()) {
        std::ofstream trace(flags.trace_file);
        if (!trace)
            throw elmvis::DataError(flags.trace_file + ": cannot open for writing");
        refined = elmvis::elmvis_plus_run(state, x, 0, n, stagnation, flags.seed, &perm, &trace);
    } else {
        refined = elmvis::elmvis_plus_run(state, x, 0, n, stagnation, flags.seed, &perm);
    }

    std::vector<std::pair<Index, Index>> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (Index p = 0; p < n; ++p)
        rows.emplace_back(p, perm[static_cast<std::size_t>(p)]);
    elmvis::save_order_csv((out_dir / "order.csv").string(), rows);

    std::ostringstream metrics;
    metrics << "{\"S_before\":" << elmvis::format_double(s_before)
            << ",\"S_after\":" << elmvis::format_double(refined.S_final)
            << ",\"accepted_swaps\":" << refined.accepted << "}\n";
    write_text_file(out_dir / "metrics.json", metrics.str());

    std::cout << "S_before " << elmvis::format_double(s_before) << "\nS_after "
              << elmvis::format_double(refined.S_final) << "\naccepted " << refined.accepted
              << '\n';
    return 0;
}

struct OracleFlags {
    long trials = 1;
    std::uint64_t seed = 0;
    long jobs = 1;
};

// One randomized agreement trial: build a small instance, drive the
// incremental state through a mixed sequence of row moves and pair swaps,
// and compare each closed-form prediction and the running score against
// full recomputation. A recomputed score carries roundoff proportional to
// its magnitude, so a difference of two of them is only meaningful down to
// that scale; the delta denominator is floored there. Returns the worst
// relative error seen.
double oracle_trial(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto draw = [&rng](Index lo, Index hi) {
        return std::uniform_int_distribution<Index>(lo, hi)(rng);
    };
    const Index n = draw(2, 30);
    const Index width = draw(1, 10);
    const Index d = draw(1, 6);
    const Index v_dim = draw(1, 3);

    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix v(n, v_dim);
    Matrix x(n, d);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < v_dim; ++c)
            v(r, c) = gauss(rng);
        for (Index c = 0; c < d; ++c)
            x(r, c) = gauss(rng);
    }

    const elmvis::ElmModel model = elmvis::init_model(v_dim, width, elmvis::Activation::Tanh, rng());
    const Matrix h = elmvis::hidden_layer(model, v);
    elmvis::SimilarityState state = elmvis::init_state(elmvis::projection_matrix(h, 1e-9), x);

    double worst = 0.0;
    const auto score_agrees = [&worst](double got, double want) {
        worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
    };
    const auto delta_agrees = [&worst](double got, double want, double scale) {
        const double floor = 1e-6 * (1.0 + std::abs(scale));
        worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), floor));
    };

    double s_prev = elmvis::oracle_similarity(model, v, x);
    score_agrees(state.S, s_prev);

    for (int step = 0; step < 12; ++step) {
        double predicted = 0.0;
        if (draw(0, 1) == 0) {
            const Index row = draw(0, n - 1);
            RowVector delta(d);
            for (Index c = 0; c < d; ++c)
                delta(c) = gauss(rng);
            predicted = elmvis::delta_row(state, row, delta);
            elmvis::apply_row_update(state, x, row, delta);
        } else {
            const Index a = draw(0, n - 1);
            Index b = draw(0, n - 2);
            if (b >= a)
                ++b;
            predicted = elmvis::delta_pair_swap(state, x, a, b);
            elmvis::apply_pair_swap(state, x, a, b);
        }
        const double s_now = elmvis::oracle_similarity(model, v, x);
        delta_agrees(predicted, s_now - s_prev, s_prev);
        score_agrees(state.S, s_now);
        s_prev = s_now;
    }
    return worst;
}

int cmd_eval_oracle(const OracleFlags& flags) {
    std::vector<double> errors(static_cast<std::size_t>(flags.trials), 0.0);
    const long jobs = std::max<long>(1, std::min(flags.jobs, flags.trials));

    // Trials are seeded independently, so job count never changes results;
    // output is printed in trial order after all workers finish.
    const auto worker = [&errors, &flags, jobs](long first) {
        for (long t = first; t < flags.trials; t += jobs)
            errors[static_cast<std::size_t>(t)] =
                oracle_trial(flags.seed + static_cast<std::uint64_t>(t));
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (long j = 0; j < jobs; ++j)
            threads.emplace_back(worker, j);
        for (auto& thread : threads)
            thread.join();
    }

    double max_error = 0.0;
    for (long t = 0; t < flags.trials; ++t) {
        std::cout << "trial " << t << " rel_error "
                  << elmvis::format_double(errors[static_cast<std::size_t>(t)]) << '\n';
        max_error = std::max(max_error, errors[static_cast<std::size_t>(t)]);
    }
    std::cout << "max_rel_error " << elmvis::format_double(max_error) << '\n';
    return max_error <= 1e-7 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental assignment of data samples to fixed visualization coordinates"};
    app.require_subcommand(1);

    VisualizeFlags vis;
    CLI::App* visualize = app.add_subcommand(
        "visualize", "Arrange a data pool on generated coordinates and plot it");
    visualize->add_option("--data", vis.data_file, "Pool matrix (CSV or raw-f64)")
        ->check(CLI::ExistingFile);
    visualize->add_option("--layout", vis.layout, "Coordinate layout: grid, normal, or uniform")
        ->capture_default_str();
    visualize->add_option("--dims", vis.dims, "Visualization dimensions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    visualize->add_option("--extent", vis.extent, "Layout half-width")->capture_default_str();
    visualize->add_option("--labels", vis.labels_file, "Per-sample labels, display only")
        ->check(CLI::ExistingFile);
    add_run_flags(*visualize, vis.run);

    PairFlags pair;
    CLI::App* pair_cmd = app.add_subcommand(
        "pair", "Pair input rows (e.g. class codes) with best-fitting output samples");
    pair_cmd->add_option("--inputs", pair.inputs_file, "Input-side matrix used as coordinates")
        ->check(CLI::ExistingFile);
    pair_cmd->add_option("--outputs", pair.outputs_file, "Shuffled output pool")
        ->check(CLI::ExistingFile);
    pair_cmd->add_option("--true-labels", pair.true_labels_file, "Class label per output row")
        ->check(CLI::ExistingFile);
    pair_cmd->add_option("--input-labels", pair.input_labels_file,
                         "Class label per input row (default: argmax of the row)")
        ->check(CLI::ExistingFile);
    pair_cmd->add_option("--classes", pair.classes, "Class count (0 = infer from labels)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    add_run_flags(*pair_cmd, pair.run);

    RefineFlags ref;
    CLI::App* refine = app.add_subcommand("refine", "Re-optimize a saved arrangement by pair swaps");
    refine->add_option("--data", ref.data_file, "Pool matrix the order refers to")
        ->check(CLI::ExistingFile);
    refine->add_option("--layout-file", ref.layout_file, "Coordinate matrix, one row per position")
        ->check(CLI::ExistingFile);
    refine->add_option("--order", ref.order_file, "position,sample_index CSV to start from")
        ->check(CLI::ExistingFile);
    refine->add_option("--neurons", ref.neurons, "Hidden width: 'auto' or a number")
        ->capture_default_str();
    refine->add_option("--stagnation", ref.stagnation, "Consecutive rejections ending the run (0 = auto)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    refine->add_option("--seed", ref.seed, "Random seed")->capture_default_str();
    refine->add_option("--rcond", ref.rcond, "Singular-value cutoff")->capture_default_str();
    refine->add_flag("--no-normalize", ref.no_normalize, "Skip unit-normalizing data rows");
    refine->add_option("--activation", ref.activation, "Hidden activation")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, elmvis::Activation>{{"sigmoid", elmvis::Activation::Sigmoid},
                                                      {"tanh", elmvis::Activation::Tanh},
                                                      {"linear", elmvis::Activation::Linear}},
            CLI::ignore_case))
        ->default_str("tanh");
    refine->add_option("--trace", ref.trace_file,
                       "Write accepted-swap CSV records (step,a,b,delta,S) to this file");
    refine->add_option("--out", ref.out_dir, "Output directory");
    refine->add_option("--config", ref.config_file,
                       "Flat key=value file applied where flags are absent")
        ->check(CLI::ExistingFile);

    OracleFlags oracle;
    CLI::App* eval_oracle = app.add_subcommand(
        "eval-oracle", "Check closed-form deltas against full recomputation");
    eval_oracle->add_option("--trials", oracle.trials, "Number of randomized trials")
        ->required()
        ->check(CLI::PositiveNumber);
    eval_oracle->add_option("--seed", oracle.seed, "Base seed")->capture_default_str();
    eval_oracle->add_option("--jobs", oracle.jobs, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    }

    try {
        if (visualize->parsed()) {
            apply_config_file(*visualize, vis.run.config_file);
            return cmd_visualize(vis);
        }
        if (pair_cmd->parsed()) {
            apply_config_file(*pair_cmd, pair.run.config_file);
            return cmd_pair(pair);
        }
        if (refine->parsed()) {
            apply_config_file(*refine, ref.config_file);
            return cmd_refine(ref);
        }
        return cmd_eval_oracle(oracle);
    } catch (const elmvis::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 1;
    } catch (const elmvis::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const elmvis::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const elmvis::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const elmvis::CapabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
