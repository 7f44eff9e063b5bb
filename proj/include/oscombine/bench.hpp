#pragma once
// Ensemble benchmark harness: repeated train/split runs of an MLP ensemble,
// every combiner applied to the same per-pattern posterior matrices, test
// error reported with 95% confidence intervals.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oscombine/combiner.hpp"
#include "oscombine/dataset.hpp"
#include "oscombine/mlp.hpp"

namespace osc {

/// A rule request for the harness; `trim:auto` defers the trim window to a
/// per-run validation search.
struct BenchRule {
    std::string text;
    CombinerRule rule;
    bool trim_auto = false;
};

BenchRule parse_bench_rule(std::string_view text);

/// Exhaustive validation search over all trim windows (N1, N2), minimizing
/// misclassification. Ties prefer the wider window, then the smaller N1.
std::pair<int, int> select_trim_cut(const std::vector<PosteriorMatrix>& posteriors,
                                    std::span<const int> labels);
std::pair<int, int> select_trim_cut(const std::vector<Mlp>& ensemble, const Dataset& validation);

struct BenchConfig {
    std::filesystem::path data;
    int n_classifiers = 4;
    std::vector<BenchRule> rules;
    int runs = 20;
    MlpConfig mlp;
    /// Train the last floor(N/2) ensemble members for half their best epoch.
    bool variability = false;
    /// Reuse one split for every run instead of re-splitting per run.
    bool fix_split = false;
    SplitSpec split;
};

struct RuleStats {
    std::string rule;
    double mean_error_pct = 0.0;
    double ci95_halfwidth = 0.0;
    std::optional<std::pair<int, int>> window; // modal trim window, trim:auto only
};

struct EvalReport {
    std::vector<RuleStats> per_rule;
    RuleStats per_classifier;
    int runs = 0;
    std::optional<std::pair<int, int>> chosen_trim;
};

/// Runs the full protocol: per run a fresh split and fresh weight seeds,
/// N trained classifiers (optionally with deliberate quality variation),
/// every requested rule scored on the test split. Deterministic for a fixed
/// configuration.
EvalReport evaluate(const BenchConfig& config);

} // namespace osc
