#pragma once
// Monte Carlo check of the boundary-offset theory: draws per-classifier
// noise, combines it with a rule, and measures the added error directly.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oscombine/combiner.hpp"
#include "oscombine/error_model.hpp"
#include "oscombine/os_moments.hpp"

namespace osc {

struct SimConfig {
    int n_classifiers = 1;
    CombinerRule rule;
    double slope = 2.0;       // > 0
    double noise_sigma = 0.1; // > 0, per class per classifier
    std::vector<std::pair<double, double>> biases; // optional, one pair per classifier
    std::int64_t trials = 1'000'000;               // >= 10^4
    std::uint64_t seed = 0;
    int threads = 0; // <= 0: hardware count; never affects the result
};

struct SimResult {
    double empirical_error = 0.0; // mean A(b) of the combined ensemble
    double single_error = 0.0;    // mean A(b) of classifier 1 on the same draws
    double ratio = 0.0;           // empirical_error / single_error
    double std_error = 0.0;       // delta-method std error of the ratio
    double offset_mean = 0.0;     // mean combined boundary offset b
    double offset_mean_se = 0.0;
    std::int64_t trials = 0;
};

/// Per trial: draw the two per-class noise values for every classifier, add
/// biases, combine each class column with the rule, form the boundary offset
/// b = (combined_i - combined_j)/slope and accumulate A(b) = b^2 slope / 2.
/// The single-classifier baseline reuses classifier 1's draws, so the ratio
/// estimator is paired. Deterministic for a fixed seed.
SimResult simulate(const SimConfig& config);

struct SweepEntry {
    std::string rule;
    int n = 0;
    SimResult sim;
    double analytic = 0.0; // unbiased reduction factor from the moment table
    double z = 0.0;        // (ratio - analytic) / std_error
};

struct SweepReport {
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<SweepEntry> entries;
};

/// Runs simulate for every (rule, n) pair with an independent derived seed
/// and attaches the analytic factor and its z-score. Pairs whose ranks do
/// not fit n are skipped.
SweepReport sweep(std::span<const CombinerRule> rules, std::span<const int> n_values,
                  std::int64_t trials, std::uint64_t seed, const MomentTable& table,
                  double slope = 2.0, double noise_sigma = 0.1, int threads = 0);

} // namespace osc
