#include "oscombine/boundary_sim.hpp"

#include <cmath>

#include "oscombine/parallel.hpp"
#include "oscombine/rng.hpp"

namespace osc {
namespace {

constexpr std::int64_t kSimChunk = 1 << 16;

void check_config(const SimConfig& cfg) {
    if (cfg.n_classifiers < 1) throw InvalidInputError("need at least one classifier");
    if (!(cfg.slope > 0.0)) throw InvalidInputError("slope must be positive");
    if (!(cfg.noise_sigma > 0.0)) throw InvalidInputError("noise sigma must be positive");
    if (cfg.trials < 10000) throw InvalidInputError("need at least 10^4 trials");
    if (!cfg.biases.empty() &&
        static_cast<int>(cfg.biases.size()) != cfg.n_classifiers)
        throw InvalidInputError("bias list length must equal the ensemble size");
    validate_rule(cfg.rule, cfg.n_classifiers);
}

struct Partial {
    double sum_a = 0.0, sum_g = 0.0;
    double sum_aa = 0.0, sum_gg = 0.0, sum_ag = 0.0;
    double sum_b = 0.0, sum_bb = 0.0;
};

} // namespace

SimResult simulate(const SimConfig& cfg) {
    check_config(cfg);
    const int n = cfg.n_classifiers;
    const double s = cfg.slope;
    const std::int64_t n_chunks = (cfg.trials + kSimChunk - 1) / kSimChunk;
    std::vector<Partial> partials(n_chunks);

    for_each_chunk(cfg.trials, kSimChunk, cfg.threads,
                   [&](std::int64_t chunk, std::int64_t, std::int64_t count) {
                       RandomStream rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(chunk)));
                       std::vector<double> vi(n), vj(n);
                       Partial p;
                       for (std::int64_t t = 0; t < count; ++t) {
                           for (int m = 0; m < n; ++m) {
                               const double bi = cfg.biases.empty() ? 0.0 : cfg.biases[m].first;
                               const double bj = cfg.biases.empty() ? 0.0 : cfg.biases[m].second;
                               vi[m] = bi + cfg.noise_sigma * rng.gaussian();
                               vj[m] = bj + cfg.noise_sigma * rng.gaussian();
                           }
                           const double single_b = (vi[0] - vj[0]) / s;
                           const double ci = combine_column(vi, cfg.rule);
                           const double cj = combine_column(vj, cfg.rule);
                           const double b = (ci - cj) / s;
                           const double a = 0.5 * s * b * b;
                           const double g = 0.5 * s * single_b * single_b;
                           p.sum_a += a;
                           p.sum_g += g;
                           p.sum_aa += a * a;
                           p.sum_gg += g * g;
                           p.sum_ag += a * g;
                           p.sum_b += b;
                           p.sum_bb += b * b;
                       }
                       partials[chunk] = p;
                   });

    Partial t;
    for (const Partial& p : partials) {
        t.sum_a += p.sum_a;
        t.sum_g += p.sum_g;
        t.sum_aa += p.sum_aa;
        t.sum_gg += p.sum_gg;
        t.sum_ag += p.sum_ag;
        t.sum_b += p.sum_b;
        t.sum_bb += p.sum_bb;
    }

    const double S = static_cast<double>(cfg.trials);
    SimResult res;
    res.trials = cfg.trials;
    res.empirical_error = t.sum_a / S;
    res.single_error = t.sum_g / S;
    res.ratio = res.empirical_error / res.single_error;
    const double var_a = t.sum_aa / S - res.empirical_error * res.empirical_error;
    const double var_g = t.sum_gg / S - res.single_error * res.single_error;
    const double cov_ag = t.sum_ag / S - res.empirical_error * res.single_error;
    // Delta method on the paired (A, A_single) stream.
    const double r = res.ratio;
    const double var_ratio =
        (var_a - 2.0 * r * cov_ag + r * r * var_g) / (S * res.single_error * res.single_error);
    res.std_error = std::sqrt(std::max(0.0, var_ratio));
    res.offset_mean = t.sum_b / S;
    res.offset_mean_se =
        std::sqrt(std::max(0.0, t.sum_bb / S - res.offset_mean * res.offset_mean) / S);
    return res;
}

SweepReport sweep(std::span<const CombinerRule> rules, std::span<const int> n_values,
                  std::int64_t trials, std::uint64_t seed, const MomentTable& table,
                  double slope, double noise_sigma, int threads) {
    if (rules.empty() || n_values.empty())
        throw InvalidInputError("sweep needs at least one rule and one ensemble size");
    SweepReport report;
    report.trials = trials;
    report.seed = seed;
    std::uint64_t entry_index = 0;
    for (const int n : n_values) {
        for (const CombinerRule& rule : rules) {
            ++entry_index;
            try {
                validate_rule(rule, n);
            } catch (const InvalidRuleError&) {
                continue; // rule undefined at this ensemble size
            }
            SimConfig cfg;
            cfg.n_classifiers = n;
            cfg.rule = rule;
            cfg.slope = slope;
            cfg.noise_sigma = noise_sigma;
            cfg.trials = trials;
            cfg.seed = derive_seed(seed, entry_index);
            cfg.threads = threads;
            SweepEntry entry;
            entry.rule = to_string(rule);
            entry.n = n;
            entry.sim = simulate(cfg);
            entry.analytic = reduction_factor(rule, n, table).value;
            entry.z = entry.sim.std_error > 0.0
                          ? (entry.sim.ratio - entry.analytic) / entry.sim.std_error
                          : 0.0;
            report.entries.push_back(entry);
        }
    }
    return report;
}

} // namespace osc
