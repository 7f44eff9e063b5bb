#include "oscombine/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "oscombine/rng.hpp"

namespace osc {
namespace {

constexpr std::uint64_t kSplitStream = 0x73706c74; // distinct from model streams

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double ci95_halfwidth(std::span<const double> v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (const double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
    return 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
}

int decide_class(const PosteriorMatrix& matrix, const CombinerRule& rule) {
    return decide(combine(matrix, rule)).class_index;
}

double rule_error_pct(const std::vector<PosteriorMatrix>& posteriors,
                      std::span<const int> labels, const CombinerRule& rule) {
    int wrong = 0;
    for (std::size_t p = 0; p < posteriors.size(); ++p)
        if (decide_class(posteriors[p], rule) != labels[p]) ++wrong;
    return 100.0 * wrong / static_cast<double>(posteriors.size());
}

} // namespace

BenchRule parse_bench_rule(std::string_view text) {
    std::string t(text);
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "trim:auto") return {"trim:auto", CombinerRule{}, true};
    const CombinerRule rule = parse_rule(t);
    return {to_string(rule), rule, false};
}

std::pair<int, int> select_trim_cut(const std::vector<PosteriorMatrix>& posteriors,
                                    std::span<const int> labels) {
    if (posteriors.empty() || posteriors.size() != labels.size())
        throw InvalidInputError("trim cut selection needs matching posteriors and labels");
    const int n = posteriors.front().n_classifiers;
    if (n < 2) throw InvalidInputError("trim cut selection needs an ensemble of size >= 2");

    int best_lo = 1, best_hi = n;
    double best_err = std::numeric_limits<double>::infinity();
    for (int lo = 1; lo <= n; ++lo)
        for (int hi = lo; hi <= n; ++hi) {
            const double err = rule_error_pct(posteriors, labels, CombinerRule::trim(lo, hi));
            const bool better =
                err < best_err ||
                (err == best_err && (hi - lo > best_hi - best_lo ||
                                     (hi - lo == best_hi - best_lo && lo < best_lo)));
            if (better) {
                best_err = err;
                best_lo = lo;
                best_hi = hi;
            }
        }
    return {best_lo, best_hi};
}

namespace {

std::vector<PosteriorMatrix> ensemble_posteriors(const std::vector<Mlp>& ensemble,
                                                 const Dataset& data) {
    std::vector<PosteriorMatrix> out;
    out.reserve(data.patterns());
    const int n = static_cast<int>(ensemble.size());
    for (int p = 0; p < data.patterns(); ++p) {
        PosteriorMatrix m(n, data.n_classes);
        for (int i = 0; i < n; ++i) {
            const auto post = ensemble[i].predict_posteriors(data.row(p));
            for (int c = 0; c < data.n_classes; ++c) m.at(i, c) = post[c];
        }
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace

std::pair<int, int> select_trim_cut(const std::vector<Mlp>& ensemble, const Dataset& validation) {
    if (ensemble.size() < 2) throw InvalidInputError("trim cut selection needs >= 2 models");
    if (validation.patterns() == 0) throw InvalidInputError("empty validation set");
    const auto posteriors = ensemble_posteriors(ensemble, validation);
    return select_trim_cut(posteriors, validation.labels);
}

EvalReport evaluate(const BenchConfig& cfg) {
    if (cfg.runs < 2) throw InvalidInputError("need at least 2 runs for a confidence interval");
    if (cfg.n_classifiers < 1) throw InvalidInputError("need at least one classifier");
    if (cfg.rules.empty()) throw InvalidInputError("no combining rules requested");
    for (const BenchRule& r : cfg.rules) {
        if (r.trim_auto && cfg.n_classifiers < 2)
            throw InvalidInputError("trim:auto needs an ensemble of size >= 2");
        if (!r.trim_auto) validate_rule(r.rule, cfg.n_classifiers);
    }

    const Dataset data = load_dataset(cfg.data);
    const int n = cfg.n_classifiers;
    const int n_rules = static_cast<int>(cfg.rules.size());

    std::vector<std::vector<double>> rule_errors(n_rules);
    std::vector<double> single_errors;
    std::map<std::pair<int, int>, int> window_counts;
    std::vector<std::pair<int, int>> run_windows;

    for (int run = 0; run < cfg.runs; ++run) {
        SplitSpec split_spec = cfg.split;
        split_spec.seed =
            derive_seed(cfg.mlp.seed, kSplitStream, cfg.fix_split ? 0 : static_cast<std::uint64_t>(run));
        const Split parts = split(data, split_spec);

        std::vector<Mlp> ensemble;
        ensemble.reserve(n);
        for (int m = 1; m <= n; ++m) {
            MlpConfig mc = cfg.mlp;
            mc.seed = derive_seed(cfg.mlp.seed, static_cast<std::uint64_t>(run + 1),
                                  static_cast<std::uint64_t>(m));
            // Variability regime: the last floor(N/2) members by index get
            // half the fine-tuned stopping epoch.
            mc.early_stop_fraction = (cfg.variability && m > (n + 1) / 2) ? 0.5 : 1.0;
            ensemble.push_back(Mlp::train(parts.train, parts.validation, mc));
        }

        std::optional<std::pair<int, int>> run_window;
        for (const BenchRule& r : cfg.rules)
            if (r.trim_auto && !run_window) {
                run_window = select_trim_cut(ensemble, parts.validation);
                window_counts[*run_window] += 1;
                run_windows.push_back(*run_window);
            }

        const auto test_posteriors = ensemble_posteriors(ensemble, parts.test);
        for (int ri = 0; ri < n_rules; ++ri) {
            const BenchRule& r = cfg.rules[ri];
            const CombinerRule rule =
                r.trim_auto ? CombinerRule::trim(run_window->first, run_window->second) : r.rule;
            rule_errors[ri].push_back(rule_error_pct(test_posteriors, parts.test.labels, rule));
        }

        double single_sum = 0.0;
        for (const Mlp& model : ensemble) single_sum += 100.0 * model.error_rate(parts.test);
        single_errors.push_back(single_sum / n);
    }

    EvalReport report;
    report.runs = cfg.runs;
    for (int ri = 0; ri < n_rules; ++ri) {
        RuleStats stats;
        stats.rule = cfg.rules[ri].text;
        stats.mean_error_pct = mean_of(rule_errors[ri]);
        stats.ci95_halfwidth = ci95_halfwidth(rule_errors[ri]);
        if (cfg.rules[ri].trim_auto && !window_counts.empty()) {
            // Modal window; ties resolve to the lexicographically smallest.
            auto best = window_counts.begin();
            for (auto it = window_counts.begin(); it != window_counts.end(); ++it)
                if (it->second > best->second) best = it;
            stats.window = best->first;
            report.chosen_trim = best->first;
        }
        report.per_rule.push_back(std::move(stats));
    }
    report.per_classifier.rule = "single";
    report.per_classifier.mean_error_pct = mean_of(single_errors);
    report.per_classifier.ci95_halfwidth = ci95_halfwidth(single_errors);
    return report;
}

} // namespace osc
