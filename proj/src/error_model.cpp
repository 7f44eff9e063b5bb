#include "oscombine/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace osc {
namespace {

void check_spec(const BoundarySpec& spec) {
    if (!(spec.slope > 0.0)) throw InvalidInputError("boundary slope must be positive");
    if (spec.sigma_b < 0.0 || spec.sigma_beta < 0.0)
        throw InvalidInputError("standard deviations must be nonnegative");
}

double biased_error(double slope, double factor, double sigma_b, double sigma_beta,
                    double surviving_bias) {
    return 0.5 * slope *
           (factor * (sigma_b * sigma_b + sigma_beta * sigma_beta) +
            surviving_bias * surviving_bias);
}

double column_midrange(std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return 0.5 * (*lo + *hi);
}

double column_trimmed_mean(std::vector<double>& v, int lo, int hi) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (int i = lo - 1; i < hi; ++i) sum += v[i];
    return sum / static_cast<double>(hi - lo + 1);
}

} // namespace

double model_error(double slope, const OffsetMoments& moments) {
    return 0.5 * slope * moments.m2;
}

OffsetMoments single_offset_moments(const BoundarySpec& spec, bool biased) {
    check_spec(spec);
    const double var = spec.sigma_b * spec.sigma_b;
    if (!biased) return {0.0, var};
    return {spec.beta, var + spec.beta * spec.beta};
}

double single_model_error(const BoundarySpec& spec, bool biased) {
    return model_error(spec.slope, single_offset_moments(spec, biased));
}

ReductionFactor reduction_factor(const CombinerRule& rule, int n, const MomentTable& table) {
    if (n < 1) throw InvalidInputError("ensemble size must be >= 1");
    if (!table.covers(n))
        throw TableCoverageError("moment table covers n <= " + std::to_string(table.n_max()) +
                                 ", requested n = " + std::to_string(n));
    validate_rule(rule, n);

    double value = 1.0;
    switch (rule.kind) {
        case RuleKind::average:
            value = 1.0 / n;
            break;
        case RuleKind::minimum:
            value = table.alpha(n, 1);
            break;
        case RuleKind::maximum:
            value = table.alpha(n, n);
            break;
        case RuleKind::kth_os:
            value = table.alpha(n, rule.rank);
            break;
        case RuleKind::median:
            if (n % 2 == 1) {
                value = table.alpha(n, (n + 1) / 2);
            } else {
                // Variance of the two-middle average: (alpha + B) / 2 by the
                // same algebra as the midrange.
                value = 0.5 * (table.alpha(n, n / 2) + table.cov(n, n / 2, n / 2 + 1));
            }
            break;
        case RuleKind::spread:
            value = 0.5 * (table.alpha(n, 1) + table.cov(n, 1, n));
            break;
        case RuleKind::trim: {
            double sum = 0.0;
            for (int m = rule.trim_lo; m <= rule.trim_hi; ++m) {
                sum += table.alpha(n, m);
                for (int l = m + 1; l <= rule.trim_hi; ++l) sum += 2.0 * table.cov(n, m, l);
            }
            const double width = rule.trim_hi - rule.trim_lo + 1;
            value = sum / (width * width);
            break;
        }
    }
    return {value, rule, n};
}

double os_error_biased(const BoundarySpec& spec, double alpha) {
    check_spec(spec);
    if (!(alpha > 0.0) || alpha > 1.0)
        throw InvalidInputError("reduction factor must lie in (0, 1]");
    return biased_error(spec.slope, alpha, spec.sigma_b, spec.sigma_beta, spec.beta_bar);
}

double spread_error_biased(const BoundarySpec& spec, const MomentTable& table, int n,
                           double beta_spread) {
    check_spec(spec);
    const double r = reduction_factor(CombinerRule::spread(), n, table).value;
    return biased_error(spec.slope, r, spec.sigma_b, spec.sigma_beta, beta_spread);
}

double trim_error_biased(const BoundarySpec& spec, double a_factor, double beta_trim) {
    check_spec(spec);
    if (!(a_factor > 0.0) || a_factor > 1.0)
        throw InvalidInputError("reduction factor must lie in (0, 1]");
    return biased_error(spec.slope, a_factor, spec.sigma_b, spec.sigma_beta, beta_trim);
}

double mean_boundary_bias(std::span<const std::pair<double, double>> biases, double slope) {
    if (biases.empty()) throw InvalidInputError("bias list is empty");
    double si = 0.0, sj = 0.0;
    for (const auto& [bi, bj] : biases) {
        si += bi;
        sj += bj;
    }
    const double n = static_cast<double>(biases.size());
    return (si / n - sj / n) / slope;
}

double boundary_bias_sigma(std::span<const std::pair<double, double>> biases, double slope) {
    if (biases.empty()) throw InvalidInputError("bias list is empty");
    const double n = static_cast<double>(biases.size());
    double si = 0.0, sj = 0.0, si2 = 0.0, sj2 = 0.0;
    for (const auto& [bi, bj] : biases) {
        si += bi;
        sj += bj;
        si2 += bi * bi;
        sj2 += bj * bj;
    }
    const double vi = std::max(0.0, si2 / n - (si / n) * (si / n));
    const double vj = std::max(0.0, sj2 / n - (sj / n) * (sj / n));
    return std::sqrt((vi + vj) / (slope * slope));
}

double spread_boundary_bias(std::span<const std::pair<double, double>> biases, double slope) {
    if (biases.empty()) throw InvalidInputError("bias list is empty");
    std::vector<double> ci, cj;
    ci.reserve(biases.size());
    cj.reserve(biases.size());
    for (const auto& [bi, bj] : biases) {
        ci.push_back(bi);
        cj.push_back(bj);
    }
    return (column_midrange(ci) - column_midrange(cj)) / slope;
}

double trimmed_boundary_bias(std::span<const std::pair<double, double>> biases, double slope,
                             int lo, int hi) {
    if (biases.empty()) throw InvalidInputError("bias list is empty");
    const int n = static_cast<int>(biases.size());
    if (lo < 1 || lo > hi || hi > n)
        throw InvalidRuleError("trim window out of range for bias list");
    std::vector<double> ci, cj;
    ci.reserve(biases.size());
    cj.reserve(biases.size());
    for (const auto& [bi, bj] : biases) {
        ci.push_back(bi);
        cj.push_back(bj);
    }
    return (column_trimmed_mean(ci, lo, hi) - column_trimmed_mean(cj, lo, hi)) / slope;
}

} // namespace osc
