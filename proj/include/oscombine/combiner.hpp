#pragma once
// Order-statistic combining rules over per-class classifier outputs.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oscombine/errors.hpp"

namespace osc {

enum class RuleKind { average, minimum, maximum, kth_os, median, spread, trim };

/// One combining rule. Ranks are 1-indexed; `minimum` and `maximum` are the
/// rank-1 and rank-N order statistics for whatever ensemble size they meet.
struct CombinerRule {
    RuleKind kind = RuleKind::average;
    int rank = 0;    // kth_os only
    int trim_lo = 0; // trim only
    int trim_hi = 0; // trim only

    static CombinerRule average() { return {RuleKind::average, 0, 0, 0}; }
    static CombinerRule minimum() { return {RuleKind::minimum, 0, 0, 0}; }
    static CombinerRule maximum() { return {RuleKind::maximum, 0, 0, 0}; }
    static CombinerRule kth_os(int k) { return {RuleKind::kth_os, k, 0, 0}; }
    static CombinerRule median() { return {RuleKind::median, 0, 0, 0}; }
    static CombinerRule spread() { return {RuleKind::spread, 0, 0, 0}; }
    static CombinerRule trim(int lo, int hi) { return {RuleKind::trim, 0, lo, hi}; }

    friend bool operator==(const CombinerRule&, const CombinerRule&) = default;
};

/// Parses the canonical text form: ave|max|min|med|spread|os:K|trim:N1:N2.
/// Case-insensitive. Throws InvalidRuleError on anything else.
CombinerRule parse_rule(std::string_view text);

/// Lowercase canonical text form of a rule.
std::string to_string(const CombinerRule& rule);

/// Throws InvalidRuleError unless the rule's ranks fit an ensemble of size n.
void validate_rule(const CombinerRule& rule, int n_classifiers);

/// N classifiers x L classes of posterior estimates for one input pattern.
/// Entries must be finite but need not lie in [0,1] or sum to one.
struct PosteriorMatrix {
    int n_classifiers = 0;
    int n_classes = 0;
    std::vector<double> values; // row-major [classifier][class]

    PosteriorMatrix() = default;
    PosteriorMatrix(int n, int l)
        : n_classifiers(n), n_classes(l),
          values(static_cast<std::size_t>(n) * static_cast<std::size_t>(l), 0.0) {}

    static PosteriorMatrix from_rows(const std::vector<std::vector<double>>& rows);

    double& at(int m, int c) {
        return values[static_cast<std::size_t>(m) * n_classes + c];
    }
    double at(int m, int c) const {
        return values[static_cast<std::size_t>(m) * n_classes + c];
    }
};

struct CombinedPosterior {
    std::vector<double> values;
    CombinerRule rule;
};

struct ClassDecision {
    int class_index = 0;
    CombinedPosterior combined;
};

/// Combines one class column. Sorts `column` in place and returns the rule's
/// output, clamped into [min, max] of the column. Shared kernel between
/// matrix combining and the boundary simulator; the rule must already be
/// valid for column.size().
double combine_column(std::span<double> column, const CombinerRule& rule);

/// Applies `rule` to every class column of `matrix`.
/// Throws InvalidInputError on non-finite entries or degenerate shapes and
/// InvalidRuleError when ranks do not fit the ensemble size.
CombinedPosterior combine(const PosteriorMatrix& matrix, const CombinerRule& rule);

/// Highest combined value wins; exact ties go to the lowest class index.
ClassDecision decide(CombinedPosterior combined);

} // namespace osc
