#include "oscombine/combiner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace osc {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

int parse_rank(std::string_view token, std::string_view whole) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || value < 1)
        throw InvalidRuleError("bad rank in combiner rule '" + std::string(whole) + "'");
    return value;
}

double range_mean(std::span<const double> sorted, int lo, int hi) {
    // Summing in sorted order keeps the result independent of the original
    // row order, ties included.
    double sum = 0.0;
    for (int i = lo - 1; i < hi; ++i) sum += sorted[i];
    return sum / static_cast<double>(hi - lo + 1);
}

} // namespace

CombinerRule parse_rule(std::string_view text) {
    const std::string t = lower(text);
    if (t == "ave") return CombinerRule::average();
    if (t == "max") return CombinerRule::maximum();
    if (t == "min") return CombinerRule::minimum();
    if (t == "med") return CombinerRule::median();
    if (t == "spread") return CombinerRule::spread();
    if (t.rfind("os:", 0) == 0) return CombinerRule::kth_os(parse_rank(t.substr(3), text));
    if (t.rfind("trim:", 0) == 0) {
        const std::string_view rest = std::string_view(t).substr(5);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos)
            throw InvalidRuleError("trim rule needs two ranks: '" + std::string(text) + "'");
        const int lo = parse_rank(rest.substr(0, colon), text);
        const int hi = parse_rank(rest.substr(colon + 1), text);
        if (lo > hi)
            throw InvalidRuleError("trim ranks must satisfy N1 <= N2: '" + std::string(text) + "'");
        return CombinerRule::trim(lo, hi);
    }
    throw InvalidRuleError("unknown combiner rule '" + std::string(text) + "'");
}

std::string to_string(const CombinerRule& rule) {
    switch (rule.kind) {
        case RuleKind::average: return "ave";
        case RuleKind::minimum: return "min";
        case RuleKind::maximum: return "max";
        case RuleKind::median: return "med";
        case RuleKind::spread: return "spread";
        case RuleKind::kth_os: return "os:" + std::to_string(rule.rank);
        case RuleKind::trim:
            return "trim:" + std::to_string(rule.trim_lo) + ":" + std::to_string(rule.trim_hi);
    }
    return "?";
}

void validate_rule(const CombinerRule& rule, int n_classifiers) {
    if (n_classifiers < 1) throw InvalidInputError("ensemble size must be >= 1");
    switch (rule.kind) {
        case RuleKind::kth_os:
            if (rule.rank < 1 || rule.rank > n_classifiers)
                throw InvalidRuleError("rank " + std::to_string(rule.rank) +
                                       " out of range for N=" + std::to_string(n_classifiers));
            break;
        case RuleKind::trim:
            if (rule.trim_lo < 1 || rule.trim_lo > rule.trim_hi || rule.trim_hi > n_classifiers)
                throw InvalidRuleError("trim window " + std::to_string(rule.trim_lo) + ":" +
                                       std::to_string(rule.trim_hi) + " out of range for N=" +
                                       std::to_string(n_classifiers));
            break;
        default:
            break;
    }
}

PosteriorMatrix PosteriorMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidInputError("posterior matrix needs at least one classifier");
    PosteriorMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < m.n_classifiers; ++r) {
        if (static_cast<int>(rows[r].size()) != m.n_classes)
            throw InvalidInputError("ragged posterior matrix");
        for (int c = 0; c < m.n_classes; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

double combine_column(std::span<double> column, const CombinerRule& rule) {
    const int n = static_cast<int>(column.size());
    for (double& v : column) v += 0.0; // fold -0.0 into +0.0 so ranks ignore row order
    std::sort(column.begin(), column.end());
    const double lo = column.front();
    const double hi = column.back();
    double out = 0.0;
    switch (rule.kind) {
        case RuleKind::average: out = range_mean(column, 1, n); break;
        case RuleKind::minimum: out = lo; break;
        case RuleKind::maximum: out = hi; break;
        case RuleKind::kth_os: out = column[rule.rank - 1]; break;
        case RuleKind::median:
            out = (n % 2 == 1) ? column[(n - 1) / 2]
                               : 0.5 * (column[n / 2 - 1] + column[n / 2]);
            break;
        case RuleKind::spread: out = 0.5 * (lo + hi); break;
        case RuleKind::trim: out = range_mean(column, rule.trim_lo, rule.trim_hi); break;
    }
    // The combined value is a mean of order statistics, so mathematically it
    // lies in [lo, hi]; clamp away the last-ulp rounding drift.
    return std::min(std::max(out, lo), hi);
}

CombinedPosterior combine(const PosteriorMatrix& matrix, const CombinerRule& rule) {
    if (matrix.n_classifiers < 1 || matrix.n_classes < 2)
        throw InvalidInputError("posterior matrix must be at least 1 classifier x 2 classes");
    validate_rule(rule, matrix.n_classifiers);
    for (const double v : matrix.values)
        if (!std::isfinite(v)) throw InvalidInputError("non-finite posterior entry");

    CombinedPosterior out;
    out.rule = rule;
    out.values.resize(matrix.n_classes);
    std::vector<double> column(matrix.n_classifiers);
    for (int c = 0; c < matrix.n_classes; ++c) {
        for (int m = 0; m < matrix.n_classifiers; ++m) column[m] = matrix.at(m, c);
        out.values[c] = combine_column(column, rule);
    }
    return out;
}

ClassDecision decide(CombinedPosterior combined) {
    if (combined.values.empty()) throw InvalidInputError("empty combined posterior");
    for (const double v : combined.values)
        if (!std::isfinite(v)) throw InvalidInputError("non-finite combined posterior");
    int best = 0;
    for (int i = 1; i < static_cast<int>(combined.values.size()); ++i)
        if (combined.values[i] > combined.values[best]) best = i;
    return {best, std::move(combined)};
}

} // namespace osc
