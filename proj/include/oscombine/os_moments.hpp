#pragma once
// Means, variances and covariances of standard-Gaussian order statistics.
//
// Everything is computed from the order-statistic density
//   f_{k:n}(x) = n!/((k-1)!(n-k)!) F(x)^(k-1) (1-F(x))^(n-k) f(x)
// (and its two-rank joint generalization) by adaptive quadrature, with a
// seeded Monte Carlo oracle available as an independent cross-check.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oscombine/errors.hpp"

namespace osc {

/// Identifies one moment: rank k alone (mean/variance of X_{k:n}) or ranks
/// (k, l) with k <= l (covariance of X_{k:n} and X_{l:n}).
struct MomentKey {
    int n = 1;
    int k = 1;
    std::optional<int> l;
};

/// Mean E[X_{k:n}] for the standard Gaussian, |error| <= 1e-6.
double os_mean(int n, int k);

/// Variance Var[X_{k:n}] (the reduction factor alpha), |error| <= 1e-6.
double os_variance(int n, int k);

/// Covariance Cov[X_{k:n}, X_{l:n}] (the reduction factor B) for k <= l,
/// |error| <= 1e-5. k == l returns the variance.
double os_covariance(int n, int k, int l);

/// All Gaussian order-statistic moments for ensemble sizes 1..n_max.
/// Entries are canonicalized to 12 significant digits so that a table built
/// in memory, saved, and reloaded carries bit-identical values.
class MomentTable {
public:
    explicit MomentTable(int n_max);

    int n_max() const { return n_max_; }
    bool covers(int n) const { return n >= 1 && n <= n_max_; }

    double mean(int n, int k) const;
    double alpha(int n, int k) const;
    /// Accepts ranks in either order; k == l returns alpha(n, k).
    double cov(int n, int k, int l) const;

    /// Canonical text form: one `mu|alpha|b n k [l] value` line per entry,
    /// symmetry-deduplicated, 12 significant digits. A positive n_limit
    /// restricts the listing to ensemble sizes <= n_limit.
    std::string to_text(int n_limit = 0) const;
    void save(const std::filesystem::path& path) const;
    static MomentTable from_text(std::string_view text);
    static MomentTable load(const std::filesystem::path& path);

    // Raw writers used by the builder and loader.
    void set_mean(int n, int k, double v);
    void set_alpha(int n, int k, double v);
    void set_cov(int n, int k, int l, double v);

private:
    std::size_t pair_index(int n, int k) const;
    std::size_t triple_index(int n, int k, int l) const;
    void check_covers(int n, int k, int l) const;

    int n_max_;
    std::vector<double> mean_;
    std::vector<double> alpha_;
    std::vector<double> cov_; // strictly k < l
};

/// Builds the full table for 1 <= n_max <= 32 by quadrature. Symmetric
/// counterparts are mirrored from the canonical half. `threads` <= 0 uses
/// the hardware count; keys are independent so scheduling cannot change the
/// result.
MomentTable build_table(int n_max, int threads = 0);

/// One canonical (symmetry-deduplicated) table entry, as printed/cached.
enum class EntryKind { mean, alpha, cov };

struct TableEntry {
    EntryKind kind;
    int n = 0;
    int k = 0;
    int l = 0; // cov only
    double value = 0.0;
};

const char* entry_kind_name(EntryKind kind);

/// The canonical entries of a table in print order (n-major, then
/// mu/alpha/b). A positive n_limit restricts to ensemble sizes <= n_limit.
std::vector<TableEntry> canonical_entries(const MomentTable& table, int n_limit = 0);

enum class McMoment { mean, variance, covariance };

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of one moment from `samples` sorted n-tuples of
/// standard normals. Deterministic for a fixed seed regardless of thread
/// count (fixed-size chunks with derived sub-seeds, merged in order).
McEstimate mc_oracle(const MomentKey& key, McMoment moment, std::int64_t samples,
                     std::uint64_t seed, int threads = 0);

/// Monte Carlo estimates for every moment of one ensemble size from a single
/// sample stream; one pass verifies a whole table row cheaply.
struct McTable {
    int n = 0;
    std::vector<McEstimate> mean;  // index k-1
    std::vector<McEstimate> alpha; // index k-1
    std::vector<McEstimate> cov;   // strictly k < l, row-major triangular

    const McEstimate& cov_at(int k, int l) const;
};

McTable mc_table(int n, std::int64_t samples, std::uint64_t seed, int threads = 0);

/// Rounds to 12 significant digits (the table/cache canonical precision).
double round_table_value(double v);

} // namespace osc
