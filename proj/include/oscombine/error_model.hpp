#pragma once
// Analytic boundary-offset error model for two-class decisions.
//
// A classifier's posterior estimate errs by a per-class bias plus zero-mean
// noise; near the ideal boundary that displaces the realized boundary by an
// offset b with A(b) = b^2 s / 2 extra error to first order. Combining the
// ensemble outputs rescales the offset's moments, and every rule's rescaling
// reduces to sums of Gaussian order-statistic variances (alpha) and
// covariances (B) from the MomentTable.

#include <span>
#include <utility>

#include "oscombine/combiner.hpp"
#include "oscombine/os_moments.hpp"

namespace osc {

/// Two-class boundary model parameters. `slope` is the difference of the two
/// posterior slopes at the ideal boundary and converts posterior error into
/// boundary offset; all bias fields are expressed as boundary offsets.
struct BoundarySpec {
    double slope = 1.0;      // > 0
    double sigma_b = 0.0;    // std dev of a single classifier's boundary offset
    double beta = 0.0;       // mean boundary offset of one classifier
    double sigma_beta = 0.0; // std dev of the bias across classifiers
    double beta_bar = 0.0;   // mean bias across classifiers
};

/// First and second raw moments of the boundary offset.
struct OffsetMoments {
    double m1 = 0.0;
    double m2 = 0.0;
};

/// Model error s * M2 / 2 from offset moments.
double model_error(double slope, const OffsetMoments& moments);

/// Offset moments of a single classifier: (0, sigma_b^2) unbiased,
/// (beta, sigma_b^2 + beta^2) biased.
OffsetMoments single_offset_moments(const BoundarySpec& spec, bool biased);

/// Expected added error of one classifier: s sigma_b^2 / 2, or with bias
/// (s/2)(sigma_b^2 + beta^2).
double single_model_error(const BoundarySpec& spec, bool biased);

struct ReductionFactor {
    double value = 1.0;
    CombinerRule rule;
    int n = 1;
};

/// Unbiased error-reduction factor of `rule` over n i.i.d. Gaussian-noise
/// classifiers: alpha(n,k) for a single order statistic, the two-middle
/// average algebra for an even-N median, (alpha(n,1) + B(n,1,n))/2 for the
/// midrange, the normalized alpha/B window sum for a trimmed mean, and 1/n
/// for plain averaging.
ReductionFactor reduction_factor(const CombinerRule& rule, int n, const MomentTable& table);

/// Biased model error of a single-order-statistic combiner with reduction
/// alpha: (s/2) (alpha (sigma_b^2 + sigma_beta^2) + beta_bar^2).
double os_error_biased(const BoundarySpec& spec, double alpha);

/// Biased model error of the midrange combiner; the reduction factor comes
/// from the table and the surviving bias is `beta_spread`.
double spread_error_biased(const BoundarySpec& spec, const MomentTable& table, int n,
                           double beta_spread);

/// Biased model error of a trimmed mean whose reduction factor is `a_factor`
/// (from reduction_factor on the trim window) with surviving bias `beta_trim`.
double trim_error_biased(const BoundarySpec& spec, double a_factor, double beta_trim);

// Helpers turning per-classifier class-pair biases into the aggregate bias
// statistics the formulas above consume. Each entry holds the two per-class
// posterior biases of one classifier; `slope` converts to offset units.

/// Mean boundary bias beta_bar.
double mean_boundary_bias(std::span<const std::pair<double, double>> biases, double slope);

/// Across-classifier bias spread sigma_beta (population variances per class,
/// summed, over slope^2).
double boundary_bias_sigma(std::span<const std::pair<double, double>> biases, double slope);

/// Surviving bias of the midrange combiner: midrange of each class's biases,
/// differenced, over slope.
double spread_boundary_bias(std::span<const std::pair<double, double>> biases, double slope);

/// Surviving bias of a trimmed mean: trimmed mean of each class's sorted
/// biases over ranks [lo, hi], differenced, over slope.
double trimmed_boundary_bias(std::span<const std::pair<double, double>> biases, double slope,
                             int lo, int hi);

} // namespace osc
