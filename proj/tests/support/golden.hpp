#pragma once
// Reference moments of standard-Gaussian order statistics, from the classic
// Sarhan & Greenberg (1956) tabulations rounded to three decimals, plus the
// midrange/trimmed-mean reduction factors they imply.

#include <array>

namespace golden {

struct AlphaRef {
    int n, k;
    double value;
};

// Variances alpha(n, k), canonical half (alpha(n, k) = alpha(n, n+1-k)).
inline constexpr std::array<AlphaRef, 30> kAlpha{{
    {1, 1, 1.00},  {2, 1, .682},  {3, 1, .560},  {3, 2, .449},  {4, 1, .492},
    {4, 2, .360},  {5, 1, .448},  {5, 2, .312},  {5, 3, .287},  {6, 1, .416},
    {6, 2, .280},  {6, 3, .246},  {7, 1, .392},  {7, 2, .257},  {7, 3, .220},
    {7, 4, .210},  {8, 1, .373},  {8, 2, .239},  {8, 3, .201},  {8, 4, .187},
    {9, 1, .357},  {9, 2, .226},  {9, 3, .186},  {9, 4, .171},  {9, 5, .166},
    {10, 1, .344}, {10, 2, .215}, {10, 3, .175}, {10, 4, .158}, {10, 5, .151},
}};

struct CovRef {
    int n, k, l;
    double value;
};

// Covariances B(n; k, l), canonical half (k < l, k + l <= n + 1).
inline constexpr std::array<CovRef, 70> kCov{{
    {2, 1, 2, .318},

    {3, 1, 2, .276}, {3, 1, 3, .165},

    {4, 1, 2, .246}, {4, 1, 3, .158}, {4, 1, 4, .105}, {4, 2, 3, .236},

    {5, 1, 2, .224}, {5, 1, 3, .148}, {5, 1, 4, .106}, {5, 1, 5, .074},
    {5, 2, 3, .208}, {5, 2, 4, .150},

    {6, 1, 2, .209}, {6, 1, 3, .139}, {6, 1, 4, .102}, {6, 1, 5, .077},
    {6, 1, 6, .056}, {6, 2, 3, .189}, {6, 2, 4, .140}, {6, 2, 5, .106},
    {6, 3, 4, .183},

    {7, 1, 2, .196}, {7, 1, 3, .132}, {7, 1, 4, .099}, {7, 1, 5, .077},
    {7, 1, 6, .060}, {7, 1, 7, .045}, {7, 2, 3, .175}, {7, 2, 4, .131},
    {7, 2, 5, .102}, {7, 2, 6, .080}, {7, 3, 4, .166}, {7, 3, 5, .130},

    {8, 1, 2, .186}, {8, 1, 3, .126}, {8, 1, 4, .095}, {8, 1, 5, .075},
    {8, 1, 6, .060}, {8, 1, 7, .048}, {8, 1, 8, .037}, {8, 2, 3, .163},
    {8, 2, 4, .123}, {8, 2, 5, .098}, {8, 2, 6, .079}, {8, 2, 7, .063},
    {8, 3, 4, .152}, {8, 3, 5, .121}, {8, 3, 6, .098}, {8, 4, 5, .149},

    {9, 1, 2, .178}, {9, 1, 3, .121}, {9, 1, 4, .091}, {9, 1, 5, .073},
    {9, 1, 6, .059}, {9, 1, 7, .049}, {9, 1, 8, .040}, {9, 1, 9, .031},
    {9, 2, 3, .154}, {9, 2, 4, .117}, {9, 2, 5, .093}, {9, 2, 6, .077},
    {9, 2, 7, .063}, {9, 2, 8, .052}, {9, 3, 4, .142}, {9, 3, 5, .114},
    {9, 3, 6, .093}, {9, 3, 7, .077}, {9, 4, 5, .137}, {9, 4, 6, .113},
}};

// Midrange-combiner reduction factors (alpha(n,1) + B(n,1,n)) / 2 for
// n = 2..10, derived from the tables above.
inline constexpr std::array<double, 9> kSpread{
    .500, .362, .299, .261, .236, .219, .205, .194, .186,
};

// Trimmed-mean reduction factors for the window (2, n-1), n = 3..9.
inline constexpr std::array<double, 7> kTrim2N1{
    .449, .298, .227, .184, .155, .134, .113,
};

} // namespace golden
