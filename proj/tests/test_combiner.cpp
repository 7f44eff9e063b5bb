#include <doctest.h>

#include <cmath>

#include "oscombine/combiner.hpp"
#include "oscombine/rng.hpp"

using namespace osc;

namespace {

PosteriorMatrix mat(const std::vector<std::vector<double>>& rows) {
    return PosteriorMatrix::from_rows(rows);
}

PosteriorMatrix random_matrix(RandomStream& rng, int n, int l) {
    PosteriorMatrix m(n, l);
    for (double& v : m.values) v = 2.0 * rng.uniform01() - 0.5;
    return m;
}

} // namespace

TEST_CASE("rule text forms parse and serialize") {
    CHECK(parse_rule("ave") == CombinerRule::average());
    CHECK(parse_rule("MAX") == CombinerRule::maximum());
    CHECK(parse_rule("Min") == CombinerRule::minimum());
    CHECK(parse_rule("med") == CombinerRule::median());
    CHECK(parse_rule("spread") == CombinerRule::spread());
    CHECK(parse_rule("os:3") == CombinerRule::kth_os(3));
    CHECK(parse_rule("trim:2:7") == CombinerRule::trim(2, 7));
    CHECK(to_string(CombinerRule::trim(2, 7)) == "trim:2:7");
    CHECK(to_string(CombinerRule::kth_os(1)) == "os:1");
    CHECK(to_string(parse_rule("SPREAD")) == "spread");

    CHECK_THROWS_AS(parse_rule("bogus"), InvalidRuleError);
    CHECK_THROWS_AS(parse_rule("os:0"), InvalidRuleError);
    CHECK_THROWS_AS(parse_rule("trim:3:2"), InvalidRuleError);
    CHECK_THROWS_AS(parse_rule("trim:4"), InvalidRuleError);
    CHECK_THROWS_AS(parse_rule("os:x"), InvalidRuleError);
}

TEST_CASE("combine matches the worked examples") {
    const auto m2 = mat({{0.2, 0.8}, {0.6, 0.4}});

    // max per column
    auto r = combine(m2, CombinerRule::kth_os(2));
    CHECK(r.values[0] == doctest::Approx(0.6));
    CHECK(r.values[1] == doctest::Approx(0.8));

    // midrange per column
    const auto m3 = mat({{0.1, 0.9}, {0.5, 0.5}, {0.3, 0.7}});
    r = combine(m3, CombinerRule::spread());
    CHECK(r.values[0] == doctest::Approx(0.3));
    CHECK(r.values[1] == doctest::Approx(0.7));

    // even-N median averages the two middle ranks
    r = combine(m2, CombinerRule::median());
    CHECK(r.values[0] == doctest::Approx(0.4));
    CHECK(r.values[1] == doctest::Approx(0.6));

    // full-range trim is the mean
    const auto ave = combine(m3, CombinerRule::average());
    const auto trim_full = combine(m3, CombinerRule::trim(1, 3));
    CHECK(ave.values == trim_full.values);
}

TEST_CASE("decide picks the argmax with lowest-index ties") {
    CHECK(decide({{0.3, 0.7}, CombinerRule::average()}).class_index == 1);
    CHECK(decide({{0.5, 0.5}, CombinerRule::average()}).class_index == 0);
    CHECK(decide({{0.6, 0.8}, CombinerRule::kth_os(2)}).class_index == 1);
    CHECK_THROWS_AS(decide({{}, CombinerRule::average()}), InvalidInputError);
}

TEST_CASE("invalid rules and inputs are rejected") {
    const auto m = mat({{0.2, 0.8}, {0.6, 0.4}});
    CHECK_THROWS_AS(combine(m, CombinerRule::kth_os(3)), InvalidRuleError);
    CHECK_THROWS_AS(combine(m, CombinerRule::trim(1, 3)), InvalidRuleError);
    CHECK_THROWS_AS(combine(m, CombinerRule::trim(0, 2)), InvalidRuleError);

    auto bad = m;
    bad.at(1, 0) = std::nan("");
    CHECK_THROWS_AS(combine(bad, CombinerRule::average()), InvalidInputError);
    bad.at(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(combine(bad, CombinerRule::average()), InvalidInputError);

    PosteriorMatrix one_class(2, 1);
    CHECK_THROWS_AS(combine(one_class, CombinerRule::average()), InvalidInputError);
}

TEST_CASE("combiner algebra on randomized matrices") {
    RandomStream rng(20240810);
    for (int it = 0; it < 2000; ++it) {
        const int n = 1 + static_cast<int>(rng.next_below(8));
        const int l = 2 + static_cast<int>(rng.next_below(4));
        const auto m = random_matrix(rng, n, l);

        std::vector<CombinerRule> rules{CombinerRule::average(), CombinerRule::minimum(),
                                        CombinerRule::maximum(), CombinerRule::median(),
                                        CombinerRule::spread()};
        const int k = 1 + static_cast<int>(rng.next_below(n));
        rules.push_back(CombinerRule::kth_os(k));
        const int lo = 1 + static_cast<int>(rng.next_below(n));
        const int hi = lo + static_cast<int>(rng.next_below(n - lo + 1));
        rules.push_back(CombinerRule::trim(lo, hi));

        // row permutation leaves every rule bit-identical
        auto permuted = m;
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < l; ++c) permuted.at(r, c) = m.at(perm[r], c);

        for (const auto& rule : rules) {
            const auto out = combine(m, rule);
            CHECK(combine(permuted, rule).values == out.values);
            for (int c = 0; c < l; ++c) {
                double cmin = m.at(0, c), cmax = m.at(0, c);
                for (int r = 1; r < n; ++r) {
                    cmin = std::min(cmin, m.at(r, c));
                    cmax = std::max(cmax, m.at(r, c));
                }
                CHECK(out.values[c] >= cmin);
                CHECK(out.values[c] <= cmax);
            }
        }

        // trim(1, N) == average, trim(k, k) == k-th order statistic
        CHECK(combine(m, CombinerRule::trim(1, n)).values ==
              combine(m, CombinerRule::average()).values);
        CHECK(combine(m, CombinerRule::trim(k, k)).values ==
              combine(m, CombinerRule::kth_os(k)).values);
    }
}

TEST_CASE("degenerate ensemble returns the row exactly") {
    RandomStream rng(7);
    for (int it = 0; it < 200; ++it) {
        const int n = 1 + static_cast<int>(rng.next_below(9));
        std::vector<double> row{rng.uniform01() * 3.0 - 1.0, rng.uniform01(), rng.uniform01()};
        PosteriorMatrix m(n, 3);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < 3; ++c) m.at(r, c) = row[c];
        for (const auto& rule :
             {CombinerRule::average(), CombinerRule::median(), CombinerRule::spread(),
              CombinerRule::trim(1, n), CombinerRule::kth_os(1 + static_cast<int>(rng.next_below(n)))})
            CHECK(combine(m, rule).values == row);
    }
}

TEST_CASE("spread, average and median coincide for two classifiers") {
    RandomStream rng(99);
    for (int it = 0; it < 500; ++it) {
        PosteriorMatrix m(2, 2);
        for (double& v : m.values) v = rng.uniform01();
        const auto ave = combine(m, CombinerRule::average()).values;
        CHECK(combine(m, CombinerRule::spread()).values == ave);
        CHECK(combine(m, CombinerRule::median()).values == ave);
    }
}

TEST_CASE("raising one entry never lowers that class's combined value") {
    RandomStream rng(4242);
    const std::vector<CombinerRule> rules{CombinerRule::average(), CombinerRule::minimum(),
                                          CombinerRule::maximum(), CombinerRule::median(),
                                          CombinerRule::spread(), CombinerRule::trim(2, 3)};
    for (int it = 0; it < 1000; ++it) {
        const int n = 4;
        PosteriorMatrix m(n, 2);
        for (double& v : m.values) v = rng.uniform01();
        auto bumped = m;
        const int r = static_cast<int>(rng.next_below(n));
        bumped.at(r, 0) += rng.uniform01();
        for (const auto& rule : rules) {
            const double before = combine(m, rule).values[0];
            const double after = combine(bumped, rule).values[0];
            CHECK(after >= before - 1e-12);
        }
    }
}
