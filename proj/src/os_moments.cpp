#include "oscombine/os_moments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "oscombine/gaussian.hpp"
#include "oscombine/parallel.hpp"
#include "oscombine/quadrature.hpp"
#include "oscombine/rng.hpp"

namespace osc {
namespace {

// Gaussian mass outside [-12, 12] is below 1e-31; the densities here are
// polynomial in the CDF, so nothing survives past that.
constexpr double kDomain = 12.0;
constexpr double kTol1D = 1e-9;
constexpr double kTolOuter = 1e-9;
constexpr double kTolInner = 1e-12;

void check_rank(int n, int k) {
    if (n < 1 || k < 1 || k > n)
        throw InvalidInputError("order statistic rank (" + std::to_string(k) + ":" +
                                std::to_string(n) + ") out of range");
}

double log_choose_coef(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

// f_{k:n}(x) without the combinatorial constant.
double os_density_shape(int n, int k, double x) {
    const double cdf = normal_cdf(x);
    const double sf = normal_sf(x);
    const double a = (k > 1) ? std::pow(cdf, k - 1) : 1.0;
    const double b = (n > k) ? std::pow(sf, n - k) : 1.0;
    return a * b * normal_pdf(x);
}

double os_moment_integral(int n, int k, int power) {
    const double coef = std::exp(log_choose_coef(n, k));
    auto f = [=](double x) {
        const double xp = (power == 1) ? x : x * x;
        return coef * xp * os_density_shape(n, k, x);
    };
    return adaptive_quadrature(f, -kDomain, kDomain, kTol1D).value;
}

// E[X_{k:n} X_{l:n}] for k < l via the joint density
//   C F(x)^(k-1) (F(y)-F(x))^(l-k-1) (1-F(y))^(n-l) f(x) f(y),  x <= y,
// integrated as an iterated adaptive quadrature with all constants folded in
// so the tolerances are absolute in final units.
double os_cross_moment(int n, int k, int l) {
    const double log_coef = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k)) -
                            std::lgamma(static_cast<double>(l - k)) -
                            std::lgamma(static_cast<double>(n - l + 1));
    const double coef = std::exp(log_coef);
    auto outer = [=](double x) {
        const double wx = coef * ((k > 1) ? std::pow(normal_cdf(x), k - 1) : 1.0) * normal_pdf(x);
        if (wx == 0.0) return 0.0;
        auto inner = [=](double y) {
            const double mid = normal_cdf_diff(x, y);
            const double wm = (l - k > 1) ? std::pow(mid, l - k - 1) : 1.0;
            const double wq = (n > l) ? std::pow(normal_sf(y), n - l) : 1.0;
            return wx * x * y * wm * wq * normal_pdf(y);
        };
        return adaptive_quadrature(inner, x, kDomain, kTolInner, 2000).value;
    };
    return adaptive_quadrature(outer, -kDomain, kDomain, kTolOuter).value;
}

} // namespace

double os_mean(int n, int k) {
    check_rank(n, k);
    return os_moment_integral(n, k, 1);
}

double os_variance(int n, int k) {
    check_rank(n, k);
    const double m1 = os_moment_integral(n, k, 1);
    const double m2 = os_moment_integral(n, k, 2);
    return m2 - m1 * m1;
}

double os_covariance(int n, int k, int l) {
    check_rank(n, k);
    if (l < k || l > n)
        throw InvalidInputError("covariance ranks need k <= l <= n, got (" + std::to_string(k) +
                                "," + std::to_string(l) + ":" + std::to_string(n) + ")");
    if (k == l) return os_variance(n, k);
    return os_cross_moment(n, k, l) - os_mean(n, k) * os_mean(n, l);
}

double round_table_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------------------
// MomentTable storage. mean/alpha are triangular over (n, k); covariances are
// triangular over (n, k < l). Symmetric counterparts are stored explicitly so
// lookups stay trivial.

MomentTable::MomentTable(int n_max) : n_max_(n_max) {
    if (n_max < 1 || n_max > 32)
        throw InvalidInputError("moment table size must be in [1, 32]");
    const std::size_t pairs = static_cast<std::size_t>(n_max) * (n_max + 1) / 2;
    mean_.assign(pairs, 0.0);
    alpha_.assign(pairs, 0.0);
    const std::size_t triples =
        static_cast<std::size_t>(n_max + 1) * n_max * (n_max - 1) / 6;
    cov_.assign(triples, 0.0);
}

std::size_t MomentTable::pair_index(int n, int k) const {
    return static_cast<std::size_t>(n) * (n - 1) / 2 + (k - 1);
}

std::size_t MomentTable::triple_index(int n, int k, int l) const {
    // base: sum of m(m-1)/2 for m < n, i.e. C(n, 3)
    const std::size_t base = static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 6;
    return base + static_cast<std::size_t>(k - 1) * (2 * n - k) / 2 + (l - k - 1);
}

void MomentTable::check_covers(int n, int k, int l) const {
    if (n < 1 || n > n_max_)
        throw TableCoverageError("moment table covers n <= " + std::to_string(n_max_) +
                                 ", requested n = " + std::to_string(n));
    if (k < 1 || k > n || l < 1 || l > n)
        throw TableCoverageError("rank out of range for n = " + std::to_string(n));
}

double MomentTable::mean(int n, int k) const {
    check_covers(n, k, 1);
    return mean_[pair_index(n, k)];
}

double MomentTable::alpha(int n, int k) const {
    check_covers(n, k, 1);
    return alpha_[pair_index(n, k)];
}

double MomentTable::cov(int n, int k, int l) const {
    check_covers(n, k, l);
    if (k == l) return alpha_[pair_index(n, k)];
    if (k > l) std::swap(k, l);
    return cov_[triple_index(n, k, l)];
}

void MomentTable::set_mean(int n, int k, double v) { mean_[pair_index(n, k)] = v; }
void MomentTable::set_alpha(int n, int k, double v) { alpha_[pair_index(n, k)] = v; }
void MomentTable::set_cov(int n, int k, int l, double v) { cov_[triple_index(n, k, l)] = v; }

namespace {

// Canonical (symmetry-deduplicated) entries, matching the printed form:
//   mu:    2k < n+1 (the self-symmetric middle is identically zero)
//   alpha: 2k <= n+1
//   b:     k < l and k + l <= n+1
bool canonical_mu(int n, int k) { return 2 * k < n + 1; }
bool canonical_alpha(int n, int k) { return 2 * k <= n + 1; }
bool canonical_cov(int n, int k, int l) { return k < l && k + l <= n + 1; }

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

const char* entry_kind_name(EntryKind kind) {
    switch (kind) {
        case EntryKind::mean: return "mu";
        case EntryKind::alpha: return "alpha";
        case EntryKind::cov: return "b";
    }
    return "?";
}

std::vector<TableEntry> canonical_entries(const MomentTable& table, int n_limit) {
    const int top = (n_limit > 0 && n_limit < table.n_max()) ? n_limit : table.n_max();
    std::vector<TableEntry> out;
    for (int n = 1; n <= top; ++n) {
        for (int k = 1; k <= n; ++k)
            if (canonical_mu(n, k))
                out.push_back({EntryKind::mean, n, k, 0, table.mean(n, k)});
        for (int k = 1; k <= n; ++k)
            if (canonical_alpha(n, k))
                out.push_back({EntryKind::alpha, n, k, 0, table.alpha(n, k)});
        for (int k = 1; k <= n; ++k)
            for (int l = k + 1; l <= n; ++l)
                if (canonical_cov(n, k, l))
                    out.push_back({EntryKind::cov, n, k, l, table.cov(n, k, l)});
    }
    return out;
}

std::string MomentTable::to_text(int n_limit) const {
    std::string out;
    for (const TableEntry& e : canonical_entries(*this, n_limit)) {
        out += entry_kind_name(e.kind);
        out += ' ' + std::to_string(e.n) + ' ' + std::to_string(e.k);
        if (e.kind == EntryKind::cov) out += ' ' + std::to_string(e.l);
        out += ' ' + format_value(e.value) + '\n';
    }
    return out;
}

void MomentTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write moment table to " + path.string());
    out << to_text();
}

MomentTable MomentTable::from_text(std::string_view text) {
    struct Entry {
        int kind; // 0 mu, 1 alpha, 2 b
        int n, k, l;
    };
    std::map<std::tuple<int, int, int, int>, double> entries;
    int n_max = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') continue;
        int kind_id;
        if (kind == "mu")
            kind_id = 0;
        else if (kind == "alpha")
            kind_id = 1;
        else if (kind == "b")
            kind_id = 2;
        else
            throw ParseError("unknown moment kind '" + kind + "'", lineno);
        int n = 0, k = 0, l = 0;
        double value = 0.0;
        bool ok = static_cast<bool>(ls >> n >> k);
        if (ok && kind_id == 2) ok = static_cast<bool>(ls >> l);
        ok = ok && static_cast<bool>(ls >> value);
        std::string trailing;
        if (!ok || (ls >> trailing))
            throw ParseError("malformed moment table line", lineno);
        if (n < 1 || n > 32 || k < 1 || k > n || (kind_id == 2 && (l <= k || l > n)))
            throw ParseError("moment table ranks out of range", lineno);
        entries[{kind_id, n, k, l}] = value;
        n_max = std::max(n_max, n);
    }
    if (n_max == 0) throw ParseError("empty moment table", lineno);

    MomentTable table(n_max);
    auto fetch = [&](int kind, int n, int k, int l) {
        const auto it = entries.find({kind, n, k, l});
        if (it == entries.end())
            throw TableCoverageError("moment table file is missing entries for n = " +
                                     std::to_string(n));
        return it->second;
    };
    for (int n = 1; n <= n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            double mu;
            if (canonical_mu(n, k))
                mu = fetch(0, n, k, 0);
            else if (2 * k == n + 1)
                mu = 0.0;
            else
                mu = -fetch(0, n, n + 1 - k, 0);
            table.set_mean(n, k, mu);
            const int ka = canonical_alpha(n, k) ? k : n + 1 - k;
            table.set_alpha(n, k, fetch(1, n, ka, 0));
        }
        for (int k = 1; k <= n; ++k)
            for (int l = k + 1; l <= n; ++l) {
                const double v = canonical_cov(n, k, l) ? fetch(2, n, k, l)
                                                        : fetch(2, n, n + 1 - l, n + 1 - k);
                table.set_cov(n, k, l, v);
            }
    }
    return table;
}

MomentTable MomentTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot read moment table from " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

// ---------------------------------------------------------------------------
// Table builder.

MomentTable build_table(int n_max, int threads) {
    MomentTable table(n_max);

    struct Job {
        int kind; // 0: mean+alpha, 1: cov
        int n, k, l;
    };
    std::vector<Job> jobs;
    for (int n = 1; n <= n_max; ++n) {
        for (int k = 1; k <= n; ++k)
            if (canonical_alpha(n, k)) jobs.push_back({0, n, k, 0});
        for (int k = 1; k <= n; ++k)
            for (int l = k + 1; l <= n; ++l)
                if (canonical_cov(n, k, l)) jobs.push_back({1, n, k, l});
    }

    struct Result {
        double a = 0.0, b = 0.0;
    };
    std::vector<Result> results(jobs.size());
    for_each_chunk(static_cast<std::int64_t>(jobs.size()), 1, threads,
                   [&](std::int64_t idx, std::int64_t, std::int64_t) {
                       const Job& j = jobs[idx];
                       Result r;
                       if (j.kind == 0) {
                           r.a = (2 * j.k == j.n + 1) ? 0.0 : os_mean(j.n, j.k);
                           r.b = os_variance(j.n, j.k);
                       } else {
                           r.a = os_covariance(j.n, j.k, j.l);
                       }
                       results[idx] = r;
                   });

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& j = jobs[i];
        if (j.kind == 0) {
            const double mu = round_table_value(results[i].a);
            const double a = round_table_value(results[i].b);
            table.set_mean(j.n, j.k, mu);
            table.set_alpha(j.n, j.k, a);
            if (2 * j.k != j.n + 1) {
                table.set_mean(j.n, j.n + 1 - j.k, -mu);
                table.set_alpha(j.n, j.n + 1 - j.k, a);
            }
        } else {
            const double b = round_table_value(results[i].a);
            table.set_cov(j.n, j.k, j.l, b);
            if (j.k + j.l != j.n + 1) table.set_cov(j.n, j.n + 1 - j.l, j.n + 1 - j.k, b);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle.

namespace {

constexpr std::int64_t kMcChunk = 1 << 17;

void check_mc_args(const MomentKey& key, McMoment moment, std::int64_t samples) {
    check_rank(key.n, key.k);
    if (samples < 10000) throw InvalidInputError("mc oracle needs at least 10^4 samples");
    if (moment == McMoment::covariance) {
        if (!key.l) throw InvalidInputError("covariance oracle needs a second rank l");
        if (*key.l < key.k || *key.l > key.n)
            throw InvalidInputError("covariance ranks need k <= l <= n");
    } else if (key.l) {
        throw InvalidInputError("second rank l only applies to covariance queries");
    }
}

void sorted_normals(RandomStream& rng, std::vector<double>& buf) {
    for (double& v : buf) v = rng.gaussian();
    std::sort(buf.begin(), buf.end());
}

} // namespace

McEstimate mc_oracle(const MomentKey& key, McMoment moment, std::int64_t samples,
                     std::uint64_t seed, int threads) {
    check_mc_args(key, moment, samples);
    const int n = key.n;
    const int ki = key.k - 1;
    const int li = key.l ? *key.l - 1 : ki;

    struct Partial {
        double s1x = 0, s2x = 0, s3x = 0, s4x = 0;
        double s1y = 0, s2y = 0, sxy = 0, sxxy = 0, sxyy = 0, sxxyy = 0;
    };
    const std::int64_t n_chunks = (samples + kMcChunk - 1) / kMcChunk;
    std::vector<Partial> partials(n_chunks);

    for_each_chunk(samples, kMcChunk, threads,
                   [&](std::int64_t chunk, std::int64_t, std::int64_t count) {
                       RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(chunk)));
                       std::vector<double> buf(n);
                       Partial p;
                       for (std::int64_t i = 0; i < count; ++i) {
                           sorted_normals(rng, buf);
                           const double x = buf[ki];
                           p.s1x += x;
                           const double xx = x * x;
                           p.s2x += xx;
                           if (moment == McMoment::variance) {
                               p.s3x += xx * x;
                               p.s4x += xx * xx;
                           } else if (moment == McMoment::covariance) {
                               const double y = buf[li];
                               const double yy = y * y;
                               p.s1y += y;
                               p.s2y += yy;
                               p.sxy += x * y;
                               p.sxxy += xx * y;
                               p.sxyy += x * yy;
                               p.sxxyy += xx * yy;
                           }
                       }
                       partials[chunk] = p;
                   });

    Partial t;
    for (const Partial& p : partials) {
        t.s1x += p.s1x;
        t.s2x += p.s2x;
        t.s3x += p.s3x;
        t.s4x += p.s4x;
        t.s1y += p.s1y;
        t.s2y += p.s2y;
        t.sxy += p.sxy;
        t.sxxy += p.sxxy;
        t.sxyy += p.sxyy;
        t.sxxyy += p.sxxyy;
    }

    const double S = static_cast<double>(samples);
    const double mx = t.s1x / S;
    McEstimate est;
    switch (moment) {
        case McMoment::mean: {
            const double var = t.s2x / S - mx * mx;
            est.estimate = mx;
            est.std_error = std::sqrt(std::max(0.0, var) / S);
            break;
        }
        case McMoment::variance: {
            const double v = (t.s2x - S * mx * mx) / (S - 1.0);
            const double m4 =
                t.s4x / S - 4.0 * mx * t.s3x / S + 6.0 * mx * mx * t.s2x / S - 3.0 * mx * mx * mx * mx;
            est.estimate = v;
            est.std_error = std::sqrt(std::max(0.0, m4 - v * v) / S);
            break;
        }
        case McMoment::covariance: {
            const double my = t.s1y / S;
            const double c = (t.sxy - S * mx * my) / (S - 1.0);
            // E[(X-mx)^2 (Y-my)^2] expanded over raw sums.
            const double q = t.sxxyy / S - 2.0 * my * t.sxxy / S - 2.0 * mx * t.sxyy / S +
                             4.0 * mx * my * t.sxy / S + my * my * t.s2x / S +
                             mx * mx * t.s2y / S - 3.0 * mx * mx * my * my;
            est.estimate = c;
            est.std_error = std::sqrt(std::max(0.0, q - c * c) / S);
            break;
        }
    }
    return est;
}

const McEstimate& McTable::cov_at(int k, int l) const {
    const std::size_t idx =
        static_cast<std::size_t>(k - 1) * (2 * n - k) / 2 + (l - k - 1);
    return cov[idx];
}

McTable mc_table(int n, std::int64_t samples, std::uint64_t seed, int threads) {
    check_rank(n, 1);
    if (samples < 10000) throw InvalidInputError("mc table needs at least 10^4 samples");
    const int n_pairs = n * (n - 1) / 2;

    struct Partial {
        std::vector<double> s1, s2, s3, s4;       // per rank
        std::vector<double> sxy, sxxy, sxyy, sxxyy; // per pair k < l
        void init(int ranks, int pairs) {
            s1.assign(ranks, 0.0);
            s2.assign(ranks, 0.0);
            s3.assign(ranks, 0.0);
            s4.assign(ranks, 0.0);
            sxy.assign(pairs, 0.0);
            sxxy.assign(pairs, 0.0);
            sxyy.assign(pairs, 0.0);
            sxxyy.assign(pairs, 0.0);
        }
    };
    const std::int64_t n_chunks = (samples + kMcChunk - 1) / kMcChunk;
    std::vector<Partial> partials(n_chunks);

    for_each_chunk(samples, kMcChunk, threads,
                   [&](std::int64_t chunk, std::int64_t, std::int64_t count) {
                       RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(chunk)));
                       std::vector<double> buf(n);
                       Partial p;
                       p.init(n, n_pairs);
                       for (std::int64_t i = 0; i < count; ++i) {
                           sorted_normals(rng, buf);
                           for (int k = 0; k < n; ++k) {
                               const double x = buf[k];
                               const double xx = x * x;
                               p.s1[k] += x;
                               p.s2[k] += xx;
                               p.s3[k] += xx * x;
                               p.s4[k] += xx * xx;
                           }
                           int idx = 0;
                           for (int k = 0; k < n; ++k) {
                               const double x = buf[k];
                               const double xx = x * x;
                               for (int l = k + 1; l < n; ++l, ++idx) {
                                   const double y = buf[l];
                                   const double yy = y * y;
                                   p.sxy[idx] += x * y;
                                   p.sxxy[idx] += xx * y;
                                   p.sxyy[idx] += x * yy;
                                   p.sxxyy[idx] += xx * yy;
                               }
                           }
                       }
                       partials[chunk] = std::move(p);
                   });

    Partial t;
    t.init(n, n_pairs);
    for (const Partial& p : partials) {
        for (int k = 0; k < n; ++k) {
            t.s1[k] += p.s1[k];
            t.s2[k] += p.s2[k];
            t.s3[k] += p.s3[k];
            t.s4[k] += p.s4[k];
        }
        for (int i = 0; i < n_pairs; ++i) {
            t.sxy[i] += p.sxy[i];
            t.sxxy[i] += p.sxxy[i];
            t.sxyy[i] += p.sxyy[i];
            t.sxxyy[i] += p.sxxyy[i];
        }
    }

    const double S = static_cast<double>(samples);
    McTable out;
    out.n = n;
    out.mean.resize(n);
    out.alpha.resize(n);
    out.cov.resize(n_pairs);
    for (int k = 0; k < n; ++k) {
        const double m = t.s1[k] / S;
        const double var = t.s2[k] / S - m * m;
        out.mean[k] = {m, std::sqrt(std::max(0.0, var) / S)};
        const double v = (t.s2[k] - S * m * m) / (S - 1.0);
        const double m4 =
            t.s4[k] / S - 4.0 * m * t.s3[k] / S + 6.0 * m * m * t.s2[k] / S - 3.0 * m * m * m * m;
        out.alpha[k] = {v, std::sqrt(std::max(0.0, m4 - v * v) / S)};
    }
    int idx = 0;
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l, ++idx) {
            const double mx = t.s1[k] / S;
            const double my = t.s1[l] / S;
            const double c = (t.sxy[idx] - S * mx * my) / (S - 1.0);
            const double q = t.sxxyy[idx] / S - 2.0 * my * t.sxxy[idx] / S -
                             2.0 * mx * t.sxyy[idx] / S + 4.0 * mx * my * t.sxy[idx] / S +
                             my * my * t.s2[k] / S + mx * mx * t.s2[l] / S -
                             3.0 * mx * mx * my * my;
            out.cov[idx] = {c, std::sqrt(std::max(0.0, q - c * c) / S)};
        }
    return out;
}

} // namespace osc
