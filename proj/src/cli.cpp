#include "oscombine/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscombine/bench.hpp"
#include "oscombine/boundary_sim.hpp"
#include "oscombine/combiner.hpp"
#include "oscombine/error_model.hpp"
#include "oscombine/gaussian.hpp"
#include "oscombine/os_moments.hpp"
#include "oscombine/report.hpp"
#include "oscombine/rng.hpp"

namespace osc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

fs::path default_cache_dir() {
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
        return fs::path(xdg) / "oscombine";
    if (const char* home = std::getenv("HOME"); home && *home)
        return fs::path(home) / ".cache" / "oscombine";
    return fs::temp_directory_path() / "oscombine";
}

std::optional<MomentTable> try_load_table(const fs::path& p, int min_n) {
    if (!fs::exists(p)) return std::nullopt;
    try {
        MomentTable t = MomentTable::load(p);
        if (t.n_max() >= min_n) return t;
    } catch (const std::exception&) {
        // unreadable cache; fall through to a rebuild
    }
    return std::nullopt;
}

/// Finds a cached table covering n (the smallest adequate one), or builds it
/// and persists the result. Values are canonicalized at build time, so cached
/// and freshly built tables are bit-identical.
MomentTable load_or_build_table(int n, const std::optional<fs::path>& override_path, bool quiet,
                                std::ostream& err) {
    if (override_path) {
        if (auto t = try_load_table(*override_path, n)) return *t;
        if (!quiet) err << "building moment table up to n=" << n << "\n";
        MomentTable t = build_table(n);
        try {
            if (override_path->has_parent_path())
                fs::create_directories(override_path->parent_path());
            t.save(*override_path);
        } catch (const std::exception& e) {
            if (!quiet) err << "warning: could not persist moment table: " << e.what() << "\n";
        }
        return t;
    }
    const fs::path dir = default_cache_dir();
    int best = 0;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const std::string name = entry.path().filename().string();
        int k = 0;
        if (std::sscanf(name.c_str(), "moments_n%d.txt", &k) == 1 && k >= n)
            if (best == 0 || k < best) best = k;
    }
    if (best > 0)
        if (auto t = try_load_table(dir / ("moments_n" + std::to_string(best) + ".txt"), n))
            return *t;
    if (!quiet) err << "building moment table up to n=" << n << "\n";
    MomentTable t = build_table(n);
    try {
        fs::create_directories(dir);
        t.save(dir / ("moments_n" + std::to_string(n) + ".txt"));
    } catch (const std::exception& e) {
        if (!quiet) err << "warning: could not persist moment table: " << e.what() << "\n";
    }
    return t;
}

json entry_to_json(const TableEntry& e) {
    json j{{"kind", entry_kind_name(e.kind)}, {"n", e.n}, {"k", e.k}, {"value", e.value}};
    if (e.kind == EntryKind::cov) j["l"] = e.l;
    return j;
}

void maybe_write_report(const std::optional<fs::path>& out_path, ReportEnvelope envelope) {
    if (!out_path) return;
    envelope.timestamp = iso8601_now_utc();
    write_report(*out_path, envelope);
}

// ---------------------------------------------------------------------------

struct MomentsOptions {
    int n_max = 0;
    std::optional<fs::path> cache;
    std::int64_t verify_mc = 0;
    std::uint64_t seed = 0;
    std::optional<fs::path> out_path;
    bool quiet = false;
    int threads = 0;
};

int run_moments(const MomentsOptions& opt, std::ostream& out, std::ostream& err) {
    const MomentTable table = load_or_build_table(opt.n_max, opt.cache, opt.quiet, err);
    const auto entries = canonical_entries(table, opt.n_max);

    json results{{"schema", "moments/1"}, {"n_max", opt.n_max}};
    json jentries = json::array();
    bool consistent = true;

    if (opt.verify_mc > 0) {
        std::vector<McTable> mc(opt.n_max + 1);
        for (int n = 1; n <= opt.n_max; ++n)
            mc[n] = mc_table(n, opt.verify_mc, derive_seed(opt.seed, n), opt.threads);
        for (const TableEntry& e : entries) {
            McEstimate est;
            switch (e.kind) {
                case EntryKind::mean: est = mc[e.n].mean[e.k - 1]; break;
                case EntryKind::alpha: est = mc[e.n].alpha[e.k - 1]; break;
                case EntryKind::cov: est = mc[e.n].cov_at(e.k, e.l); break;
            }
            const double z = est.std_error > 0.0 ? (e.value - est.estimate) / est.std_error : 0.0;
            if (std::fabs(z) > 5.0) consistent = false;
            out << entry_kind_name(e.kind) << ' ' << e.n << ' ' << e.k;
            if (e.kind == EntryKind::cov) out << ' ' << e.l;
            out << ' ' << fmt12(e.value) << " mc " << fmt12(est.estimate) << " se "
                << fmt12(est.std_error) << " z " << fmt12(z) << "\n";
            json je = entry_to_json(e);
            je["mc"] = est.estimate;
            je["mc_se"] = est.std_error;
            je["z"] = z;
            jentries.push_back(std::move(je));
        }
        results["mc_samples"] = opt.verify_mc;
        results["seed"] = opt.seed;
        results["mc_consistent"] = consistent;
    } else {
        out << table.to_text(opt.n_max);
        for (const TableEntry& e : entries) jentries.push_back(entry_to_json(e));
    }
    results["entries"] = std::move(jentries);

    ReportEnvelope envelope;
    envelope.command = "moments";
    envelope.parameters = {{"n_max", opt.n_max},
                           {"cache", opt.cache ? opt.cache->string() : ""},
                           {"verify_mc", opt.verify_mc},
                           {"seed", opt.seed}};
    envelope.results = std::move(results);
    maybe_write_report(opt.out_path, std::move(envelope));

    if (!consistent) {
        err << "moment table disagrees with the Monte Carlo oracle beyond 5 std errors\n";
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ReduceOptions {
    std::string rule_text;
    int n = 0;
    bool biased = false;
    double sigma_b = 0.0;
    double sigma_beta = 0.0;
    double beta_bar = 0.0;
    double slope = 2.0;
    std::optional<fs::path> cache;
    std::optional<fs::path> out_path;
    bool quiet = false;
};

int run_reduce(const ReduceOptions& opt, std::ostream& out, std::ostream& err) {
    const CombinerRule rule = parse_rule(opt.rule_text);
    validate_rule(rule, opt.n);
    const MomentTable table = load_or_build_table(opt.n, opt.cache, opt.quiet, err);
    const ReductionFactor factor = reduction_factor(rule, opt.n, table);

    json results{{"schema", "reduce/1"},
                 {"rule", to_string(rule)},
                 {"n", opt.n},
                 {"factor", factor.value}};
    if (opt.biased) {
        BoundarySpec spec;
        spec.slope = opt.slope;
        spec.sigma_b = opt.sigma_b;
        spec.sigma_beta = opt.sigma_beta;
        spec.beta_bar = opt.beta_bar;
        double model_err = 0.0;
        switch (rule.kind) {
            case RuleKind::spread:
                model_err = spread_error_biased(spec, table, opt.n, opt.beta_bar);
                break;
            case RuleKind::trim:
                model_err = trim_error_biased(spec, factor.value, opt.beta_bar);
                break;
            default:
                model_err = os_error_biased(spec, factor.value);
                break;
        }
        out << "factor=" << fmt12(factor.value) << " model_error=" << fmt12(model_err) << "\n";
        results["model_error"] = model_err;
    } else {
        out << fmt12(factor.value) << "\n";
    }

    ReportEnvelope envelope;
    envelope.command = "reduce";
    envelope.parameters = {{"rule", opt.rule_text}, {"n", opt.n},       {"biased", opt.biased},
                           {"sigma_b", opt.sigma_b}, {"sigma_beta", opt.sigma_beta},
                           {"beta_bar", opt.beta_bar}, {"s", opt.slope}};
    envelope.results = std::move(results);
    maybe_write_report(opt.out_path, std::move(envelope));
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string rule_text;
    int n = 0;
    double sigma = 0.1;
    double slope = 2.0;
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    std::optional<fs::path> bias_file;
    std::optional<fs::path> cache;
    std::optional<fs::path> out_path;
    bool quiet = false;
    int threads = 0;
};

std::vector<std::pair<double, double>> load_bias_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open bias file " + path.string());
    std::vector<std::pair<double, double>> biases;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double bi = 0.0, bj = 0.0;
        std::string trailing;
        if (!(ls >> bi >> bj) || (ls >> trailing))
            throw ParseError("bias file lines must be 'beta_i beta_j'", lineno);
        biases.emplace_back(bi, bj);
    }
    if (biases.empty()) throw InvalidInputError("bias file " + path.string() + " is empty");
    return biases;
}

int run_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    const CombinerRule rule = parse_rule(opt.rule_text);
    validate_rule(rule, opt.n);
    const MomentTable table = load_or_build_table(opt.n, opt.cache, opt.quiet, err);

    SimConfig cfg;
    cfg.n_classifiers = opt.n;
    cfg.rule = rule;
    cfg.slope = opt.slope;
    cfg.noise_sigma = opt.sigma;
    cfg.trials = opt.trials;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    if (opt.bias_file) cfg.biases = load_bias_file(*opt.bias_file);

    const SimResult sim = simulate(cfg);
    const double rho = reduction_factor(rule, opt.n, table).value;

    double analytic = rho;
    if (!cfg.biases.empty()) {
        const double sigma_b = kSqrt2 * opt.sigma / opt.slope;
        BoundarySpec spec;
        spec.slope = opt.slope;
        spec.sigma_b = sigma_b;
        spec.sigma_beta = boundary_bias_sigma(cfg.biases, opt.slope);
        double surviving = 0.0;
        switch (rule.kind) {
            case RuleKind::spread:
                surviving = spread_boundary_bias(cfg.biases, opt.slope);
                break;
            case RuleKind::trim:
                surviving =
                    trimmed_boundary_bias(cfg.biases, opt.slope, rule.trim_lo, rule.trim_hi);
                break;
            default:
                surviving = mean_boundary_bias(cfg.biases, opt.slope);
                break;
        }
        spec.beta_bar = surviving;
        const double combined = os_error_biased(spec, rho);
        const double beta1 = (cfg.biases[0].first - cfg.biases[0].second) / opt.slope;
        const double single =
            0.5 * opt.slope * (sigma_b * sigma_b + beta1 * beta1);
        analytic = combined / single;
    }

    const double z = sim.std_error > 0.0 ? (sim.ratio - analytic) / sim.std_error : 0.0;
    out << "ratio=" << fmt12(sim.ratio) << " se=" << fmt12(sim.std_error)
        << " analytic=" << fmt12(analytic) << " z=" << fmt12(z) << "\n";

    ReportEnvelope envelope;
    envelope.command = "simulate";
    envelope.parameters = {{"rule", opt.rule_text},
                           {"n", opt.n},
                           {"sigma", opt.sigma},
                           {"s", opt.slope},
                           {"trials", opt.trials},
                           {"seed", opt.seed},
                           {"bias_file", opt.bias_file ? opt.bias_file->string() : ""}};
    envelope.results = {{"schema", "simulate/1"},
                        {"rule", to_string(rule)},
                        {"n", opt.n},
                        {"empirical_error", sim.empirical_error},
                        {"single_error", sim.single_error},
                        {"ratio", sim.ratio},
                        {"std_error", sim.std_error},
                        {"offset_mean", sim.offset_mean},
                        {"offset_mean_se", sim.offset_mean_se},
                        {"analytic", analytic},
                        {"z", z}};
    maybe_write_report(opt.out_path, std::move(envelope));

    if (std::fabs(z) > 5.0) {
        err << "empirical ratio deviates from the analytic factor by |z| = " << fmt12(std::fabs(z))
            << " > 5\n";
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchOptions {
    fs::path data;
    int n = 4;
    std::string rules_csv = "ave,max,min,med,spread,trim:auto";
    int runs = 20;
    bool variability = false;
    bool fix_split = false;
    int hidden = 8;
    int epochs = 100;
    double lr = 0.1;
    std::uint64_t seed = 0;
    std::optional<fs::path> out_path;
    bool quiet = false;
};

std::vector<BenchRule> parse_rules_csv(const std::string& csv) {
    std::vector<BenchRule> rules;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string token =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) rules.push_back(parse_bench_rule(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (rules.empty()) throw InvalidRuleError("no combining rules given");
    return rules;
}

int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    BenchConfig cfg;
    cfg.data = opt.data;
    cfg.n_classifiers = opt.n;
    cfg.rules = parse_rules_csv(opt.rules_csv);
    cfg.runs = opt.runs;
    cfg.mlp.hidden_units = opt.hidden;
    cfg.mlp.epochs = opt.epochs;
    cfg.mlp.learning_rate = opt.lr;
    cfg.mlp.seed = opt.seed;
    cfg.variability = opt.variability;
    cfg.fix_split = opt.fix_split;

    if (!opt.quiet)
        err << "bench: " << opt.runs << " runs x " << opt.n << " classifiers on "
            << opt.data.string() << "\n";
    const EvalReport report = evaluate(cfg);

    json jrules = json::array();
    for (const RuleStats& r : report.per_rule) {
        out << "rule " << r.rule << " mean " << fmt12(r.mean_error_pct) << " ci95 "
            << fmt12(r.ci95_halfwidth);
        json jr{{"rule", r.rule},
                {"mean_error_pct", r.mean_error_pct},
                {"ci95_halfwidth", r.ci95_halfwidth}};
        if (r.window) {
            out << " window " << r.window->first << ":" << r.window->second;
            jr["window"] = {r.window->first, r.window->second};
        }
        out << "\n";
        jrules.push_back(std::move(jr));
    }
    out << "single mean " << fmt12(report.per_classifier.mean_error_pct) << " ci95 "
        << fmt12(report.per_classifier.ci95_halfwidth) << "\n";
    out << "runs " << report.runs << "\n";

    ReportEnvelope envelope;
    envelope.command = "bench";
    envelope.parameters = {{"data", opt.data.string()},
                           {"n", opt.n},
                           {"rules", opt.rules_csv},
                           {"runs", opt.runs},
                           {"variability", opt.variability},
                           {"fix_split", opt.fix_split},
                           {"hidden", opt.hidden},
                           {"epochs", opt.epochs},
                           {"lr", opt.lr},
                           {"seed", opt.seed}};
    envelope.results = {{"schema", "bench/1"},
                        {"per_rule", std::move(jrules)},
                        {"single",
                         {{"mean_error_pct", report.per_classifier.mean_error_pct},
                          {"ci95_halfwidth", report.per_classifier.ci95_halfwidth}}},
                        {"runs", report.runs}};
    if (report.chosen_trim)
        envelope.results["chosen_trim"] = {report.chosen_trim->first, report.chosen_trim->second};
    maybe_write_report(opt.out_path, std::move(envelope));
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Order-statistic combiners for classifier ensembles"};
    app.require_subcommand(1);

    MomentsOptions mo;
    ReduceOptions ro;
    SimulateOptions so;
    BenchOptions bo;
    std::string mo_cache, ro_cache, so_cache, so_bias;
    std::string mo_out, ro_out, so_out, bo_out;

    CLI::App* moments = app.add_subcommand("moments", "Print the Gaussian order-statistic moment table");
    moments->add_option("--n-max", mo.n_max, "largest ensemble size")->required()->check(CLI::Range(1, 32));
    moments->add_option("--cache", mo_cache, "moment table cache file");
    moments->add_option("--verify-mc", mo.verify_mc, "cross-check every entry with this many MC samples");
    moments->add_option("--seed", mo.seed, "MC seed");
    moments->add_option("--out", mo_out, "write a JSON report here");
    moments->add_option("--threads", mo.threads, "worker threads (<= 0: hardware)");
    moments->add_flag("--quiet", mo.quiet, "suppress progress notes");

    CLI::App* reduce = app.add_subcommand("reduce", "Analytic error-reduction factor of a combiner");
    reduce->add_option("--rule", ro.rule_text, "ave|max|min|med|spread|os:K|trim:N1:N2")->required();
    reduce->add_option("--n", ro.n, "ensemble size")->required()->check(CLI::Range(1, 32));
    reduce->add_flag("--biased", ro.biased, "also print the biased model error");
    reduce->add_option("--sigma-b", ro.sigma_b, "single-classifier boundary offset std dev");
    reduce->add_option("--sigma-beta", ro.sigma_beta, "bias spread across classifiers");
    reduce->add_option("--beta-bar", ro.beta_bar, "surviving combined bias");
    reduce->add_option("--s", ro.slope, "posterior slope difference at the boundary");
    reduce->add_option("--cache", ro_cache, "moment table cache file");
    reduce->add_option("--out", ro_out, "write a JSON report here");
    reduce->add_flag("--quiet", ro.quiet, "suppress progress notes");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo check of a reduction factor");
    simulate->add_option("--rule", so.rule_text, "ave|max|min|med|spread|os:K|trim:N1:N2")->required();
    simulate->add_option("--n", so.n, "ensemble size")->required()->check(CLI::Range(1, 32));
    simulate->add_option("--sigma", so.sigma, "per-class noise std dev");
    simulate->add_option("--s", so.slope, "posterior slope difference at the boundary");
    simulate->add_option("--trials", so.trials, "Monte Carlo trials (>= 10^4)");
    simulate->add_option("--seed", so.seed, "simulation seed");
    simulate->add_option("--bias-file", so_bias, "per-classifier 'beta_i beta_j' lines");
    simulate->add_option("--cache", so_cache, "moment table cache file");
    simulate->add_option("--out", so_out, "write a JSON report here");
    simulate->add_option("--threads", so.threads, "worker threads (<= 0: hardware)");
    simulate->add_flag("--quiet", so.quiet, "suppress progress notes");

    CLI::App* bench = app.add_subcommand("bench", "MLP ensemble benchmark on a labeled CSV");
    bench->add_option("--data", bo.data, "labeled CSV (last column = integer label)")->required();
    bench->add_option("--n", bo.n, "ensemble size")->required()->check(CLI::Range(1, 64));
    bench->add_option("--rules", bo.rules_csv, "comma-separated rules; trim:auto searches the window");
    bench->add_option("--runs", bo.runs, "independent runs")->check(CLI::Range(2, 10000));
    bench->add_flag("--variability", bo.variability, "under-train the last floor(N/2) members");
    bench->add_flag("--fix-split", bo.fix_split, "reuse one split for every run");
    bench->add_option("--hidden", bo.hidden, "hidden units");
    bench->add_option("--epochs", bo.epochs, "training epochs");
    bench->add_option("--lr", bo.lr, "learning rate");
    bench->add_option("--seed", bo.seed, "master seed");
    bench->add_option("--out", bo_out, "write a JSON report here");
    bench->add_flag("--quiet", bo.quiet, "suppress progress notes");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    auto opt_path = [](const std::string& s) {
        return s.empty() ? std::optional<fs::path>{} : std::optional<fs::path>{s};
    };
    mo.cache = opt_path(mo_cache);
    mo.out_path = opt_path(mo_out);
    ro.cache = opt_path(ro_cache);
    ro.out_path = opt_path(ro_out);
    so.cache = opt_path(so_cache);
    so.bias_file = opt_path(so_bias);
    so.out_path = opt_path(so_out);
    bo.out_path = opt_path(bo_out);

    try {
        if (moments->parsed()) return run_moments(mo, out, err);
        if (reduce->parsed()) return run_reduce(ro, out, err);
        if (simulate->parsed()) return run_simulate(so, out, err);
        if (bench->parsed()) return run_bench(bo, out, err);
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what()
            << " (achieved error " << fmt12(e.achieved_error()) << ")\n";
        return 3;
    } catch (const TrainingError& e) {
        err << "training failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace osc
