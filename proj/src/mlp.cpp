#include "oscombine/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oscombine/rng.hpp"

namespace osc {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Workspace {
    std::vector<double> hidden_act;
    std::vector<double> out_act;
    std::vector<double> delta_out;
    std::vector<double> delta_hid;
};

void forward(const std::vector<double>& w1, const std::vector<double>& w2, int in, int hid,
             int out, std::span<const double> x, std::vector<double>& h, std::vector<double>& o) {
    h.resize(hid);
    for (int j = 0; j < hid; ++j) {
        const double* w = &w1[static_cast<std::size_t>(j) * (in + 1)];
        double a = w[in]; // bias
        for (int i = 0; i < in; ++i) a += w[i] * x[i];
        h[j] = sigmoid(a);
    }
    o.resize(out);
    for (int k = 0; k < out; ++k) {
        const double* w = &w2[static_cast<std::size_t>(k) * (hid + 1)];
        double a = w[hid];
        for (int j = 0; j < hid; ++j) a += w[j] * h[j];
        o[k] = sigmoid(a);
    }
}

int argmax(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

} // namespace

Mlp::Mlp(int in, int hid, int out)
    : in_(in), hid_(hid), out_(out),
      w1_(static_cast<std::size_t>(hid) * (in + 1), 0.0),
      w2_(static_cast<std::size_t>(out) * (hid + 1), 0.0) {}

Mlp Mlp::random_init(int inputs, int hidden, int outputs, std::uint64_t seed) {
    if (inputs < 1 || hidden < 1 || outputs < 1)
        throw InvalidInputError("network dimensions must be positive");
    Mlp net(inputs, hidden, outputs);
    RandomStream rng(derive_seed(seed, 0x6d6c70));
    const double r1 = 1.0 / std::sqrt(inputs + 1.0);
    const double r2 = 1.0 / std::sqrt(hidden + 1.0);
    for (double& w : net.w1_) w = (2.0 * rng.uniform01() - 1.0) * r1;
    for (double& w : net.w2_) w = (2.0 * rng.uniform01() - 1.0) * r2;
    return net;
}

std::vector<double> Mlp::predict_posteriors(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != in_)
        throw InvalidInputError("feature vector has wrong dimension");
    std::vector<double> h, o;
    forward(w1_, w2_, in_, hid_, out_, x, h, o);
    return o;
}

int Mlp::predict_class(std::span<const double> x) const {
    const auto o = predict_posteriors(x);
    return argmax(o);
}

double Mlp::error_rate(const Dataset& data) const {
    if (data.patterns() == 0) throw InvalidInputError("empty dataset");
    int wrong = 0;
    for (int p = 0; p < data.patterns(); ++p)
        if (predict_class(data.row(p)) != data.labels[p]) ++wrong;
    return static_cast<double>(wrong) / data.patterns();
}

Mlp Mlp::train(const Dataset& train_set, const Dataset& validation, const MlpConfig& cfg) {
    if (cfg.hidden_units < 1) throw InvalidInputError("hidden_units must be >= 1");
    if (cfg.epochs < 1) throw InvalidInputError("epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw InvalidInputError("learning rate must be positive");
    if (!(cfg.early_stop_fraction > 0.0) || cfg.early_stop_fraction > 1.0)
        throw InvalidInputError("early_stop_fraction must be in (0, 1]");
    if (train_set.patterns() == 0) throw InvalidInputError("empty training set");
    if (validation.patterns() == 0) throw InvalidInputError("empty validation set");
    if (train_set.n_classes < 2) throw InvalidInputError("need at least two classes");

    const int in = train_set.dims;
    const int hid = cfg.hidden_units;
    const int out = train_set.n_classes;

    // One full pass tracks the best-validation epoch; the under-trained
    // regime then replays the identical trajectory for a prefix of it.
    auto run = [&](int epochs, bool track_best, Mlp& net) -> int {
        RandomStream rng(derive_seed(cfg.seed, 0x6d6c70));
        const double r1 = 1.0 / std::sqrt(in + 1.0);
        const double r2 = 1.0 / std::sqrt(hid + 1.0);
        for (double& w : net.w1_) w = (2.0 * rng.uniform01() - 1.0) * r1;
        for (double& w : net.w2_) w = (2.0 * rng.uniform01() - 1.0) * r2;

        std::vector<int> order(train_set.patterns());
        std::iota(order.begin(), order.end(), 0);
        Workspace ws;
        std::vector<double> best_w1, best_w2;
        double best_err = std::numeric_limits<double>::infinity();
        int best_epoch = 0;

        for (int epoch = 1; epoch <= epochs; ++epoch) {
            rng.shuffle(order);
            double sse = 0.0;
            for (const int p : order) {
                const auto x = train_set.row(p);
                forward(net.w1_, net.w2_, in, hid, out, x, ws.hidden_act, ws.out_act);
                ws.delta_out.resize(out);
                for (int k = 0; k < out; ++k) {
                    const double target = train_set.labels[p] == k ? 1.0 : 0.0;
                    const double o = ws.out_act[k];
                    const double e = o - target;
                    sse += e * e;
                    ws.delta_out[k] = e * o * (1.0 - o);
                }
                ws.delta_hid.assign(hid, 0.0);
                for (int k = 0; k < out; ++k) {
                    double* w = &net.w2_[static_cast<std::size_t>(k) * (hid + 1)];
                    const double d = ws.delta_out[k];
                    for (int j = 0; j < hid; ++j) {
                        ws.delta_hid[j] += d * w[j];
                        w[j] -= cfg.learning_rate * d * ws.hidden_act[j];
                    }
                    w[hid] -= cfg.learning_rate * d;
                }
                for (int j = 0; j < hid; ++j) {
                    const double h = ws.hidden_act[j];
                    const double d = ws.delta_hid[j] * h * (1.0 - h);
                    double* w = &net.w1_[static_cast<std::size_t>(j) * (in + 1)];
                    for (int i = 0; i < in; ++i) w[i] -= cfg.learning_rate * d * x[i];
                    w[in] -= cfg.learning_rate * d;
                }
            }
            if (!std::isfinite(sse))
                throw TrainingError("training diverged at epoch " + std::to_string(epoch));
            if (track_best) {
                const double verr = net.error_rate(validation);
                if (verr < best_err) {
                    best_err = verr;
                    best_epoch = epoch;
                    best_w1 = net.w1_;
                    best_w2 = net.w2_;
                }
            }
        }
        if (track_best) {
            net.w1_ = std::move(best_w1);
            net.w2_ = std::move(best_w2);
            net.validation_error_ = best_err;
        }
        return best_epoch;
    };

    Mlp net(in, hid, out);
    const int best_epoch = run(cfg.epochs, true, net);
    net.best_epoch_ = best_epoch;
    if (cfg.early_stop_fraction >= 1.0) {
        net.trained_epochs_ = best_epoch;
        return net;
    }

    const int stop = std::clamp(
        static_cast<int>(std::llround(cfg.early_stop_fraction * best_epoch)), 1, cfg.epochs);
    Mlp short_net(in, hid, out);
    run(stop, false, short_net);
    short_net.best_epoch_ = best_epoch;
    short_net.trained_epochs_ = stop;
    short_net.validation_error_ = short_net.error_rate(validation);
    return short_net;
}

} // namespace osc
