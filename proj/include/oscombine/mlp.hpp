#pragma once
// Single-hidden-layer perceptron trained by online backprop on a squared
// error toward one-of-L targets, with validation-based stopping.

#include <cstdint>
#include <span>
#include <vector>

#include "oscombine/dataset.hpp"

namespace osc {

struct MlpConfig {
    int hidden_units = 8;
    int epochs = 100;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    /// 1.0: keep the weights of the best-validation epoch ("fine tuned").
    /// f < 1: stop after f x (best epoch count) epochs instead, reproducing
    /// deliberately under-trained ensemble members.
    double early_stop_fraction = 1.0;
};

class Mlp {
public:
    /// Trains on `train`, scoring `validation` after every epoch. Sigmoid
    /// hidden and output units, one output per class, squared-error loss so
    /// outputs approximate class posteriors. Deterministic for a fixed seed.
    /// Throws TrainingError if the loss stops being finite.
    static Mlp train(const Dataset& train, const Dataset& validation, const MlpConfig& config);

    /// Randomly initialized, untrained network (handy as a known-bad model).
    static Mlp random_init(int inputs, int hidden, int outputs, std::uint64_t seed);

    /// One row of L finite posterior estimates for a feature vector.
    std::vector<double> predict_posteriors(std::span<const double> x) const;

    /// Argmax class with lowest-index tie-break.
    int predict_class(std::span<const double> x) const;

    /// Misclassification fraction on a dataset (0..1).
    double error_rate(const Dataset& data) const;

    int inputs() const { return in_; }
    int hidden() const { return hid_; }
    int outputs() const { return out_; }
    int best_epoch() const { return best_epoch_; }
    int trained_epochs() const { return trained_epochs_; }
    double validation_error() const { return validation_error_; }
    const std::vector<double>& hidden_weights() const { return w1_; }
    const std::vector<double>& output_weights() const { return w2_; }

private:
    Mlp(int in, int hid, int out);

    int in_ = 0, hid_ = 0, out_ = 0;
    std::vector<double> w1_; // hid x (in + 1), bias last
    std::vector<double> w2_; // out x (hid + 1), bias last
    int best_epoch_ = 0;
    int trained_epochs_ = 0;
    double validation_error_ = 1.0;
};

} // namespace osc
