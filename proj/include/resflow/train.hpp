#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "resflow/autodiff.hpp"

namespace resflow {

struct Sample {
    Eigen::VectorXd d;
    Eigen::VectorXd g;
};
using Dataset = std::vector<Sample>;

struct TrainConfig {
    double lr = 0.01;
    double momentum = 0.9;
    int epochs = 1;
    int batch_size = 32;
    std::uint64_t seed = 0;
    std::optional<double> projection;  // clip blockwise norms to B_Theta after each step
};
void validate(const TrainConfig& cfg);

struct TrainLogRow {
    int epoch = 0;
    double train_loss = 0.0;
    double test_loss = std::numeric_limits<double>::quiet_NaN();
    double param_inf_norm = 0.0;
    double wall_ms = 0.0;
};
using TrainLog = std::vector<TrainLogRow>;

struct TrainResult {
    DiscreteParams params;
    TrainLog log;
    // Dead-zone edges after training; equal to the inputs unless learned.
    double alpha = 0.0;
    double beta = 0.0;
    // Per-epoch (alpha, beta) values when the edges are learned.
    std::vector<std::pair<double, double>> deadzone_history;
};

// Momentum SGD over shuffled minibatches; deterministic given cfg.seed.
// Aborts with the step index if the loss turns non-finite.
TrainResult sgd_train(const DiscreteParams& init, const ActivationSpec& act,
                      const LossSpec& loss, const Dataset& train, const TrainConfig& cfg,
                      const Dataset* test = nullptr);

// Same loop with the DeadZoneLeaky edges (alpha, beta) trained jointly and
// projected onto [0, inf) after every step. Slopes a, b stay fixed.
TrainResult sgd_train_learnable_deadzone(const DiscreteParams& init, double a, double b,
                                         double alpha0, double beta0, const LossSpec& loss,
                                         const Dataset& train, const TrainConfig& cfg,
                                         const Dataset* test = nullptr);

double mean_loss(const DiscreteParams& params, const ActivationSpec& act,
                 const LossSpec& loss, const Dataset& data);

}  // namespace resflow
