#pragma once

#include "resflow/activation.hpp"
#include "resflow/loss.hpp"
#include "resflow/params.hpp"

namespace resflow {

// Parameter gradients of one loss evaluation, shaped like the parameters.
struct GradientBundle {
    Eigen::MatrixXd dU;
    Eigen::VectorXd da;
    std::vector<LayerParams> d_layers;
    double loss_value = 0.0;
    // Accumulated only when the activation exposes learnable dead-zone edges.
    double d_alpha = 0.0;
    double d_beta = 0.0;
};

// Reverse accumulation through the layer recursion. When track_deadzone is
// set, d_alpha/d_beta hold the gradients of the DeadZoneLeaky edge positions
// (shared across all activation sites). Throws on non-finite gradients,
// naming the layer.
GradientBundle backprop(const DiscreteParams& params, const ActivationSpec& act,
                        const LossSpec& loss, const Eigen::VectorXd& d,
                        const Eigen::VectorXd& g, bool track_deadzone = false);

}  // namespace resflow
