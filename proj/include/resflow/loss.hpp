#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

namespace resflow {

enum class LossKind { squared, ramp, cross_entropy };

// Loss with its local Lipschitz envelope kappa:
//   |value(x,g) - value(xt,g)| <= kappa(x,xt,g) * ||x - xt||_2.
struct LossSpec {
    LossKind kind = LossKind::squared;
    double margin = 1.0;  // ramp only
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> grad_x;
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)>
        kappa;
};

LossSpec make_loss(LossKind kind, double margin = 1.0);
LossKind loss_kind_from_string(const std::string& name);
std::string to_string(LossKind kind);

// Uniform envelopes of the loss and its kappa over states with
// ||x||_inf <= b_out and targets with ||g||_2 <= b_in; these are the concrete
// B_ell / B_kappa constants fed to the bound calculators.
struct LossEnvelope {
    double b_ell = 0.0;
    double b_kappa = 0.0;
};
LossEnvelope loss_envelope(LossKind kind, int n, double b_out, double b_in,
                           double margin = 1.0);

double loss_eval(const LossSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& g);

}  // namespace resflow
