#include "resflow/autodiff.hpp"

#include <stdexcept>
#include <string>

namespace resflow {

namespace {

// d psi / d alpha = -phi1'(x - alpha), d psi / d beta = phi2'(-x - beta).
void accumulate_deadzone(const ActivationSpec& act, const Eigen::VectorXd& pre_act,
                         const Eigen::VectorXd& upstream, double& d_alpha, double& d_beta) {
    for (Eigen::Index i = 0; i < pre_act.size(); ++i) {
        d_alpha -= upstream[i] * act.phi1.deriv(pre_act[i] - act.alpha);
        d_beta += upstream[i] * act.phi2.deriv(-pre_act[i] - act.beta);
    }
}

}  // namespace

GradientBundle backprop(const DiscreteParams& params, const ActivationSpec& act,
                        const LossSpec& loss, const Eigen::VectorXd& d,
                        const Eigen::VectorXd& g, bool track_deadzone) {
    validate(params);
    const int L = params.depth();
    const double tau = params.tau();

    std::vector<Eigen::VectorXd> xs(static_cast<size_t>(L) + 1);
    std::vector<Eigen::VectorXd> qs(static_cast<size_t>(L));
    std::vector<Eigen::VectorXd> rs(static_cast<size_t>(L));
    const Eigen::VectorXd p = params.pre.U * d + params.pre.a;
    xs[0] = apply_elementwise(act, p);
    for (int l = 0; l < L; ++l) {
        const auto& layer = params.layers[static_cast<size_t>(l)];
        qs[l] = layer.V * xs[l] + layer.b;
        rs[l] = apply_elementwise(act, qs[l]);
        xs[l + 1] = xs[l] + tau * (layer.W * rs[l] + layer.c);
    }

    GradientBundle grad;
    grad.loss_value = loss.value(xs[static_cast<size_t>(L)], g);
    grad.d_layers.resize(static_cast<size_t>(L));

    Eigen::VectorXd lambda = loss.grad_x(xs[static_cast<size_t>(L)], g);
    for (int l = L - 1; l >= 0; --l) {
        const auto& layer = params.layers[static_cast<size_t>(l)];
        auto& dl = grad.d_layers[static_cast<size_t>(l)];
        dl.c = tau * lambda;
        dl.W = tau * lambda * rs[l].transpose();
        const Eigen::VectorXd s = layer.W.transpose() * lambda;
        if (track_deadzone) accumulate_deadzone(act, qs[l], tau * s, grad.d_alpha, grad.d_beta);
        const Eigen::VectorXd u = s.cwiseProduct(apply_deriv(act, qs[l]));
        dl.b = tau * u;
        dl.V = tau * u * xs[l].transpose();
        lambda = lambda + tau * (layer.V.transpose() * u);
        if (!lambda.allFinite())
            throw std::runtime_error("non-finite gradient at layer " + std::to_string(l));
    }
    if (track_deadzone) accumulate_deadzone(act, p, lambda, grad.d_alpha, grad.d_beta);
    const Eigen::VectorXd w = lambda.cwiseProduct(apply_deriv(act, p));
    grad.da = w;
    grad.dU = w * d.transpose();
    if (!grad.dU.allFinite() || !grad.da.allFinite())
        throw std::runtime_error("non-finite gradient at preprocessing layer");
    return grad;
}

}  // namespace resflow
