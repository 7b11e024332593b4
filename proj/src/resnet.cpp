#include "resflow/resnet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace resflow {

namespace {

Eigen::VectorXd vector_field(const LayerParams& layer, const ActivationSpec& act,
                             const Eigen::VectorXd& x) {
    return layer.W * apply_elementwise(act, layer.V * x + layer.b) + layer.c;
}

void check_input_dim(int expected, const Eigen::VectorXd& d) {
    if (d.size() != expected)
        throw std::invalid_argument("input dimension " + std::to_string(d.size()) +
                                    " does not match n_d = " + std::to_string(expected));
}

}  // namespace

Eigen::VectorXd residual_step(const Eigen::VectorXd& x, const LayerParams& layer,
                              const ActivationSpec& act, double h) {
    return x + h * vector_field(layer, act, x);
}

StateTrajectory discrete_forward(const DiscreteParams& params, const ActivationSpec& act,
                                 const Eigen::VectorXd& d) {
    validate(params);
    check_input_dim(params.n_d(), d);
    const int L = params.depth();
    const double tau = params.tau();
    StateTrajectory traj;
    traj.states.reserve(L + 1);
    traj.times.reserve(L + 1);
    Eigen::VectorXd x = apply_elementwise(act, params.pre.U * d + params.pre.a);
    traj.states.push_back(x);
    traj.times.push_back(0.0);
    for (int l = 0; l < L; ++l) {
        x = residual_step(x, params.layers[static_cast<size_t>(l)], act, tau);
        traj.states.push_back(x);
        traj.times.push_back(static_cast<double>(l + 1) * params.horizon /
                             static_cast<double>(L));
    }
    return traj;
}

StateTrajectory continuous_flow(const ContinuousParams& params, const ActivationSpec& act,
                                const Eigen::VectorXd& d, Integrator integrator, int steps) {
    if (steps < 1) throw std::invalid_argument("continuous_flow needs steps >= 1");
    if (!params.path) throw std::invalid_argument("continuous params carry no path");
    check_input_dim(static_cast<int>(params.pre.U.cols()), d);
    const double T = params.horizon;
    const double h = T / static_cast<double>(steps);
    StateTrajectory traj;
    traj.states.reserve(steps + 1);
    traj.times.reserve(steps + 1);
    Eigen::VectorXd x = apply_elementwise(act, params.pre.U * d + params.pre.a);
    traj.states.push_back(x);
    traj.times.push_back(0.0);
    for (int k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * T / static_cast<double>(steps);
        if (integrator == Integrator::euler) {
            x = residual_step(x, params.path->at(t), act, h);
        } else {
            const Eigen::VectorXd k1 = vector_field(params.path->at(t), act, x);
            const LayerParams mid = params.path->at(t + 0.5 * h);
            const Eigen::VectorXd k2 = vector_field(mid, act, x + 0.5 * h * k1);
            const Eigen::VectorXd k3 = vector_field(mid, act, x + 0.5 * h * k2);
            const Eigen::VectorXd k4 =
                vector_field(params.path->at(t + h), act, x + h * k3);
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!x.allFinite())
            throw std::runtime_error("non-finite state at t = " +
                                     std::to_string(t + h) + " during integration");
        traj.states.push_back(x);
        traj.times.push_back(static_cast<double>(k + 1) * T / static_cast<double>(steps));
    }
    return traj;
}

DiscreteParams sample_params(const ContinuousParams& params, int L) {
    if (L < 1) throw std::invalid_argument("sample_params needs L >= 1");
    if (!params.path) throw std::invalid_argument("continuous params carry no path");
    DiscreteParams out;
    out.pre = params.pre;
    out.horizon = params.horizon;
    out.layers.reserve(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l)
        out.layers.push_back(params.path->at(static_cast<double>(l) * params.horizon /
                                             static_cast<double>(L)));
    return out;
}

ContinuousParams extend_params(const DiscreteParams& params) {
    validate(params);
    ContinuousParams out;
    out.pre = params.pre;
    out.horizon = params.horizon;
    out.path = std::make_shared<PiecewiseConstantPath>(params.layers, params.horizon);
    return out;
}

double state_bound(const ParamBudget& budget, const ActivationSpec& act, double T,
                   double l_over_L) {
    validate(budget);
    const double lip = act.lip();
    const double B = budget.b_theta;
    const double t = T * l_over_L;
    return (lip * B * (budget.b_in + 1.0) + t * (lip * B * B + B)) * std::exp(t * lip * B * B);
}

DiscreteParams permute_params(const DiscreteParams& params, int i1, int i2) {
    validate(params);
    const int n = params.n();
    if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n)
        throw std::out_of_range("permutation index out of range [0, n)");
    DiscreteParams out = params;
    if (i1 == i2) return out;
    out.pre.U.row(i1).swap(out.pre.U.row(i2));
    std::swap(out.pre.a[i1], out.pre.a[i2]);
    for (auto& layer : out.layers) {
        layer.V.col(i1).swap(layer.V.col(i2));
        layer.W.row(i1).swap(layer.W.row(i2));
        std::swap(layer.c[i1], layer.c[i2]);
    }
    return out;
}

}  // namespace resflow
