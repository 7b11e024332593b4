#include "resflow/train.hpp"

#include "resflow/resnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "resflow/rng.hpp"

namespace resflow {

void validate(const TrainConfig& cfg) {
    if (!(cfg.lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
        throw std::invalid_argument("momentum must lie in [0, 1)");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (cfg.projection && !(*cfg.projection > 0.0))
        throw std::invalid_argument("projection budget must be positive");
}

namespace {

struct Momentum {
    Eigen::MatrixXd vU;
    Eigen::VectorXd va;
    std::vector<LayerParams> vlayers;
    double valpha = 0.0;
    double vbeta = 0.0;

    explicit Momentum(const DiscreteParams& params) {
        vU = Eigen::MatrixXd::Zero(params.pre.U.rows(), params.pre.U.cols());
        va = Eigen::VectorXd::Zero(params.pre.a.size());
        for (const auto& layer : params.layers) {
            LayerParams v;
            v.V = Eigen::MatrixXd::Zero(layer.V.rows(), layer.V.cols());
            v.W = Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols());
            v.b = Eigen::VectorXd::Zero(layer.b.size());
            v.c = Eigen::VectorXd::Zero(layer.c.size());
            vlayers.push_back(std::move(v));
        }
    }
};

void project_matrix(Eigen::MatrixXd& mat, double cap) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        double s = mat.row(i).cwiseAbs().sum();
        if (s > cap) mat.row(i) *= cap / s;
    }
}

void project_vector(Eigen::VectorXd& vec, double cap) {
    vec = vec.cwiseMax(-cap).cwiseMin(cap);
}

void project_params(DiscreteParams& params, double cap) {
    project_matrix(params.pre.U, cap);
    project_vector(params.pre.a, cap);
    for (auto& layer : params.layers) {
        project_matrix(layer.V, cap);
        project_matrix(layer.W, cap);
        project_vector(layer.b, cap);
        project_vector(layer.c, cap);
    }
}

// Shared loop; when learn_deadzone is set the activation is rebuilt from the
// running (alpha, beta) each step and the edges receive gradient updates.
TrainResult train_loop(const DiscreteParams& init, ActivationSpec act, const LossSpec& loss,
                       const Dataset& train, const TrainConfig& cfg, const Dataset* test,
                       bool learn_deadzone, double slope_a, double slope_b, double alpha0,
                       double beta0) {
    validate(cfg);
    validate(init);
    if (train.empty()) throw std::invalid_argument("training dataset is empty");

    TrainResult result;
    result.params = init;
    result.alpha = alpha0;
    result.beta = beta0;
    Momentum mom(init);

    const auto S = train.size();
    std::vector<size_t> order(S);
    std::iota(order.begin(), order.end(), 0);

    std::uint64_t step_index = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        auto rng = make_rng(derive_seed(cfg.seed, stream::batch_order,
                                        static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t start = 0; start < S; start += static_cast<size_t>(cfg.batch_size)) {
            const size_t stop = std::min(S, start + static_cast<size_t>(cfg.batch_size));
            const double inv = 1.0 / static_cast<double>(stop - start);
            if (learn_deadzone)
                act = catalog("DeadZoneLeaky", {slope_a, slope_b, result.alpha, result.beta});

            GradientBundle sum;
            bool first = true;
            for (size_t idx = start; idx < stop; ++idx) {
                const Sample& smp = train[order[idx]];
                GradientBundle one =
                    backprop(result.params, act, loss, smp.d, smp.g, learn_deadzone);
                if (!std::isfinite(one.loss_value))
                    throw std::runtime_error("training diverged at step " +
                                             std::to_string(step_index));
                if (first) {
                    sum = std::move(one);
                    first = false;
                } else {
                    sum.dU += one.dU;
                    sum.da += one.da;
                    for (size_t l = 0; l < sum.d_layers.size(); ++l) {
                        sum.d_layers[l].V += one.d_layers[l].V;
                        sum.d_layers[l].W += one.d_layers[l].W;
                        sum.d_layers[l].b += one.d_layers[l].b;
                        sum.d_layers[l].c += one.d_layers[l].c;
                    }
                    sum.d_alpha += one.d_alpha;
                    sum.d_beta += one.d_beta;
                    sum.loss_value += one.loss_value;
                }
            }

            mom.vU = cfg.momentum * mom.vU + inv * sum.dU;
            mom.va = cfg.momentum * mom.va + inv * sum.da;
            result.params.pre.U -= cfg.lr * mom.vU;
            result.params.pre.a -= cfg.lr * mom.va;
            for (size_t l = 0; l < mom.vlayers.size(); ++l) {
                auto& v = mom.vlayers[l];
                auto& p = result.params.layers[l];
                const auto& dl = sum.d_layers[l];
                v.V = cfg.momentum * v.V + inv * dl.V;
                v.W = cfg.momentum * v.W + inv * dl.W;
                v.b = cfg.momentum * v.b + inv * dl.b;
                v.c = cfg.momentum * v.c + inv * dl.c;
                p.V -= cfg.lr * v.V;
                p.W -= cfg.lr * v.W;
                p.b -= cfg.lr * v.b;
                p.c -= cfg.lr * v.c;
            }
            if (learn_deadzone) {
                mom.valpha = cfg.momentum * mom.valpha + inv * sum.d_alpha;
                mom.vbeta = cfg.momentum * mom.vbeta + inv * sum.d_beta;
                result.alpha = std::max(0.0, result.alpha - cfg.lr * mom.valpha);
                result.beta = std::max(0.0, result.beta - cfg.lr * mom.vbeta);
            }
            if (cfg.projection) project_params(result.params, *cfg.projection);
            ++step_index;
        }

        if (learn_deadzone)
            act = catalog("DeadZoneLeaky", {slope_a, slope_b, result.alpha, result.beta});
        TrainLogRow row;
        row.epoch = epoch;
        row.train_loss = mean_loss(result.params, act, loss, train);
        if (test) row.test_loss = mean_loss(result.params, act, loss, *test);
        row.param_inf_norm = param_inf_norm(result.params);
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        if (!std::isfinite(row.train_loss))
            throw std::runtime_error("training diverged at step " + std::to_string(step_index));
        result.log.push_back(row);
        if (learn_deadzone) result.deadzone_history.emplace_back(result.alpha, result.beta);
    }
    return result;
}

}  // namespace

TrainResult sgd_train(const DiscreteParams& init, const ActivationSpec& act,
                      const LossSpec& loss, const Dataset& train, const TrainConfig& cfg,
                      const Dataset* test) {
    return train_loop(init, act, loss, train, cfg, test, false, 0.0, 0.0, act.alpha, act.beta);
}

TrainResult sgd_train_learnable_deadzone(const DiscreteParams& init, double a, double b,
                                         double alpha0, double beta0, const LossSpec& loss,
                                         const Dataset& train, const TrainConfig& cfg,
                                         const Dataset* test) {
    ActivationSpec act = catalog("DeadZoneLeaky", {a, b, alpha0, beta0});
    return train_loop(init, act, loss, train, cfg, test, true, a, b, alpha0, beta0);
}

double mean_loss(const DiscreteParams& params, const ActivationSpec& act,
                 const LossSpec& loss, const Dataset& data) {
    if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (const auto& smp : data) {
        const auto traj = discrete_forward(params, act, smp.d);
        sum += loss.value(traj.states.back(), smp.g);
    }
    return sum / static_cast<double>(data.size());
}

}  // namespace resflow
