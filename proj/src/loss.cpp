#include "resflow/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace resflow {

namespace {

void check_dims(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    if (x.size() != g.size())
        throw std::invalid_argument("loss: state and target dimensions differ");
}

double softmax_nll(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    Eigen::Index y;
    g.maxCoeff(&y);
    const double xmax = x.maxCoeff();
    const double lse = xmax + std::log((x.array() - xmax).exp().sum());
    return lse - x[y];
}

}  // namespace

LossSpec make_loss(LossKind kind, double margin) {
    LossSpec spec;
    spec.kind = kind;
    spec.margin = margin;
    switch (kind) {
        case LossKind::squared:
            spec.value = [](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
                check_dims(x, g);
                return (x - g).squaredNorm();
            };
            spec.grad_x = [](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
                check_dims(x, g);
                return Eigen::VectorXd(2.0 * (x - g));
            };
            spec.kappa = [](const Eigen::VectorXd& x, const Eigen::VectorXd& xt,
                            const Eigen::VectorXd& g) {
                return (x - g).norm() + (xt - g).norm();
            };
            break;
        case LossKind::ramp: {
            if (!(margin > 0.0)) throw std::invalid_argument("ramp margin must be positive");
            spec.value = [margin](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
                check_dims(x, g);
                return std::clamp(1.0 - x.dot(g) / margin, 0.0, 1.0);
            };
            spec.grad_x = [margin](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
                check_dims(x, g);
                const double raw = 1.0 - x.dot(g) / margin;
                if (raw <= 0.0 || raw >= 1.0) return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
                return Eigen::VectorXd(-g / margin);
            };
            spec.kappa = [margin](const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  const Eigen::VectorXd& g) { return g.norm() / margin; };
            break;
        }
        case LossKind::cross_entropy:
            spec.value = [](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
                check_dims(x, g);
                return softmax_nll(x, g);
            };
            spec.grad_x = [](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
                check_dims(x, g);
                const double xmax = x.maxCoeff();
                Eigen::VectorXd p = (x.array() - xmax).exp();
                p /= p.sum();
                Eigen::Index y;
                g.maxCoeff(&y);
                p[y] -= 1.0;
                return p;
            };
            // ||softmax(x) - onehot||_2 <= sqrt(2) everywhere.
            spec.kappa = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&) { return std::sqrt(2.0); };
            break;
    }
    return spec;
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "squared") return LossKind::squared;
    if (name == "ramp") return LossKind::ramp;
    if (name == "cross_entropy") return LossKind::cross_entropy;
    throw std::invalid_argument("unknown loss kind '" + name + "'");
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::squared: return "squared";
        case LossKind::ramp: return "ramp";
        case LossKind::cross_entropy: return "cross_entropy";
    }
    return "?";
}

LossEnvelope loss_envelope(LossKind kind, int n, double b_out, double b_in, double margin) {
    LossEnvelope env;
    const double radius = std::sqrt(static_cast<double>(n)) * b_out + b_in;
    switch (kind) {
        case LossKind::squared:
            env.b_ell = radius * radius;
            env.b_kappa = 2.0 * radius;
            break;
        case LossKind::ramp:
            env.b_ell = 1.0;
            env.b_kappa = b_in / margin;
            break;
        case LossKind::cross_entropy:
            env.b_ell = std::log(static_cast<double>(n)) + 2.0 * b_out;
            env.b_kappa = std::sqrt(2.0);
            break;
    }
    return env;
}

double loss_eval(const LossSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    return spec.value(x, g);
}

}  // namespace resflow
