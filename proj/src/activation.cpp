#include "resflow/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace resflow {

MonotonePiece MonotonePiece::zero() {
    MonotonePiece p;
    p.eval = [](double) { return 0.0; };
    p.deriv = [](double) { return 0.0; };
    p.lip = 0.0;
    return p;
}

MonotonePiece MonotonePiece::relu(double slope) {
    MonotonePiece p;
    p.eval = [slope](double u) { return u > 0.0 ? slope * u : 0.0; };
    p.deriv = [slope](double u) { return u > 0.0 ? slope : 0.0; };
    p.lip = slope;
    return p;
}

MonotonePiece MonotonePiece::saturating_exp(double a2) {
    MonotonePiece p;
    p.eval = [a2](double u) { return u > 0.0 ? a2 * (1.0 - std::exp(-u)) : 0.0; };
    p.deriv = [a2](double u) { return u > 0.0 ? a2 * std::exp(-u) : 0.0; };
    p.lip = a2;
    return p;
}

MonotonePiece MonotonePiece::tanh_positive() {
    MonotonePiece p;
    p.eval = [](double u) { return u > 0.0 ? std::tanh(u) : 0.0; };
    p.deriv = [](double u) {
        if (u <= 0.0) return 0.0;
        double t = std::tanh(u);
        return 1.0 - t * t;
    };
    p.lip = 1.0;
    return p;
}

namespace {

void expect_params(const std::string& name, const std::vector<double>& params, size_t lo,
                   size_t hi) {
    if (params.size() < lo || params.size() > hi) {
        throw std::invalid_argument("activation '" + name + "': expected between " +
                                    std::to_string(lo) + " and " + std::to_string(hi) +
                                    " parameters, got " + std::to_string(params.size()));
    }
}

void expect_positive(const std::string& name, const char* what, double v) {
    if (!(v > 0.0)) {
        throw std::invalid_argument("activation '" + name + "': parameter " + what +
                                    " must be > 0, got " + std::to_string(v));
    }
}

void expect_nonnegative(const std::string& name, const char* what, double v) {
    if (!(v >= 0.0)) {
        throw std::invalid_argument("activation '" + name + "': parameter " + what +
                                    " must be >= 0, got " + std::to_string(v));
    }
}

}  // namespace

ActivationSpec catalog(const std::string& name, const std::vector<double>& params) {
    ActivationSpec s;
    s.name = name;
    if (name == "ReLU") {
        expect_params(name, params, 0, 0);
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::zero();
        s.alpha = 0.0;
        s.beta = 0.0;
    } else if (name == "PReLU") {
        expect_params(name, params, 1, 1);
        double a1 = params[0];
        if (!(a1 >= 0.0 && a1 <= 1.0))
            throw std::invalid_argument("activation 'PReLU': a1 must lie in [0,1]");
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::relu(a1);
        s.alpha = 0.0;
        s.beta = 0.0;
    } else if (name == "TReLU") {
        expect_params(name, params, 1, 1);
        expect_positive(name, "lambda", params[0]);
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::zero();
        s.alpha = params[0];
        s.beta = 0.0;
    } else if (name == "ELU") {
        expect_params(name, params, 0, 1);
        double a2 = params.empty() ? 1.0 : params[0];
        expect_positive(name, "a2", a2);
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::saturating_exp(a2);
        s.alpha = 0.0;
        s.beta = 0.0;
    } else if (name == "TEReLU") {
        expect_params(name, params, 2, 3);
        expect_positive(name, "lambda1", params[0]);
        expect_positive(name, "lambda2", params[1]);
        double a2 = params.size() > 2 ? params[2] : 1.0;
        expect_positive(name, "a2", a2);
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::saturating_exp(a2);
        s.alpha = params[0];
        s.beta = params[1];
    } else if (name == "SoftThresholdSym") {
        expect_params(name, params, 1, 1);
        expect_positive(name, "lambda", params[0]);
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::relu(1.0);
        s.alpha = params[0];
        s.beta = params[0];
    } else if (name == "SoftThresholdAsym") {
        expect_params(name, params, 2, 2);
        expect_positive(name, "lambda1", params[0]);
        expect_positive(name, "lambda2", params[1]);
        s.phi1 = MonotonePiece::relu(1.0);
        s.phi2 = MonotonePiece::relu(1.0);
        s.alpha = params[0];
        s.beta = params[1];
    } else if (name == "Tanh") {
        expect_params(name, params, 0, 0);
        s.phi1 = MonotonePiece::tanh_positive();
        s.phi2 = MonotonePiece::tanh_positive();
        s.alpha = 0.0;
        s.beta = 0.0;
    } else if (name == "DeadZoneLeaky") {
        expect_params(name, params, 4, 4);
        expect_positive(name, "a", params[0]);
        expect_nonnegative(name, "b", params[1]);
        expect_nonnegative(name, "alpha", params[2]);
        expect_nonnegative(name, "beta", params[3]);
        s.phi1 = MonotonePiece::relu(params[0]);
        s.phi2 = MonotonePiece::relu(params[1]);
        s.alpha = params[2];
        s.beta = params[3];
    } else {
        throw std::invalid_argument("unknown activation name '" + name + "'");
    }
    return s;
}

std::vector<std::string> catalog_names() {
    return {"ReLU",   "PReLU",  "TReLU",            "ELU",
            "TEReLU", "SoftThresholdSym", "SoftThresholdAsym", "Tanh",
            "DeadZoneLeaky"};
}

Eigen::VectorXd apply_elementwise(const ActivationSpec& spec, const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = spec(v[i]);
    return out;
}

Eigen::VectorXd apply_deriv(const ActivationSpec& spec, const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = spec.deriv(v[i]);
    return out;
}

}  // namespace resflow
