#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

namespace resflow {

// One monotone half of an activation: increasing, Lipschitz, zero on (-inf, 0].
struct MonotonePiece {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;  // a.e. derivative; 0 at and below the kink
    double lip = 0.0;

    static MonotonePiece zero();
    static MonotonePiece relu(double slope);
    static MonotonePiece saturating_exp(double a2);  // a2 * (1 - exp(-u)) on u >= 0
    static MonotonePiece tanh_positive();
};

// Activation psi(x) = phi1(x - alpha) - phi2(-x - beta) with alpha, beta >= 0.
// The dead zone [-beta, alpha] (when both positive) maps to 0.
struct ActivationSpec {
    MonotonePiece phi1;
    MonotonePiece phi2;
    double alpha = 0.0;
    double beta = 0.0;
    std::string name;

    double operator()(double x) const { return phi1.eval(x - alpha) - phi2.eval(-x - beta); }
    double deriv(double x) const { return phi1.deriv(x - alpha) + phi2.deriv(-x - beta); }
    double lip() const { return std::max(phi1.lip, phi2.lip); }
    // Structural coefficient Lip_phi1 * alpha + Lip_phi2 * beta.
    double structural_coeff() const { return phi1.lip * alpha + phi2.lip * beta; }
};

// Builds a catalog activation by name. Known names:
//   ReLU            []               PReLU  [a1]            TReLU [lambda]
//   ELU             [a2 = 1.0]       TEReLU [lambda1, lambda2, a2 = 1.0]
//   SoftThresholdSym  [lambda]       SoftThresholdAsym [lambda1, lambda2]
//   Tanh            []               DeadZoneLeaky [a, b, alpha, beta]
// Throws std::invalid_argument on unknown names or out-of-range parameters.
ActivationSpec catalog(const std::string& name, const std::vector<double>& params = {});

std::vector<std::string> catalog_names();

Eigen::VectorXd apply_elementwise(const ActivationSpec& spec, const Eigen::VectorXd& v);
Eigen::VectorXd apply_deriv(const ActivationSpec& spec, const Eigen::VectorXd& v);

}  // namespace resflow
