#pragma once

#include "resflow/activation.hpp"
#include "resflow/params.hpp"

namespace resflow {

enum class Integrator { euler, rk4 };

// One residual step x + h * (W psi(V x + b) + c). The discrete recursion and
// the euler flow both route through this so they agree bit for bit.
Eigen::VectorXd residual_step(const Eigen::VectorXd& x, const LayerParams& layer,
                              const ActivationSpec& act, double h);

// Runs the layer recursion from x0 = psi(U d + a); returns states x^0..x^L at
// times l * T / L.
StateTrajectory discrete_forward(const DiscreteParams& params, const ActivationSpec& act,
                                 const Eigen::VectorXd& d);

// Integrates dx/dt = W(t) psi(V(t) x + b(t)) + c(t) from psi(U d + a) over
// [0, T] on a uniform grid. rk4 is the reference integrator for convergence
// studies. Throws on non-finite states, naming the first offending time.
StateTrajectory continuous_flow(const ContinuousParams& params, const ActivationSpec& act,
                                const Eigen::VectorXd& d, Integrator integrator, int steps);

// Evaluates the parameter path at the left grid points l * T / L.
DiscreteParams sample_params(const ContinuousParams& params, int L);

// Piecewise-constant lift of the layers back to [0, T];
// sample_params(extend_params(p), p.depth()) == p exactly.
ContinuousParams extend_params(const DiscreteParams& params);

// Closed-form layer-state envelope
//   [Lip B (B_in + 1) + t (Lip B^2 + B)] exp(t Lip B^2)   at t = T * l_over_L.
double state_bound(const ParamBudget& budget, const ActivationSpec& act, double T,
                   double l_over_L);

// Parameters whose forward states equal the originals with coordinates
// i1 and i2 swapped at every layer (0-based state indices; b untouched).
DiscreteParams permute_params(const DiscreteParams& params, int i1, int i2);

}  // namespace resflow
