#pragma once

#include <vector>

#include "resflow/activation.hpp"
#include "resflow/params.hpp"

namespace resflow {

// Convention for the negative structural term of the continuous-time bound.
// as_printed keeps the term without the 2 sqrt(2) n B_kappa B_Theta prefactor;
// match_discrete applies the same prefactor as the discrete bound so the two
// structural terms agree in the deep-layer limit.
enum class ContinuousConvention { as_printed, match_discrete };

struct BoundInputs {
    int n = 1;
    int n_d = 1;
    double T = 1.0;
    int L = 1;          // discrete only
    long S = 100;
    double delta = 0.05;
    ParamBudget budget;
    ActivationSpec act;
    double b_kappa = 1.0;
    double b_ell = 1.0;
    std::vector<double> c_slack;  // per-layer C^l (discrete); c_slack[0] continuous
    bool clamp_slack = false;     // clamp out-of-range C instead of rejecting
};

struct BoundReport {
    double leading = 0.0;
    double concentration = 0.0;
    double structural = 0.0;  // <= 0
    double total = 0.0;
    double m_factor = 0.0;
};

// Admissible upper end for the slack constants:
// min(sqrt(S) (1 + 2 Lip B) / (2 (Lip_phi1 alpha + Lip_phi2 beta)), S).
double slack_upper_limit(const ActivationSpec& act, const ParamBudget& budget, long S);

// M(T, Lip, n_d, B_in, B) =
//   (Lip B_in sqrt(2 log 2 n_d) + 1 + T (1 + 2 Lip B)) exp(2 T Lip B^2).
double m_factor(double T, const ActivationSpec& act, int n_d, const ParamBudget& budget);

// Generalization bound for the layer recursion:
//   2 sqrt(2) n B_kappa B (M / sqrt(S)) + 4 B_ell sqrt(2 log(4/delta) / S)
//   - 2 sqrt(2) n B_kappa B ((L1 a + L2 b) exp(T Lip B^2) / S) tau sum_l C^l.
BoundReport discrete_bound(const BoundInputs& inputs);

// Flow-map counterpart with a single slack constant; the negative term follows
// the chosen convention.
BoundReport continuous_bound(const BoundInputs& inputs,
                             ContinuousConvention convention = ContinuousConvention::as_printed);

// Per-layer complexity recursion R^0..R^L with seed
//   R^0 = Lip B (B_in sqrt(2 log 2 n_d) + 1) / sqrt(S)
// and step
//   R^{l+1} = (1 + 2 tau Lip B^2) R^l
//             + max(tau (B/sqrt(S))(1 + 2 Lip B) - tau B (L1 a + L2 b) C^{l+1} / S, 0).
std::vector<double> layered_recursion(const BoundInputs& inputs);

}  // namespace resflow
