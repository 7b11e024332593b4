#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "resflow/activation.hpp"
#include "resflow/params.hpp"

namespace resflow {

// Finite function class evaluated on a sample: values(j, s) = g_j(z_s).
struct EvaluatedClass {
    Eigen::MatrixXd values;  // |G| x S
    bool symmetric_declared = false;
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(values.rows()); }
    int samples() const { return static_cast<int>(values.cols()); }
};

struct RademacherEstimate {
    enum class Kind { exact, monte_carlo };
    double value = 0.0;
    Kind kind = Kind::exact;
    long draws = 0;
    double half_width = 0.0;  // 95% CI half-width; 0 for exact
};

// Exact empirical Rademacher complexity by enumerating all 2^S sign vectors.
// Budget: S <= 24.
RademacherEstimate rademacher_exact(const EvaluatedClass& cls);

// Monte-Carlo estimate over `draws` uniform sign vectors (draws >= 100);
// deterministic given seed.
RademacherEstimate rademacher_mc(const EvaluatedClass& cls, long draws, std::uint64_t seed);

// Contraction report for R(psi o G) against Lip_psi R(G). implied_c is the
// slack constant the data exhibits, defined when the structural coefficient
// Lip_phi1 alpha + Lip_phi2 beta is positive.
struct ContractionReport {
    int samples = 0;
    std::string activation;
    double r_g = 0.0;        // exact complexity of G
    double r_psi_g = 0.0;    // exact complexity of psi o G (the lhs)
    double rhs_classic = 0.0;  // Lip_psi * r_g
    double slack = 0.0;      // rhs_classic - r_psi_g
    std::optional<double> implied_c;
    double bound_on_c = 0.0;  // min(S, Lip_psi S r_g / structural coefficient)
};

// Exact-enumeration contraction check. Throws std::logic_error if the classic
// inequality fails beyond 1e-12 or implied_c exceeds its admissible range by
// more than 1e-9.
ContractionReport contraction_check(const EvaluatedClass& cls, const ActivationSpec& act);

// The soft-threshold class {c1 ||.||_2 + c2} on unit-norm samples with
// (c1, c2) in [0,eta]x[alpha,gamma] or [-eta,0]x[-gamma,-beta].
struct SoftThresholdClassSpec {
    double eta = 1.0;
    double gamma = 2.0;
    double alpha = 0.5;
    double beta = 0.5;
    int samples = 3;
};
void validate(const SoftThresholdClassSpec& spec);

struct SoftThresholdComplexities {
    double r_g = 0.0;
    double r_psi_g = 0.0;
};

// Closed forms: r_g = (eta+gamma) C(S-1, floor(S/2)) / 2^(S-1) and
// r_psi_g = (2 eta + 2 gamma - alpha - beta) C(S-1, floor(S/2)) / 2^S.
SoftThresholdComplexities example33_closed_form(const SoftThresholdClassSpec& spec);

// Independent oracle: enumerates all 2^S sign vectors and solves each sup over
// the two parameter rectangles at interval endpoints and dead-zone boundaries.
// Budget: S <= 20.
SoftThresholdComplexities example33_bruteforce(const SoftThresholdClassSpec& spec);

// Finite class of constant functions at the sup-achieving candidate values;
// its exact complexity (and that of psi applied to it) coincides with the
// full class's.
EvaluatedClass example33_endpoint_class(const SoftThresholdClassSpec& spec);

// Evaluates coordinate `coord` of the final state over a parameter grid:
// values(j, s) = x^L_coord(d_s; params_grid[j]).
EvaluatedClass hypothesis_class_eval(const std::vector<DiscreteParams>& params_grid,
                                     const ActivationSpec& act, int coord,
                                     const std::vector<Eigen::VectorXd>& data);

}  // namespace resflow
