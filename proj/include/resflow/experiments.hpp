#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resflow/datasets.hpp"
#include "resflow/fit.hpp"
#include "resflow/resnet.hpp"
#include "resflow/train.hpp"

namespace resflow {

using ArchSpec = std::pair<double, int>;  // (T, L)

// Uniform [-scale, scale] entries divided by sqrt(fan-in) per block.
DiscreteParams init_discrete_params(const NetDims& dims, double scale, std::uint64_t seed);

struct GapExperimentConfig {
    std::vector<ArchSpec> archs{{1.0, 4}};
    std::vector<long> s_grid{250, 500, 1000, 2000, 4000};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    DatasetSpec base;
    TrainConfig train;
    LossKind loss = LossKind::squared;
    int student_m = 8;
    int window = 10;  // epochs averaged into the reported gap
    double init_scale = 0.5;
};

struct GapRecord {
    double T = 1.0;
    int L = 1;
    long S = 0;
    std::uint64_t seed = 0;
    double train_loss = 0.0;  // mean over the final window
    double test_loss = 0.0;
    double gap = 0.0;  // test_loss - train_loss
};

struct GapResult {
    std::vector<GapRecord> records;
    std::vector<FitResult> fits;                  // per arch, on seed-mean gaps
    std::vector<std::vector<double>> mean_gaps;   // per arch, per S
    std::vector<double> spearman_by_arch;
    int exclusions = 0;
    std::vector<std::string> exclusion_log;
};

// Trains one model per (arch, S, seed), averages the test-train gap over the
// final window, and fits mu / sqrt(S) per arch. Diverged runs are excluded
// and logged; records + exclusions always add up to the full grid.
GapResult gap_vs_samples(const GapExperimentConfig& cfg);

struct DepthExperimentConfig {
    double T = 6.0;
    std::vector<int> l_grid{3, 6, 12, 24};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    DatasetSpec base;
    TrainConfig train;
    LossKind loss = LossKind::squared;
    int student_m = 8;
    int window = 10;
    double init_b_theta = 0.5;  // budget of the shared smooth init path
};

struct DepthRecord {
    int L = 0;
    std::uint64_t seed = 0;
    double final_train = 0.0;
    double final_test = 0.0;
};

struct DepthResult {
    std::vector<DepthRecord> records;
    std::vector<double> mean_final_train;  // per L
    std::vector<double> diffs;             // |m(L_{k+1}) - m(L_k)| of the means
    int exclusions = 0;
    std::vector<std::string> exclusion_log;
};

// Fixed horizon, increasing depth, one shared smooth random initial path per
// seed sampled at each depth so runs are comparable across L.
DepthResult depth_refinement(const DepthExperimentConfig& cfg);

struct ActCompareConfig {
    std::vector<ArchSpec> archs{{1.0, 4}};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    DatasetSpec base;
    TrainConfig train;
    LossKind loss = LossKind::cross_entropy;
    int student_m = 8;
    double slope_a = 1.0;
    double slope_b = 0.05;
    double alpha0 = 0.0;
    double beta0 = 0.0;
    // true: second arm trains (alpha, beta) from (alpha0, beta0);
    // false: second arm keeps them fixed at (alpha0, beta0).
    bool learnable = true;
    int late_window = 10;
    double init_scale = 0.5;
};

struct ActCompareCurveRow {
    double T = 1.0;
    int L = 1;
    std::uint64_t seed = 0;
    int epoch = 0;
    double gap_fixed = 0.0;
    double gap_learnable = 0.0;
    double alpha = 0.0;  // learned edges after this epoch's final step
    double beta = 0.0;
};

struct ActCompareResult {
    std::vector<ActCompareCurveRow> curves;
    double late_gap_fixed = 0.0;      // late-window mean across runs
    double late_gap_learnable = 0.0;
    int exclusions = 0;
    std::vector<std::string> exclusion_log;
};

// Matched pairs (same seed, data, init); one arm fixes the dead-zone edges,
// the other trains them with a nonnegativity projection.
ActCompareResult activation_comparison(const ActCompareConfig& cfg);

struct ConvergenceResult {
    std::vector<int> l_grid;
    std::vector<double> errors;  // sup over layers, sub-grid times and inputs
    std::optional<double> slope;  // log-log slope vs tau; absent for zero error
};

// Samples the path at each depth, runs the layer recursion, and compares
// against the rk4 reference on a per-interval sub-grid.
ConvergenceResult convergence_rate_study(const ContinuousParams& path,
                                         const ActivationSpec& act,
                                         const std::vector<Eigen::VectorXd>& d_set,
                                         const std::vector<int>& l_grid,
                                         int reference_steps = 4096, int subgrid = 16);

}  // namespace resflow
