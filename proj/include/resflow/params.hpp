#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace resflow {

// Preprocessing layer parameters (U, a): x0 = psi(U d + a).
struct PreprocessParams {
    Eigen::MatrixXd U;  // n x n_d
    Eigen::VectorXd a;  // n
};

// One residual layer (V, W, b, c): x <- x + tau * (W psi(V x + b) + c).
struct LayerParams {
    Eigen::MatrixXd V;  // m x n
    Eigen::MatrixXd W;  // n x m
    Eigen::VectorXd b;  // m
    Eigen::VectorXd c;  // n
};

struct NetDims {
    int n_d = 1;
    int n = 1;
    int m = 1;
    int L = 1;
    double T = 1.0;
};

// Data and parameter budget (B_in, B_Theta). Both strictly positive.
struct ParamBudget {
    double b_theta = 1.0;
    double b_in = 1.0;
};
void validate(const ParamBudget& budget);

// Blockwise norms. Matrices use the induced infinity norm (max row l1 sum),
// vectors the max absolute entry; this is the convention under which the
// state bounds and the layer-wise complexity recursion hold as stated.
double block_inf_norm(const Eigen::MatrixXd& mat);
double block_inf_norm(const Eigen::VectorXd& vec);
double layer_inf_norm(const LayerParams& layer);

// Full set of discrete learnable parameters with horizon T; step tau = T/L.
struct DiscreteParams {
    PreprocessParams pre;
    std::vector<LayerParams> layers;
    double horizon = 1.0;

    int n_d() const { return static_cast<int>(pre.U.cols()); }
    int n() const { return static_cast<int>(pre.U.rows()); }
    int m() const { return layers.empty() ? 0 : static_cast<int>(layers.front().V.rows()); }
    int depth() const { return static_cast<int>(layers.size()); }
    double tau() const { return horizon / static_cast<double>(depth()); }
};
void validate(const DiscreteParams& params);
double param_inf_norm(const DiscreteParams& params);

// Time-indexed parameter path t -> (V(t), W(t), b(t), c(t)).
class ParamPath {
  public:
    virtual ~ParamPath() = default;
    virtual LayerParams at(double t) const = 0;
    virtual int n() const = 0;
    virtual int m() const = 0;
};

// Piecewise-constant extension of discrete layers over [0, T]: value on
// [t_l, t_{l+1}) is layer l; the last interval is closed.
class PiecewiseConstantPath : public ParamPath {
  public:
    PiecewiseConstantPath(std::vector<LayerParams> layers, double horizon);
    LayerParams at(double t) const override;
    int n() const override;
    int m() const override;
    const std::vector<LayerParams>& layers() const { return layers_; }

  private:
    std::vector<LayerParams> layers_;
    double horizon_;
};

// Smooth random path: each block is a 3-mode sinusoid sum, rescaled so both
// the sup norm and the H1 norm are within b_theta analytically.
class FourierPath : public ParamPath {
  public:
    FourierPath(int n, int m, double horizon, double b_theta, std::uint64_t seed,
                int modes = 3);
    LayerParams at(double t) const override;
    int n() const override { return n_; }
    int m() const override { return m_; }

  private:
    int n_, m_;
    double horizon_;
    std::vector<double> omega_, phase_;
    std::vector<LayerParams> coeff_;  // one amplitude bundle per mode
};

// Dense uniform grid with linear interpolation between samples.
class GridPath : public ParamPath {
  public:
    GridPath(std::vector<LayerParams> samples, double horizon);
    LayerParams at(double t) const override;
    int n() const override;
    int m() const override;

  private:
    std::vector<LayerParams> samples_;
    double horizon_;
};

// Continuous-time parameter bundle (Theta_pre, path) on [0, horizon].
struct ContinuousParams {
    PreprocessParams pre;
    std::shared_ptr<const ParamPath> path;
    double horizon = 1.0;
};

struct PathNorms {
    double sup_norm = 0.0;  // sup over t of the blockwise norm
    double h1_seminorm = 0.0;  // quadrature of squared difference quotients
};
// Evaluates the path on a uniform grid; the H1 seminorm is the square root of
// the quadrature sum of squared difference quotients of the blockwise norm.
PathNorms path_norms(const ContinuousParams& params, int grid_points = 2048);

// Layer- or time-indexed states for one input.
struct StateTrajectory {
    std::vector<Eigen::VectorXd> states;
    std::vector<double> times;
};

// Uniform random parameters within the budget: vector entries uniform in
// [-b_theta, b_theta], matrix rows drawn uniform then rescaled to row l1 sums
// <= b_theta, so param_inf_norm(result) <= b_theta holds by construction.
DiscreteParams random_discrete_params(const NetDims& dims, const ParamBudget& budget,
                                      std::uint64_t seed);
PreprocessParams random_preprocess(int n, int n_d, double b_theta, std::uint64_t seed);
ContinuousParams random_fourier_params(const NetDims& dims, const ParamBudget& budget,
                                       std::uint64_t seed, int modes = 3);

}  // namespace resflow
