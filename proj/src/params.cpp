#include "resflow/params.hpp"

#include <cmath>
#include <stdexcept>

#include "resflow/rng.hpp"

namespace resflow {

void validate(const ParamBudget& budget) {
    if (!(budget.b_theta > 0.0) || !(budget.b_in > 0.0))
        throw std::invalid_argument("param budget entries must be strictly positive");
}

double block_inf_norm(const Eigen::MatrixXd& mat) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        worst = std::max(worst, mat.row(i).cwiseAbs().sum());
    return worst;
}

double block_inf_norm(const Eigen::VectorXd& vec) {
    return vec.size() == 0 ? 0.0 : vec.cwiseAbs().maxCoeff();
}

double layer_inf_norm(const LayerParams& layer) {
    return std::max(std::max(block_inf_norm(layer.V), block_inf_norm(layer.W)),
                    std::max(block_inf_norm(layer.b), block_inf_norm(layer.c)));
}

void validate(const DiscreteParams& params) {
    if (params.layers.empty()) throw std::invalid_argument("L = 0: discretization step undefined");
    if (!(params.horizon > 0.0)) throw std::invalid_argument("horizon T must be positive");
    const int n = params.n();
    const int m = params.m();
    if (params.pre.a.size() != n) throw std::invalid_argument("preprocess bias dimension mismatch");
    for (const auto& layer : params.layers) {
        if (layer.V.rows() != m || layer.V.cols() != n || layer.W.rows() != n ||
            layer.W.cols() != m || layer.b.size() != m || layer.c.size() != n)
            throw std::invalid_argument("layer parameter dimension mismatch");
    }
}

double param_inf_norm(const DiscreteParams& params) {
    double worst = std::max(block_inf_norm(params.pre.U), block_inf_norm(params.pre.a));
    for (const auto& layer : params.layers) worst = std::max(worst, layer_inf_norm(layer));
    return worst;
}

PiecewiseConstantPath::PiecewiseConstantPath(std::vector<LayerParams> layers, double horizon)
    : layers_(std::move(layers)), horizon_(horizon) {
    if (layers_.empty()) throw std::invalid_argument("piecewise-constant path needs >= 1 piece");
    if (!(horizon_ > 0.0)) throw std::invalid_argument("horizon T must be positive");
}

LayerParams PiecewiseConstantPath::at(double t) const {
    const auto L = static_cast<std::ptrdiff_t>(layers_.size());
    auto knot = [&](std::ptrdiff_t k) { return static_cast<double>(k) * horizon_ / static_cast<double>(L); };
    std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(std::floor(t * static_cast<double>(L) / horizon_));
    idx = std::clamp<std::ptrdiff_t>(idx, 0, L - 1);
    // Knot comparisons use the same expression l*T/L that produced sampling
    // times, so sample(extend(params)) round-trips exactly.
    while (idx > 0 && t < knot(idx)) --idx;
    while (idx + 1 < L && t >= knot(idx + 1)) ++idx;
    return layers_[static_cast<size_t>(idx)];
}

int PiecewiseConstantPath::n() const { return static_cast<int>(layers_.front().W.rows()); }
int PiecewiseConstantPath::m() const { return static_cast<int>(layers_.front().V.rows()); }

namespace {

LayerParams zero_layer(int n, int m) {
    LayerParams lp;
    lp.V = Eigen::MatrixXd::Zero(m, n);
    lp.W = Eigen::MatrixXd::Zero(n, m);
    lp.b = Eigen::VectorXd::Zero(m);
    lp.c = Eigen::VectorXd::Zero(n);
    return lp;
}

Eigen::MatrixXd uniform_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd mat(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) mat(i, j) = unit(rng);
    return mat;
}

// Rescales rows whose l1 sum exceeds the cap, leaving others untouched.
void cap_rows(Eigen::MatrixXd& mat, double cap) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        double s = mat.row(i).cwiseAbs().sum();
        if (s > cap) mat.row(i) *= cap / s;
    }
}

}  // namespace

FourierPath::FourierPath(int n, int m, double horizon, double b_theta, std::uint64_t seed,
                         int modes)
    : n_(n), m_(m), horizon_(horizon) {
    if (modes < 1) throw std::invalid_argument("fourier path needs >= 1 mode");
    auto rng = make_rng(derive_seed(seed, stream::fourier_path));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    double amp_sum = 0.0;   // bound on sup_t blockwise norm
    double damp_sum = 0.0;  // bound on sup_t blockwise norm of the derivative
    for (int k = 0; k < modes; ++k) {
        omega_.push_back(static_cast<double>(k + 1) * M_PI / horizon_);
        phase_.push_back(phase(rng));
        LayerParams lp;
        lp.V = uniform_matrix(m, n, rng);
        lp.W = uniform_matrix(n, m, rng);
        lp.b = uniform_matrix(m, 1, rng).col(0);
        lp.c = uniform_matrix(n, 1, rng).col(0);
        double a = layer_inf_norm(lp);
        amp_sum += a;
        damp_sum += omega_.back() * a;
        coeff_.push_back(std::move(lp));
    }
    // sup |path| <= amp_sum and the H1 norm <= sqrt(T (amp_sum^2 + damp_sum^2)),
    // so one global scale keeps both within b_theta.
    double h1_bound = std::sqrt(horizon_ * (amp_sum * amp_sum + damp_sum * damp_sum));
    double scale = b_theta / std::max(amp_sum, h1_bound);
    for (auto& lp : coeff_) {
        lp.V *= scale;
        lp.W *= scale;
        lp.b *= scale;
        lp.c *= scale;
    }
}

LayerParams FourierPath::at(double t) const {
    LayerParams out = zero_layer(n_, m_);
    for (size_t k = 0; k < coeff_.size(); ++k) {
        double s = std::sin(omega_[k] * t + phase_[k]);
        out.V += s * coeff_[k].V;
        out.W += s * coeff_[k].W;
        out.b += s * coeff_[k].b;
        out.c += s * coeff_[k].c;
    }
    return out;
}

GridPath::GridPath(std::vector<LayerParams> samples, double horizon)
    : samples_(std::move(samples)), horizon_(horizon) {
    if (samples_.size() < 2) throw std::invalid_argument("grid path needs >= 2 samples");
    if (!(horizon_ > 0.0)) throw std::invalid_argument("horizon T must be positive");
}

LayerParams GridPath::at(double t) const {
    const auto K = static_cast<std::ptrdiff_t>(samples_.size()) - 1;
    double u = std::clamp(t / horizon_, 0.0, 1.0) * static_cast<double>(K);
    auto k = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(u)), 0, K - 1);
    double w = u - static_cast<double>(k);
    const LayerParams& a = samples_[static_cast<size_t>(k)];
    const LayerParams& b = samples_[static_cast<size_t>(k + 1)];
    LayerParams out;
    out.V = (1.0 - w) * a.V + w * b.V;
    out.W = (1.0 - w) * a.W + w * b.W;
    out.b = (1.0 - w) * a.b + w * b.b;
    out.c = (1.0 - w) * a.c + w * b.c;
    return out;
}

int GridPath::n() const { return static_cast<int>(samples_.front().W.rows()); }
int GridPath::m() const { return static_cast<int>(samples_.front().V.rows()); }

PathNorms path_norms(const ContinuousParams& params, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("path_norms needs >= 2 grid points");
    const double h = params.horizon / static_cast<double>(grid_points - 1);
    PathNorms norms;
    double quad = 0.0;
    LayerParams prev;
    for (int k = 0; k < grid_points; ++k) {
        LayerParams cur = params.path->at(static_cast<double>(k) * params.horizon /
                                          static_cast<double>(grid_points - 1));
        norms.sup_norm = std::max(norms.sup_norm, layer_inf_norm(cur));
        if (k > 0) {
            LayerParams diff;
            diff.V = (cur.V - prev.V) / h;
            diff.W = (cur.W - prev.W) / h;
            diff.b = (cur.b - prev.b) / h;
            diff.c = (cur.c - prev.c) / h;
            double q = layer_inf_norm(diff);
            quad += q * q * h;
        }
        prev = std::move(cur);
    }
    norms.h1_seminorm = std::sqrt(quad);
    return norms;
}

PreprocessParams random_preprocess(int n, int n_d, double b_theta, std::uint64_t seed) {
    auto rng = make_rng(seed);
    PreprocessParams pre;
    pre.U = uniform_matrix(n, n_d, rng) * b_theta;
    cap_rows(pre.U, b_theta);
    pre.a = (uniform_matrix(n, 1, rng) * b_theta).col(0);
    return pre;
}

DiscreteParams random_discrete_params(const NetDims& dims, const ParamBudget& budget,
                                      std::uint64_t seed) {
    validate(budget);
    if (dims.L < 1) throw std::invalid_argument("L = 0: discretization step undefined");
    DiscreteParams params;
    params.horizon = dims.T;
    params.pre = random_preprocess(dims.n, dims.n_d, budget.b_theta, derive_seed(seed, stream::init, 0));
    for (int l = 0; l < dims.L; ++l) {
        auto rng = make_rng(derive_seed(seed, stream::init, 1 + static_cast<std::uint64_t>(l)));
        LayerParams lp;
        lp.V = uniform_matrix(dims.m, dims.n, rng) * budget.b_theta;
        lp.W = uniform_matrix(dims.n, dims.m, rng) * budget.b_theta;
        lp.b = (uniform_matrix(dims.m, 1, rng) * budget.b_theta).col(0);
        lp.c = (uniform_matrix(dims.n, 1, rng) * budget.b_theta).col(0);
        cap_rows(lp.V, budget.b_theta);
        cap_rows(lp.W, budget.b_theta);
        params.layers.push_back(std::move(lp));
    }
    validate(params);
    return params;
}

ContinuousParams random_fourier_params(const NetDims& dims, const ParamBudget& budget,
                                       std::uint64_t seed, int modes) {
    validate(budget);
    ContinuousParams params;
    params.horizon = dims.T;
    params.pre = random_preprocess(dims.n, dims.n_d, budget.b_theta, derive_seed(seed, stream::init, 0));
    params.path = std::make_shared<FourierPath>(dims.n, dims.m, dims.T, budget.b_theta, seed, modes);
    return params;
}

}  // namespace resflow
