#include "resflow/experiments.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "resflow/rng.hpp"
#include "resflow/util.hpp"

namespace resflow {

namespace {

// Runs jobs 0..total-1 on up to thread_budget() workers; each job writes only
// its own slot, so the merged output is schedule-independent.
void run_jobs(size_t total, const std::function<void(size_t)>& job) {
    const unsigned workers =
        std::min<unsigned>(thread_budget(), static_cast<unsigned>(std::max<size_t>(total, 1)));
    if (workers <= 1) {
        for (size_t i = 0; i < total; ++i) job(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= total) return;
                job(i);
            }
        }));
    }
    for (auto& f : futures) f.get();
}

Eigen::MatrixXd scaled_uniform(int rows, int cols, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double s = scale / std::sqrt(static_cast<double>(cols));
    Eigen::MatrixXd mat(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) mat(i, j) = s * unit(rng);
    return mat;
}

double window_mean(const TrainLog& log, int window, bool test) {
    const int k = std::min<int>(window, static_cast<int>(log.size()));
    double sum = 0.0;
    for (int i = static_cast<int>(log.size()) - k; i < static_cast<int>(log.size()); ++i)
        sum += test ? log[static_cast<size_t>(i)].test_loss
                    : log[static_cast<size_t>(i)].train_loss;
    return sum / static_cast<double>(k);
}

NetDims dims_from_data(const Dataset& data, int m, double T, int L) {
    NetDims dims;
    dims.n_d = static_cast<int>(data.front().d.size());
    dims.n = static_cast<int>(data.front().g.size());
    dims.m = m;
    dims.T = T;
    dims.L = L;
    return dims;
}

}  // namespace

DiscreteParams init_discrete_params(const NetDims& dims, double scale, std::uint64_t seed) {
    if (dims.L < 1) throw std::invalid_argument("L = 0: discretization step undefined");
    auto rng = make_rng(derive_seed(seed, stream::init));
    DiscreteParams params;
    params.horizon = dims.T;
    params.pre.U = scaled_uniform(dims.n, dims.n_d, scale, rng);
    params.pre.a = scaled_uniform(dims.n, 1, scale, rng).col(0);
    for (int l = 0; l < dims.L; ++l) {
        LayerParams lp;
        lp.V = scaled_uniform(dims.m, dims.n, scale, rng);
        lp.W = scaled_uniform(dims.n, dims.m, scale, rng);
        lp.b = scaled_uniform(dims.m, 1, scale, rng).col(0);
        lp.c = scaled_uniform(dims.n, 1, scale, rng).col(0);
        params.layers.push_back(std::move(lp));
    }
    return params;
}

GapResult gap_vs_samples(const GapExperimentConfig& cfg) {
    if (cfg.s_grid.size() < 3)
        throw std::invalid_argument("gap-vs-S needs at least 3 sample sizes");
    for (size_t i = 1; i < cfg.s_grid.size(); ++i)
        if (cfg.s_grid[i] <= cfg.s_grid[i - 1])
            throw std::invalid_argument("gap-vs-S sample sizes must be ascending");
    if (cfg.archs.empty() || cfg.seeds.empty())
        throw std::invalid_argument("gap-vs-S needs at least one arch and one seed");

    const ActivationSpec act = catalog("Tanh");
    const LossSpec loss = make_loss(cfg.loss);
    const size_t n_arch = cfg.archs.size();
    const size_t n_s = cfg.s_grid.size();
    const size_t n_seed = cfg.seeds.size();
    const size_t total = n_arch * n_s * n_seed;

    struct Slot {
        bool ok = false;
        GapRecord record;
        std::string error;
    };
    std::vector<Slot> slots(total);

    run_jobs(total, [&](size_t idx) {
        const size_t a = idx / (n_s * n_seed);
        const size_t si = (idx / n_seed) % n_s;
        const size_t ki = idx % n_seed;
        const auto [T, L] = cfg.archs[a];
        const long S = cfg.s_grid[si];
        const std::uint64_t seed = cfg.seeds[ki];

        Slot& slot = slots[idx];
        slot.record.T = T;
        slot.record.L = L;
        slot.record.S = S;
        slot.record.seed = seed;
        try {
            DatasetSpec ds = cfg.base;
            ds.s_train = static_cast<int>(S);
            // The draw seed ignores S: sample streams are sequential, so the
            // training sets are nested across the S grid for a fixed seed.
            ds.seed = derive_seed(cfg.base.seed, stream::experiment_job, seed);
            const auto data = generate_dataset(ds);
            const auto dims = dims_from_data(data.train, cfg.student_m, T, L);
            const auto init = init_discrete_params(
                dims, cfg.init_scale, derive_seed(cfg.train.seed, stream::init, a, seed));
            TrainConfig tcfg = cfg.train;
            tcfg.seed = derive_seed(cfg.train.seed, stream::experiment_job, idx);
            const auto trained = sgd_train(init, act, loss, data.train, tcfg, &data.test);
            slot.record.train_loss = window_mean(trained.log, cfg.window, false);
            slot.record.test_loss = window_mean(trained.log, cfg.window, true);
            slot.record.gap = slot.record.test_loss - slot.record.train_loss;
            slot.ok = true;
        } catch (const std::exception& ex) {
            slot.error = "arch=(" + std::to_string(T) + "," + std::to_string(L) +
                         ") S=" + std::to_string(S) + " seed=" + std::to_string(seed) + ": " +
                         ex.what();
        }
    });

    GapResult result;
    for (const auto& slot : slots) {
        if (slot.ok)
            result.records.push_back(slot.record);
        else {
            ++result.exclusions;
            result.exclusion_log.push_back(slot.error);
        }
    }
    for (size_t a = 0; a < n_arch; ++a) {
        std::vector<double> mean_gap;
        std::vector<double> s_values;
        for (size_t si = 0; si < n_s; ++si) {
            double sum = 0.0;
            int count = 0;
            for (size_t ki = 0; ki < n_seed; ++ki) {
                const Slot& slot = slots[a * n_s * n_seed + si * n_seed + ki];
                if (slot.ok) {
                    sum += slot.record.gap;
                    ++count;
                }
            }
            if (count > 0) {
                mean_gap.push_back(sum / count);
                s_values.push_back(static_cast<double>(cfg.s_grid[si]));
            }
        }
        result.mean_gaps.push_back(mean_gap);
        result.fits.push_back(fit_inverse_sqrt(s_values, mean_gap));
        result.spearman_by_arch.push_back(spearman(s_values, mean_gap));
    }
    return result;
}

DepthResult depth_refinement(const DepthExperimentConfig& cfg) {
    if (cfg.l_grid.empty()) throw std::invalid_argument("depth study needs a depth grid");
    for (size_t i = 1; i < cfg.l_grid.size(); ++i)
        if (cfg.l_grid[i] <= cfg.l_grid[i - 1])
            throw std::invalid_argument("depth grid must be ascending");

    const ActivationSpec act = catalog("Tanh");
    const LossSpec loss = make_loss(cfg.loss);
    const size_t n_l = cfg.l_grid.size();
    const size_t n_seed = cfg.seeds.size();
    const size_t total = n_l * n_seed;

    struct Slot {
        bool ok = false;
        DepthRecord record;
        std::string error;
    };
    std::vector<Slot> slots(total);

    run_jobs(total, [&](size_t idx) {
        const size_t li = idx / n_seed;
        const size_t ki = idx % n_seed;
        const int L = cfg.l_grid[li];
        const std::uint64_t seed = cfg.seeds[ki];
        Slot& slot = slots[idx];
        slot.record.L = L;
        slot.record.seed = seed;
        try {
            DatasetSpec ds = cfg.base;
            ds.seed = derive_seed(cfg.base.seed, stream::experiment_job, 1, seed);
            const auto data = generate_dataset(ds);
            const auto dims = dims_from_data(data.train, cfg.student_m, cfg.T, L);
            // One continuous initial path per seed, sampled at each depth.
            ContinuousParams shared = random_fourier_params(
                dims, ParamBudget{cfg.init_b_theta, kDataBound},
                derive_seed(cfg.train.seed, stream::init, 7, seed));
            const auto init = sample_params(shared, L);
            TrainConfig tcfg = cfg.train;
            tcfg.seed = derive_seed(cfg.train.seed, stream::experiment_job, idx);
            const auto trained = sgd_train(init, act, loss, data.train, tcfg, &data.test);
            slot.record.final_train = window_mean(trained.log, cfg.window, false);
            slot.record.final_test = window_mean(trained.log, cfg.window, true);
            slot.ok = true;
        } catch (const std::exception& ex) {
            slot.error = "L=" + std::to_string(L) + " seed=" + std::to_string(seed) + ": " +
                         ex.what();
        }
    });

    DepthResult result;
    for (const auto& slot : slots) {
        if (slot.ok)
            result.records.push_back(slot.record);
        else {
            ++result.exclusions;
            result.exclusion_log.push_back(slot.error);
        }
    }
    for (size_t li = 0; li < n_l; ++li) {
        double sum = 0.0;
        int count = 0;
        for (size_t ki = 0; ki < n_seed; ++ki) {
            const Slot& slot = slots[li * n_seed + ki];
            if (slot.ok) {
                sum += slot.record.final_train;
                ++count;
            }
        }
        result.mean_final_train.push_back(count > 0
                                              ? sum / count
                                              : std::numeric_limits<double>::quiet_NaN());
    }
    for (size_t li = 0; li + 1 < n_l; ++li)
        result.diffs.push_back(
            std::abs(result.mean_final_train[li + 1] - result.mean_final_train[li]));
    return result;
}

ActCompareResult activation_comparison(const ActCompareConfig& cfg) {
    if (cfg.archs.empty() || cfg.seeds.empty())
        throw std::invalid_argument("activation comparison needs archs and seeds");
    const LossSpec loss = make_loss(cfg.loss);
    const size_t total = cfg.archs.size() * cfg.seeds.size();

    struct Slot {
        bool ok = false;
        std::vector<ActCompareCurveRow> rows;
        double late_fixed = 0.0;
        double late_learn = 0.0;
        std::string error;
    };
    std::vector<Slot> slots(total);

    run_jobs(total, [&](size_t idx) {
        const size_t a = idx / cfg.seeds.size();
        const size_t ki = idx % cfg.seeds.size();
        const auto [T, L] = cfg.archs[a];
        const std::uint64_t seed = cfg.seeds[ki];
        Slot& slot = slots[idx];
        try {
            DatasetSpec ds = cfg.base;
            ds.seed = derive_seed(cfg.base.seed, stream::experiment_job, 2, seed);
            const auto data = generate_dataset(ds);
            const auto dims = dims_from_data(data.train, cfg.student_m, T, L);
            const auto init = init_discrete_params(
                dims, cfg.init_scale, derive_seed(cfg.train.seed, stream::init, a, seed));
            TrainConfig tcfg = cfg.train;
            tcfg.seed = derive_seed(cfg.train.seed, stream::experiment_job, idx);

            // Baseline arm: leaky slopes with no dead zone.
            const ActivationSpec base_act =
                catalog("DeadZoneLeaky", {cfg.slope_a, cfg.slope_b, 0.0, 0.0});
            const auto arm_fixed = sgd_train(init, base_act, loss, data.train, tcfg, &data.test);
            TrainResult arm_other;
            if (cfg.learnable) {
                arm_other = sgd_train_learnable_deadzone(init, cfg.slope_a, cfg.slope_b,
                                                         cfg.alpha0, cfg.beta0, loss, data.train,
                                                         tcfg, &data.test);
            } else {
                const ActivationSpec other_act = catalog(
                    "DeadZoneLeaky", {cfg.slope_a, cfg.slope_b, cfg.alpha0, cfg.beta0});
                arm_other = sgd_train(init, other_act, loss, data.train, tcfg, &data.test);
            }

            for (size_t e = 0; e < arm_fixed.log.size(); ++e) {
                ActCompareCurveRow row;
                row.T = T;
                row.L = L;
                row.seed = seed;
                row.epoch = static_cast<int>(e);
                row.gap_fixed = arm_fixed.log[e].test_loss - arm_fixed.log[e].train_loss;
                row.gap_learnable = arm_other.log[e].test_loss - arm_other.log[e].train_loss;
                row.alpha = cfg.learnable ? arm_other.deadzone_history[e].first : cfg.alpha0;
                row.beta = cfg.learnable ? arm_other.deadzone_history[e].second : cfg.beta0;
                slot.rows.push_back(row);
            }
            const int k = std::min<int>(cfg.late_window, static_cast<int>(slot.rows.size()));
            double sf = 0.0, sl = 0.0;
            for (int e = static_cast<int>(slot.rows.size()) - k;
                 e < static_cast<int>(slot.rows.size()); ++e) {
                sf += slot.rows[static_cast<size_t>(e)].gap_fixed;
                sl += slot.rows[static_cast<size_t>(e)].gap_learnable;
            }
            slot.late_fixed = sf / k;
            slot.late_learn = sl / k;
            slot.ok = true;
        } catch (const std::exception& ex) {
            slot.error = "arch=(" + std::to_string(T) + "," + std::to_string(L) +
                         ") seed=" + std::to_string(seed) + ": " + ex.what();
        }
    });

    ActCompareResult result;
    double sf = 0.0, sl = 0.0;
    int ok_count = 0;
    for (const auto& slot : slots) {
        if (slot.ok) {
            result.curves.insert(result.curves.end(), slot.rows.begin(), slot.rows.end());
            sf += slot.late_fixed;
            sl += slot.late_learn;
            ++ok_count;
        } else {
            ++result.exclusions;
            result.exclusion_log.push_back(slot.error);
        }
    }
    if (ok_count > 0) {
        result.late_gap_fixed = sf / ok_count;
        result.late_gap_learnable = sl / ok_count;
    }
    return result;
}

ConvergenceResult convergence_rate_study(const ContinuousParams& path,
                                         const ActivationSpec& act,
                                         const std::vector<Eigen::VectorXd>& d_set,
                                         const std::vector<int>& l_grid, int reference_steps,
                                         int subgrid) {
    if (l_grid.size() < 1) throw std::invalid_argument("convergence study needs a depth grid");
    if (d_set.empty()) throw std::invalid_argument("convergence study needs inputs");
    const double T = path.horizon;

    std::vector<StateTrajectory> refs;
    refs.reserve(d_set.size());
    for (const auto& d : d_set)
        refs.push_back(continuous_flow(path, act, d, Integrator::rk4, reference_steps));

    ConvergenceResult result;
    result.l_grid = l_grid;
    const double h_ref = T / static_cast<double>(reference_steps);
    for (int L : l_grid) {
        const DiscreteParams disc = sample_params(path, L);
        double worst = 0.0;
        for (size_t di = 0; di < d_set.size(); ++di) {
            const auto traj = discrete_forward(disc, act, d_set[di]);
            for (int l = 1; l <= L; ++l) {
                for (int j = 1; j <= subgrid; ++j) {
                    const double t = (static_cast<double>(l - 1) +
                                      static_cast<double>(j) / subgrid) *
                                     T / static_cast<double>(L);
                    auto k = static_cast<size_t>(std::llround(t / h_ref));
                    k = std::min<size_t>(k, refs[di].states.size() - 1);
                    const double err = (traj.states[static_cast<size_t>(l)] -
                                        refs[di].states[k])
                                           .cwiseAbs()
                                           .maxCoeff();
                    worst = std::max(worst, err);
                }
            }
        }
        result.errors.push_back(worst);
    }

    bool all_zero = true;
    for (double e : result.errors)
        if (e > 0.0) all_zero = false;
    if (!all_zero && result.errors.size() >= 2) {
        std::vector<double> log_tau, log_err;
        for (size_t i = 0; i < result.errors.size(); ++i) {
            if (result.errors[i] <= 0.0) continue;
            log_tau.push_back(std::log(T / static_cast<double>(l_grid[i])));
            log_err.push_back(std::log(result.errors[i]));
        }
        if (log_tau.size() >= 2) result.slope = linear_slope(log_tau, log_err);
    }
    return result;
}

}  // namespace resflow
