#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "resflow/bounds.hpp"
#include "resflow/config.hpp"
#include "resflow/experiments.hpp"
#include "resflow/io.hpp"
#include "resflow/rademacher.hpp"
#include "resflow/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using resflow::RunConfig;

struct CliOptions {
    std::string config_path;
    std::string output_dir;
    std::string seed_override;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

RunConfig load_config(const std::string& command, const CliOptions& opts) {
    RunConfig cfg = resflow::parse_config(slurp(opts.config_path), command);
    if (!opts.output_dir.empty()) cfg.values["output_dir"] = opts.output_dir;
    if (!opts.seed_override.empty()) cfg.values["seed"] = opts.seed_override;
    return cfg;
}

fs::path prepare_output(const RunConfig& cfg) {
    fs::path dir = resflow::cfg_string(cfg, "output_dir", "out/" + cfg.command);
    fs::create_directories(dir);
    return dir;
}

resflow::ActivationSpec activation_from(const RunConfig& cfg, const std::string& fallback) {
    const auto name = resflow::cfg_string(cfg, "activation", fallback);
    const auto params = resflow::cfg_double_list(cfg, "activation_params",
                                                 std::vector<double>{});
    return resflow::catalog(name, params);
}

resflow::DatasetSpec dataset_from(const RunConfig& cfg) {
    resflow::DatasetSpec spec;
    spec.kind = resflow::dataset_kind_from_string(
        resflow::cfg_string(cfg, "dataset", "teacher_net"));
    spec.s_train = static_cast<int>(resflow::cfg_long(cfg, "s_train", 512));
    spec.s_test = static_cast<int>(resflow::cfg_long(cfg, "s_test", 1024));
    spec.seed = static_cast<std::uint64_t>(resflow::cfg_long(cfg, "seed", 0));
    spec.task_seed = static_cast<std::uint64_t>(resflow::cfg_long(cfg, "task_seed", 0));
    spec.teacher_dims.n_d = static_cast<int>(resflow::cfg_long(cfg, "teacher_nd", 3));
    spec.teacher_dims.n = static_cast<int>(resflow::cfg_long(cfg, "teacher_n", 2));
    spec.teacher_dims.m = static_cast<int>(resflow::cfg_long(cfg, "teacher_m", 6));
    spec.teacher_dims.L = static_cast<int>(resflow::cfg_long(cfg, "teacher_l", 3));
    spec.teacher_dims.T = resflow::cfg_double(cfg, "teacher_t", 1.0);
    spec.teacher_b_theta = resflow::cfg_double(cfg, "teacher_b_theta", 0.2);
    spec.teacher_classify = resflow::cfg_bool(cfg, "teacher_classify", false);
    spec.classes = static_cast<int>(resflow::cfg_long(cfg, "mixture_classes", 2));
    spec.input_dim = static_cast<int>(resflow::cfg_long(cfg, "input_dim", 2));
    spec.mixture_sigma = resflow::cfg_double(cfg, "mixture_sigma", 0.25);
    spec.moons_noise = resflow::cfg_double(cfg, "moons_noise", 0.08);
    spec.images_path = resflow::cfg_string(cfg, "images_path", "");
    spec.labels_path = resflow::cfg_string(cfg, "labels_path", "");
    {
        auto classes = resflow::cfg_long_list(cfg, "classes", std::vector<long>{0, 1});
        spec.class_list.assign(classes.begin(), classes.end());
    }
    spec.per_class_limit = static_cast<int>(resflow::cfg_long(cfg, "per_class_limit", 2000));
    if (spec.kind == resflow::DatasetKind::mnist_subset) {
        if (!fs::exists(spec.images_path))
            throw std::invalid_argument("images_path does not exist: " + spec.images_path);
        if (!fs::exists(spec.labels_path))
            throw std::invalid_argument("labels_path does not exist: " + spec.labels_path);
    }
    return spec;
}

resflow::TrainConfig train_from(const RunConfig& cfg) {
    resflow::TrainConfig tc;
    tc.lr = resflow::cfg_double(cfg, "lr", 0.01);
    tc.momentum = resflow::cfg_double(cfg, "momentum", 0.9);
    tc.epochs = static_cast<int>(resflow::cfg_long(cfg, "epochs", 30));
    tc.batch_size = static_cast<int>(resflow::cfg_long(cfg, "batch_size", 32));
    tc.seed = static_cast<std::uint64_t>(resflow::cfg_long(cfg, "seed", 0));
    if (resflow::cfg_has(cfg, "projection"))
        tc.projection = resflow::cfg_double(cfg, "projection");
    return tc;
}

std::vector<std::uint64_t> seeds_from(const RunConfig& cfg) {
    auto raw = resflow::cfg_long_list(cfg, "seeds", std::vector<long>{0, 1, 2, 3, 4});
    std::vector<std::uint64_t> out;
    for (long v : raw) out.push_back(static_cast<std::uint64_t>(v));
    return out;
}

void finish(const fs::path& dir, std::vector<std::string> files, json summary) {
    summary["files"] = files;
    resflow::write_text(dir / "summary.json", summary.dump(2) + "\n");
    files.push_back("summary.json");
    resflow::write_manifest(dir, files);
    std::cout << "wrote " << files.size() + 1 << " files to " << dir.string() << "\n";
}

void run_catalog(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    const auto spec = resflow::catalog(
        resflow::cfg_string(cfg, "name"),
        resflow::cfg_double_list(cfg, "params", std::vector<double>{}));
    const double lo = resflow::cfg_double(cfg, "grid_min", -10.0);
    const double hi = resflow::cfg_double(cfg, "grid_max", 10.0);
    const long points = resflow::cfg_long(cfg, "grid_points", 1001);
    std::vector<resflow::CsvRow> rows;
    for (long i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        rows.push_back({x, spec(x), spec.deriv(x)});
    }
    resflow::write_csv(dir / "activation.csv", {"x", "psi", "dpsi"}, rows);
    finish(dir, {"activation.csv"},
           json{{"name", spec.name},
                {"lip", spec.lip()},
                {"alpha", spec.alpha},
                {"beta", spec.beta},
                {"structural_coeff", spec.structural_coeff()}});
}

void write_trajectory(const fs::path& path, const resflow::StateTrajectory& traj) {
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 0; i < traj.states.front().size(); ++i)
        header.push_back("x" + std::to_string(i));
    std::vector<resflow::CsvRow> rows;
    for (size_t k = 0; k < traj.states.size(); ++k) {
        resflow::CsvRow row{traj.times[k]};
        for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) row.push_back(traj.states[k][i]);
        rows.push_back(std::move(row));
    }
    resflow::write_csv(path, header, rows);
}

void run_forward(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    const auto act = activation_from(cfg, "ReLU");
    const auto input_raw = resflow::cfg_double_list(cfg, "input");
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(input_raw.data(),
                                                          static_cast<Eigen::Index>(input_raw.size()));
    resflow::DiscreteParams params;
    if (resflow::cfg_has(cfg, "params_file")) {
        const auto file = resflow::cfg_string(cfg, "params_file");
        if (!fs::exists(file)) throw std::invalid_argument("params_file does not exist: " + file);
        params = resflow::load_params_binary(file);
    } else {
        resflow::NetDims dims;
        dims.n_d = static_cast<int>(resflow::cfg_long(cfg, "n_d", 2));
        dims.n = static_cast<int>(resflow::cfg_long(cfg, "n", 2));
        dims.m = static_cast<int>(resflow::cfg_long(cfg, "m", 4));
        dims.L = static_cast<int>(resflow::cfg_long(cfg, "l", 4));
        dims.T = resflow::cfg_double(cfg, "t", 1.0);
        const double b_theta = resflow::cfg_double(cfg, "b_theta", 1.0);
        params = resflow::random_discrete_params(
            dims, resflow::ParamBudget{b_theta, resflow::kDataBound},
            static_cast<std::uint64_t>(resflow::cfg_long(cfg, "seed", 0)));
        resflow::save_params_binary(params, dir / "params.bin");
    }
    const auto traj = resflow::discrete_forward(params, act, d);
    write_trajectory(dir / "trajectory.csv", traj);
    std::vector<std::string> files{"trajectory.csv"};
    if (!resflow::cfg_has(cfg, "params_file")) files.push_back("params.bin");
    json final_state = json::array();
    for (Eigen::Index i = 0; i < traj.states.back().size(); ++i)
        final_state.push_back(traj.states.back()[i]);
    finish(dir, files,
           json{{"n_d", params.n_d()},
                {"n", params.n()},
                {"m", params.m()},
                {"L", params.depth()},
                {"T", params.horizon},
                {"param_inf_norm", resflow::param_inf_norm(params)},
                {"final_state", final_state}});
}

void run_flow(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    const auto act = activation_from(cfg, "ReLU");
    const auto input_raw = resflow::cfg_double_list(cfg, "input");
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(input_raw.data(),
                                                          static_cast<Eigen::Index>(input_raw.size()));
    resflow::NetDims dims;
    dims.n_d = static_cast<int>(resflow::cfg_long(cfg, "n_d", 2));
    dims.n = static_cast<int>(resflow::cfg_long(cfg, "n", 2));
    dims.m = static_cast<int>(resflow::cfg_long(cfg, "m", 4));
    dims.T = resflow::cfg_double(cfg, "t", 1.0);
    const double b_theta = resflow::cfg_double(cfg, "b_theta", 1.0);
    const int modes = static_cast<int>(resflow::cfg_long(cfg, "modes", 3));
    const auto params = resflow::random_fourier_params(
        dims, resflow::ParamBudget{b_theta, resflow::kDataBound},
        static_cast<std::uint64_t>(resflow::cfg_long(cfg, "seed", 0)), modes);
    const auto integrator_name = resflow::cfg_string(cfg, "integrator", "rk4");
    resflow::Integrator integrator;
    if (integrator_name == "euler")
        integrator = resflow::Integrator::euler;
    else if (integrator_name == "rk4")
        integrator = resflow::Integrator::rk4;
    else
        throw std::invalid_argument("key 'integrator': expected euler or rk4");
    const int steps = static_cast<int>(resflow::cfg_long(cfg, "steps", 256));
    const auto traj = resflow::continuous_flow(params, act, d, integrator, steps);
    write_trajectory(dir / "trajectory.csv", traj);
    const auto norms = resflow::path_norms(params);
    json final_state = json::array();
    for (Eigen::Index i = 0; i < traj.states.back().size(); ++i)
        final_state.push_back(traj.states.back()[i]);
    finish(dir, {"trajectory.csv"},
           json{{"integrator", integrator_name},
                {"steps", steps},
                {"path_sup_norm", norms.sup_norm},
                {"path_h1_seminorm", norms.h1_seminorm},
                {"final_state", final_state}});
}

void run_rademacher(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    const int functions = static_cast<int>(resflow::cfg_long(cfg, "functions", 8));
    const int samples = static_cast<int>(resflow::cfg_long(cfg, "samples"));
    const double scale = resflow::cfg_double(cfg, "scale", 1.0);
    const auto seed = static_cast<std::uint64_t>(resflow::cfg_long(cfg, "seed", 0));

    resflow::EvaluatedClass cls;
    cls.values.resize(functions, samples);
    auto rng = resflow::make_rng(resflow::derive_seed(seed, resflow::stream::random_class));
    std::uniform_real_distribution<double> unit(-scale, scale);
    for (int j = 0; j < functions; ++j)
        for (int s = 0; s < samples; ++s) cls.values(j, s) = unit(rng);

    json summary{{"S", samples}, {"functions", functions}, {"scale", scale}};
    const auto estimator = resflow::cfg_string(cfg, "estimator", "exact");
    if (estimator == "exact") {
        const auto est = resflow::rademacher_exact(cls);
        summary["estimate"] = {{"value", est.value}, {"kind", "exact"}};
    } else if (estimator == "mc") {
        const long draws = resflow::cfg_long(cfg, "draws", 10000);
        const auto est = resflow::rademacher_mc(cls, draws, seed);
        summary["estimate"] = {{"value", est.value},
                               {"kind", "monte_carlo"},
                               {"draws", est.draws},
                               {"half_width", est.half_width}};
    } else {
        throw std::invalid_argument("key 'estimator': expected exact or mc");
    }
    std::vector<std::string> files;
    if (resflow::cfg_has(cfg, "activation")) {
        const auto act = activation_from(cfg, "ReLU");
        const auto report = resflow::contraction_check(cls, act);
        json rep{{"S", report.samples},
                 {"activation", report.activation},
                 {"r_g", report.r_g},
                 {"r_psi_g", report.r_psi_g},
                 {"slack", report.slack},
                 {"bound_on_C", report.bound_on_c}};
        if (report.implied_c)
            rep["implied_C"] = *report.implied_c;
        else
            rep["implied_C"] = nullptr;
        resflow::write_text(dir / "contraction.json", rep.dump(2) + "\n");
        files.push_back("contraction.json");
    }
    finish(dir, files, summary);
}

void run_example33(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    resflow::SoftThresholdClassSpec spec;
    spec.samples = static_cast<int>(resflow::cfg_long(cfg, "s"));
    spec.eta = resflow::cfg_double(cfg, "eta");
    spec.gamma = resflow::cfg_double(cfg, "gamma");
    spec.alpha = resflow::cfg_double(cfg, "alpha");
    spec.beta = resflow::cfg_double(cfg, "beta");
    const auto closed = resflow::example33_closed_form(spec);
    const auto brute = resflow::example33_bruteforce(spec);
    finish(dir, {},
           json{{"S", spec.samples},
                {"eta", spec.eta},
                {"gamma", spec.gamma},
                {"alpha", spec.alpha},
                {"beta", spec.beta},
                {"closed_form", {{"r_g", closed.r_g}, {"r_psi_g", closed.r_psi_g}}},
                {"brute_force", {{"r_g", brute.r_g}, {"r_psi_g", brute.r_psi_g}}},
                {"max_discrepancy",
                 std::max(std::abs(closed.r_g - brute.r_g),
                          std::abs(closed.r_psi_g - brute.r_psi_g))}});
}

void run_bounds(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    const auto mode = resflow::cfg_string(cfg, "mode");
    resflow::BoundInputs inputs;
    inputs.n = static_cast<int>(resflow::cfg_long(cfg, "n", 1));
    inputs.n_d = static_cast<int>(resflow::cfg_long(cfg, "n_d", 2));
    inputs.T = resflow::cfg_double(cfg, "t", 1.0);
    inputs.L = static_cast<int>(resflow::cfg_long(cfg, "l", 1));
    inputs.S = resflow::cfg_long(cfg, "s");
    inputs.delta = resflow::cfg_double(cfg, "delta");
    inputs.budget.b_theta = resflow::cfg_double(cfg, "b_theta", 1.0);
    inputs.budget.b_in = resflow::cfg_double(cfg, "b_in", 1.0);
    inputs.act = activation_from(cfg, "ReLU");
    inputs.b_kappa = resflow::cfg_double(cfg, "b_kappa", 1.0);
    inputs.b_ell = resflow::cfg_double(cfg, "b_ell", 1.0);
    inputs.clamp_slack = resflow::cfg_bool(cfg, "clamp", false);

    auto slack = resflow::cfg_double_list(cfg, "c_slack", std::vector<double>{});
    const auto convention_name = resflow::cfg_string(cfg, "convention", "as-printed");
    resflow::ContinuousConvention convention;
    if (convention_name == "as-printed")
        convention = resflow::ContinuousConvention::as_printed;
    else if (convention_name == "match-discrete")
        convention = resflow::ContinuousConvention::match_discrete;
    else
        throw std::invalid_argument("key 'convention': expected as-printed or match-discrete");

    auto s_values = resflow::cfg_long_list(cfg, "s_grid", std::vector<long>{});
    if (s_values.empty()) s_values.push_back(inputs.S);

    std::vector<resflow::CsvRow> rows;
    json summary{{"mode", mode}, {"convention", convention_name}};
    for (long S : s_values) {
        inputs.S = S;
        resflow::BoundReport report;
        if (mode == "discrete") {
            inputs.c_slack = slack.empty() ? std::vector<double>(inputs.L, 0.0) : slack;
            report = resflow::discrete_bound(inputs);
        } else if (mode == "continuous") {
            inputs.c_slack = slack.empty() ? std::vector<double>{0.0} : slack;
            report = resflow::continuous_bound(inputs, convention);
        } else if (mode == "recursion") {
            inputs.c_slack = slack.empty() ? std::vector<double>(inputs.L, 0.0) : slack;
            const auto rs = resflow::layered_recursion(inputs);
            report.m_factor = resflow::m_factor(inputs.T, inputs.act, inputs.n_d, inputs.budget);
            report.leading = rs.back();
            report.total = rs.back();
        } else {
            throw std::invalid_argument(
                "key 'mode': expected discrete, continuous or recursion");
        }
        rows.push_back({static_cast<std::int64_t>(S), inputs.T,
                        static_cast<std::int64_t>(inputs.L), inputs.delta,
                        inputs.budget.b_theta, inputs.budget.b_in, inputs.b_kappa,
                        inputs.b_ell, report.leading, report.concentration, report.structural,
                        report.total});
    }
    resflow::write_csv(dir / "bounds.csv",
                       {"S", "T", "L", "delta", "b_theta", "b_in", "b_kappa", "b_ell",
                        "leading", "concentration", "structural", "total"},
                       rows);
    finish(dir, {"bounds.csv"}, summary);
}

void run_gap_vs_s(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    resflow::GapExperimentConfig gc;
    gc.archs = resflow::cfg_archs(cfg, "archs");
    {
        auto grid = resflow::cfg_long_list(cfg, "s_grid");
        gc.s_grid.assign(grid.begin(), grid.end());
    }
    gc.seeds = seeds_from(cfg);
    gc.base = dataset_from(cfg);
    gc.train = train_from(cfg);
    gc.loss = resflow::loss_kind_from_string(resflow::cfg_string(cfg, "loss", "squared"));
    gc.student_m = static_cast<int>(resflow::cfg_long(cfg, "student_m", 8));
    gc.window = static_cast<int>(resflow::cfg_long(cfg, "window", 10));
    gc.init_scale = resflow::cfg_double(cfg, "init_scale", 0.5);

    const auto result = resflow::gap_vs_samples(gc);

    std::vector<resflow::CsvRow> rows;
    for (const auto& rec : result.records)
        rows.push_back({rec.T, static_cast<std::int64_t>(rec.L),
                        static_cast<std::int64_t>(rec.S),
                        static_cast<std::int64_t>(rec.seed), rec.train_loss, rec.test_loss,
                        rec.gap});
    resflow::write_csv(dir / "gap_records.csv",
                       {"T", "L", "S", "seed", "train_loss", "test_loss", "gap"}, rows);

    std::vector<std::string> files{"gap_records.csv"};
    json fits = json::array();
    for (size_t a = 0; a < gc.archs.size(); ++a) {
        fits.push_back({{"T", gc.archs[a].first},
                        {"L", gc.archs[a].second},
                        {"mu", result.fits[a].mu},
                        {"residual_rms", result.fits[a].residual_rms},
                        {"r_squared", result.fits[a].r_squared},
                        {"spearman", result.spearman_by_arch[a]}});
        std::vector<resflow::CsvRow> panel;
        for (size_t si = 0; si < result.mean_gaps[a].size(); ++si)
            panel.push_back({static_cast<std::int64_t>(gc.s_grid[si]),
                             result.mean_gaps[a][si]});
        const std::string panel_name = "panel_arch" + std::to_string(a) + ".csv";
        resflow::write_csv(dir / panel_name, {"S", "mean_gap"}, panel);
        files.push_back(panel_name);
    }
    finish(dir, files,
           json{{"fits", fits},
                {"exclusions", result.exclusions},
                {"exclusion_log", result.exclusion_log},
                {"records", result.records.size()}});
}

void run_depth(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    resflow::DepthExperimentConfig dc;
    dc.T = resflow::cfg_double(cfg, "t");
    {
        auto grid = resflow::cfg_long_list(cfg, "l_grid");
        dc.l_grid.assign(grid.begin(), grid.end());
    }
    dc.seeds = seeds_from(cfg);
    dc.base = dataset_from(cfg);
    dc.train = train_from(cfg);
    dc.loss = resflow::loss_kind_from_string(resflow::cfg_string(cfg, "loss", "squared"));
    dc.student_m = static_cast<int>(resflow::cfg_long(cfg, "student_m", 8));
    dc.window = static_cast<int>(resflow::cfg_long(cfg, "window", 10));
    dc.init_b_theta = resflow::cfg_double(cfg, "init_b_theta", 0.5);

    const auto result = resflow::depth_refinement(dc);
    std::vector<resflow::CsvRow> rows;
    for (const auto& rec : result.records)
        rows.push_back({static_cast<std::int64_t>(rec.L), static_cast<std::int64_t>(rec.seed),
                        rec.final_train, rec.final_test});
    resflow::write_csv(dir / "depth_records.csv", {"L", "seed", "final_train", "final_test"},
                       rows);
    std::vector<resflow::CsvRow> panel;
    for (size_t li = 0; li < dc.l_grid.size(); ++li)
        panel.push_back({static_cast<std::int64_t>(dc.l_grid[li]),
                         result.mean_final_train[li]});
    resflow::write_csv(dir / "panel_depth.csv", {"L", "mean_final_train"}, panel);
    finish(dir, {"depth_records.csv", "panel_depth.csv"},
           json{{"mean_final_train", result.mean_final_train},
                {"diffs", result.diffs},
                {"exclusions", result.exclusions},
                {"exclusion_log", result.exclusion_log}});
}

void run_activation_compare(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    resflow::ActCompareConfig ac;
    ac.archs = resflow::cfg_archs(cfg, "archs");
    ac.seeds = seeds_from(cfg);
    ac.base = dataset_from(cfg);
    if (ac.base.kind == resflow::DatasetKind::teacher_net && !resflow::cfg_has(cfg, "dataset"))
        ac.base.kind = resflow::DatasetKind::gaussian_mixture;
    ac.train = train_from(cfg);
    ac.loss = resflow::loss_kind_from_string(
        resflow::cfg_string(cfg, "loss", "cross_entropy"));
    ac.student_m = static_cast<int>(resflow::cfg_long(cfg, "student_m", 8));
    ac.slope_a = resflow::cfg_double(cfg, "slope_a", 1.0);
    ac.slope_b = resflow::cfg_double(cfg, "slope_b", 0.05);
    ac.alpha0 = resflow::cfg_double(cfg, "alpha0", 0.0);
    ac.beta0 = resflow::cfg_double(cfg, "beta0", 0.0);
    ac.learnable = resflow::cfg_bool(cfg, "learnable", true);
    ac.late_window = static_cast<int>(resflow::cfg_long(cfg, "late_window", 10));
    ac.init_scale = resflow::cfg_double(cfg, "init_scale", 0.5);

    const auto result = resflow::activation_comparison(ac);
    std::vector<resflow::CsvRow> rows;
    for (const auto& row : result.curves)
        rows.push_back({row.T, static_cast<std::int64_t>(row.L),
                        static_cast<std::int64_t>(row.seed),
                        static_cast<std::int64_t>(row.epoch), row.gap_fixed,
                        row.gap_learnable, row.alpha, row.beta});
    resflow::write_csv(dir / "activation_compare.csv",
                       {"T", "L", "seed", "epoch", "gap_fixed", "gap_learnable", "alpha",
                        "beta"},
                       rows);
    finish(dir, {"activation_compare.csv"},
           json{{"late_gap_fixed", result.late_gap_fixed},
                {"late_gap_learnable", result.late_gap_learnable},
                {"exclusions", result.exclusions},
                {"exclusion_log", result.exclusion_log}});
}

void run_convergence(const RunConfig& cfg) {
    const auto dir = prepare_output(cfg);
    resflow::NetDims dims;
    dims.n_d = static_cast<int>(resflow::cfg_long(cfg, "n_d", 2));
    dims.n = static_cast<int>(resflow::cfg_long(cfg, "n", 2));
    dims.m = static_cast<int>(resflow::cfg_long(cfg, "m", 4));
    dims.T = resflow::cfg_double(cfg, "t", 1.0);
    const double b_theta = resflow::cfg_double(cfg, "b_theta", 1.0);
    const int modes = static_cast<int>(resflow::cfg_long(cfg, "modes", 3));
    const auto seed = static_cast<std::uint64_t>(resflow::cfg_long(cfg, "seed", 0));
    const auto params = resflow::random_fourier_params(
        dims, resflow::ParamBudget{b_theta, resflow::kDataBound}, seed, modes);
    const auto act = activation_from(cfg, "Tanh");

    const auto l_raw = resflow::cfg_long_list(cfg, "l_grid",
                                              std::vector<long>{4, 8, 16, 32, 64, 128});
    std::vector<int> l_grid(l_raw.begin(), l_raw.end());
    const int n_inputs = static_cast<int>(resflow::cfg_long(cfg, "n_inputs", 4));
    std::vector<Eigen::VectorXd> d_set;
    auto rng = resflow::make_rng(resflow::derive_seed(seed, resflow::stream::dataset_train));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < n_inputs; ++i) {
        Eigen::VectorXd d(dims.n_d);
        for (int k = 0; k < dims.n_d; ++k) d[k] = unit(rng);
        if (d.norm() > 1.0) d /= d.norm();
        d_set.push_back(std::move(d));
    }

    const auto result = resflow::convergence_rate_study(
        params, act, d_set, l_grid,
        static_cast<int>(resflow::cfg_long(cfg, "reference_steps", 4096)),
        static_cast<int>(resflow::cfg_long(cfg, "subgrid", 16)));

    std::vector<resflow::CsvRow> rows;
    for (size_t i = 0; i < result.l_grid.size(); ++i)
        rows.push_back({static_cast<std::int64_t>(result.l_grid[i]),
                        dims.T / result.l_grid[i], result.errors[i]});
    resflow::write_csv(dir / "convergence.csv", {"L", "tau", "sup_error"}, rows);
    json summary{{"slope_fitted", result.slope.has_value()}};
    if (result.slope) summary["slope"] = *result.slope;
    finish(dir, {"convergence.csv"}, summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resflow: residual-network dynamics, complexity estimates and bounds"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string chosen;
    for (const auto& name : resflow::known_commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "config file")->required();
        sub->add_option("--output", opts.output_dir, "output directory override");
        sub->add_option("--seed", opts.seed_override, "seed override");
        sub->callback([&chosen, name]() { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load_config(chosen, opts);
        if (chosen == "catalog")
            run_catalog(cfg);
        else if (chosen == "forward")
            run_forward(cfg);
        else if (chosen == "flow")
            run_flow(cfg);
        else if (chosen == "rademacher")
            run_rademacher(cfg);
        else if (chosen == "example33")
            run_example33(cfg);
        else if (chosen == "bounds")
            run_bounds(cfg);
        else if (chosen == "gap-vs-s")
            run_gap_vs_s(cfg);
        else if (chosen == "depth")
            run_depth(cfg);
        else if (chosen == "activation-compare")
            run_activation_compare(cfg);
        else if (chosen == "convergence")
            run_convergence(cfg);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "validation error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "runtime error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
