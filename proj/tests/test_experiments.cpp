#include <doctest.h>

#include <cmath>

#include "resflow/experiments.hpp"
#include "resflow/rng.hpp"

using namespace resflow;

TEST_CASE("inverse-sqrt fit recovers an exact power law") {
    std::vector<double> sizes{250, 500, 1000, 2000, 4000};
    std::vector<double> gaps;
    for (double s : sizes) gaps.push_back(3.0 / std::sqrt(s));
    const auto fit = fit_inverse_sqrt(sizes, gaps);
    CHECK(fit.mu == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.residual_rms <= 1e-14);
}

TEST_CASE("closed-form fit agrees with the iterative solver") {
    auto rng = make_rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> sizes, gaps;
        for (int i = 0; i < 6; ++i) {
            sizes.push_back(100.0 * (i + 1));
            gaps.push_back(unit(rng));
        }
        const double closed = fit_inverse_sqrt(sizes, gaps).mu;
        const double iterative = fit_inverse_sqrt_iterative(sizes, gaps);
        CHECK(std::abs(closed - iterative) <= 1e-10);
    }
}

TEST_CASE("rank correlation and slope helpers") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> down{10, 8, 5, 3, 1};
    CHECK(spearman(x, down) == doctest::Approx(-1.0));
    std::vector<double> up{1, 2, 3, 4, 5};
    CHECK(spearman(x, up) == doctest::Approx(1.0));
    CHECK(linear_slope(x, down) == doctest::Approx(-2.3).epsilon(1e-12));
}

TEST_CASE("dataset generation is deterministic and bounded") {
    DatasetSpec spec;
    spec.kind = DatasetKind::teacher_net;
    spec.s_train = 64;
    spec.s_test = 32;
    spec.seed = 77;
    const auto first = generate_dataset(spec);
    const auto second = generate_dataset(spec);
    REQUIRE(first.train.size() == second.train.size());
    for (size_t i = 0; i < first.train.size(); ++i) {
        CHECK((first.train[i].d - second.train[i].d).cwiseAbs().maxCoeff() == 0.0);
        CHECK((first.train[i].g - second.train[i].g).cwiseAbs().maxCoeff() == 0.0);
    }

    for (auto kind : {DatasetKind::teacher_net, DatasetKind::gaussian_mixture,
                      DatasetKind::two_moons}) {
        DatasetSpec s2;
        s2.kind = kind;
        s2.s_train = 2500;
        s2.s_test = 10;
        s2.seed = 3;
        const auto data = generate_dataset(s2);
        for (const auto& smp : data.train)
            CHECK(smp.d.norm() + smp.g.norm() <= kDataBound + 1e-12);
    }
}

TEST_CASE("teacher labels regenerate exactly from the stored teacher") {
    DatasetSpec spec;
    spec.kind = DatasetKind::teacher_net;
    spec.s_train = 32;
    spec.s_test = 8;
    spec.seed = 11;
    const auto data = generate_dataset(spec);
    REQUIRE(data.teacher.has_value());
    const auto act = catalog("Tanh");
    for (const auto& smp : data.train) {
        const auto g = discrete_forward(*data.teacher, act, smp.d).states.back();
        CHECK((g - smp.g).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("gap experiment bookkeeping on a tiny grid") {
    GapExperimentConfig cfg;
    cfg.archs = {{1.0, 2}};
    cfg.s_grid = {32, 64, 128};
    cfg.seeds = {0, 1};
    cfg.base.kind = DatasetKind::teacher_net;
    cfg.base.s_test = 64;
    cfg.base.seed = 1;
    cfg.train.epochs = 2;
    cfg.train.batch_size = 16;
    cfg.train.seed = 1;
    cfg.window = 2;
    const auto result = gap_vs_samples(cfg);
    CHECK(result.records.size() + result.exclusions == 6);
    CHECK(result.exclusion_log.size() == static_cast<size_t>(result.exclusions));
    for (const auto& rec : result.records)
        CHECK(rec.gap == rec.test_loss - rec.train_loss);
    REQUIRE(result.fits.size() == 1);
    REQUIRE(result.mean_gaps.size() == 1);

    GapExperimentConfig bad = cfg;
    bad.s_grid = {32};
    CHECK_THROWS_AS(gap_vs_samples(bad), std::invalid_argument);
    bad = cfg;
    bad.s_grid = {64, 32, 128};
    CHECK_THROWS_AS(gap_vs_samples(bad), std::invalid_argument);
}

TEST_CASE("depth refinement bookkeeping and single-depth degenerate grid") {
    DepthExperimentConfig cfg;
    cfg.T = 2.0;
    cfg.l_grid = {2, 4};
    cfg.seeds = {0, 1};
    cfg.base.kind = DatasetKind::teacher_net;
    cfg.base.s_train = 48;
    cfg.base.s_test = 32;
    cfg.train.epochs = 2;
    cfg.train.batch_size = 16;
    cfg.window = 2;
    const auto result = depth_refinement(cfg);
    CHECK(result.records.size() + result.exclusions == 4);
    CHECK(result.diffs.size() == 1);

    cfg.l_grid = {4};
    const auto single = depth_refinement(cfg);
    CHECK(single.diffs.empty());
}

TEST_CASE("forward-only depth comparability of the shared initialization") {
    // Sampling one smooth path at increasing depths converges to the flow.
    const auto cont = random_fourier_params({3, 2, 4, 1, 2.0}, ParamBudget{0.6, 1.0}, 21);
    std::vector<Eigen::VectorXd> inputs;
    auto rng = make_rng(22);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd d(3);
        d << unit(rng), unit(rng), unit(rng);
        inputs.push_back(d);
    }
    const auto study = convergence_rate_study(cont, catalog("Tanh"), inputs, {4, 64});
    CHECK(study.errors[1] < study.errors[0]);
}

TEST_CASE("matched arms with identical configuration produce identical logs") {
    ActCompareConfig cfg;
    cfg.archs = {{1.0, 2}};
    cfg.seeds = {0};
    cfg.base.kind = DatasetKind::gaussian_mixture;
    cfg.base.s_train = 48;
    cfg.base.s_test = 32;
    cfg.train.epochs = 3;
    cfg.train.batch_size = 16;
    cfg.learnable = false;
    cfg.alpha0 = 0.0;
    cfg.beta0 = 0.0;
    const auto result = activation_comparison(cfg);
    REQUIRE(result.exclusions == 0);
    for (const auto& row : result.curves) CHECK(row.gap_fixed == row.gap_learnable);
}

TEST_CASE("learnable dead-zone edges stay nonnegative") {
    ActCompareConfig cfg;
    cfg.archs = {{1.0, 2}};
    cfg.seeds = {0, 1};
    cfg.base.kind = DatasetKind::gaussian_mixture;
    cfg.base.s_train = 64;
    cfg.base.s_test = 32;
    cfg.train.epochs = 4;
    cfg.train.batch_size = 16;
    cfg.train.lr = 0.05;
    cfg.learnable = true;
    const auto result = activation_comparison(cfg);
    REQUIRE(result.exclusions == 0);
    CHECK_FALSE(result.curves.empty());
    for (const auto& row : result.curves) {
        CHECK(row.alpha >= 0.0);
        CHECK(row.beta >= 0.0);
    }
    CHECK(std::isfinite(result.late_gap_fixed));
    CHECK(std::isfinite(result.late_gap_learnable));
}

TEST_CASE("convergence study on degenerate paths") {
    // Zero path: the discrete net and the flow agree exactly, no slope fit.
    std::vector<LayerParams> zeros(1);
    zeros[0].V = Eigen::MatrixXd::Zero(3, 2);
    zeros[0].W = Eigen::MatrixXd::Zero(2, 3);
    zeros[0].b = Eigen::VectorXd::Zero(3);
    zeros[0].c = Eigen::VectorXd::Zero(2);
    ContinuousParams cont;
    cont.horizon = 1.0;
    cont.pre.U = Eigen::MatrixXd::Identity(2, 2);
    cont.pre.a = Eigen::VectorXd::Zero(2);
    cont.path = std::make_shared<PiecewiseConstantPath>(zeros, 1.0);
    std::vector<Eigen::VectorXd> inputs(1, Eigen::VectorXd::Constant(2, 0.3));
    const auto zero_study =
        convergence_rate_study(cont, catalog("ReLU"), inputs, {4, 8, 16, 32});
    for (double e : zero_study.errors) CHECK(e == 0.0);
    CHECK_FALSE(zero_study.slope.has_value());

    // Constant nonzero path: an autonomous smooth flow, first-order rate.
    std::vector<LayerParams> constant(1);
    auto rng = make_rng(9);
    std::uniform_real_distribution<double> unit(-0.4, 0.4);
    constant[0].V = Eigen::MatrixXd::Zero(3, 2).unaryExpr([&](double) { return unit(rng); });
    constant[0].W = Eigen::MatrixXd::Zero(2, 3).unaryExpr([&](double) { return unit(rng); });
    constant[0].b = Eigen::VectorXd::Zero(3).unaryExpr([&](double) { return unit(rng); });
    constant[0].c = Eigen::VectorXd::Zero(2).unaryExpr([&](double) { return unit(rng); });
    cont.path = std::make_shared<PiecewiseConstantPath>(constant, 1.0);
    const auto const_study =
        convergence_rate_study(cont, catalog("Tanh"), inputs, {4, 8, 16, 32});
    REQUIRE(const_study.slope.has_value());
    CHECK(*const_study.slope >= 0.9);
}
