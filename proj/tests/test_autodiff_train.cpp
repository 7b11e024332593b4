#include <doctest.h>

#include <cmath>
#include <fstream>

#include "resflow/experiments.hpp"
#include "resflow/io.hpp"
#include "resflow/resnet.hpp"
#include "resflow/rng.hpp"
#include "resflow/train.hpp"

using namespace resflow;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> unit(-scale, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = unit(rng);
    return v;
}

// Smallest pre-activation distance to an activation kink across the net.
double kink_margin(const DiscreteParams& params, const ActivationSpec& act,
                   const Eigen::VectorXd& d) {
    double margin = std::numeric_limits<double>::infinity();
    auto visit = [&](const Eigen::VectorXd& pre) {
        for (Eigen::Index i = 0; i < pre.size(); ++i) {
            margin = std::min(margin, std::abs(pre[i] - act.alpha));
            margin = std::min(margin, std::abs(pre[i] + act.beta));
        }
    };
    Eigen::VectorXd p = params.pre.U * d + params.pre.a;
    visit(p);
    Eigen::VectorXd x = apply_elementwise(act, p);
    for (const auto& layer : params.layers) {
        Eigen::VectorXd q = layer.V * x + layer.b;
        visit(q);
        x = x + params.tau() * (layer.W * apply_elementwise(act, q) + layer.c);
    }
    return margin;
}

}  // namespace

TEST_CASE("squared loss basics and the kappa identity") {
    const auto loss = make_loss(LossKind::squared);
    Eigen::VectorXd x(2), g(2);
    x << 1.0, 0.0;
    g << 0.0, 0.0;
    CHECK(loss.value(g, g) == 0.0);
    CHECK(loss.value(x, g) == 1.0);

    auto rng = make_rng(3);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto a = random_vector(3, rng, 5.0);
        const auto b = random_vector(3, rng, 5.0);
        const auto t = random_vector(3, rng, 5.0);
        const double lhs = std::abs(loss.value(a, t) - loss.value(b, t));
        CHECK(lhs <= loss.kappa(a, b, t) * (a - b).norm() + 1e-9);
    }
}

TEST_CASE("every loss satisfies its local Lipschitz envelope") {
    auto rng = make_rng(4);
    const ParamBudget budget{1.0, 1.0};
    const double b_out = state_bound(budget, catalog("ReLU"), 1.0, 1.0);
    for (auto kind : {LossKind::squared, LossKind::ramp, LossKind::cross_entropy}) {
        const auto loss = make_loss(kind);
        const auto env = loss_envelope(kind, 3, b_out, kDataBound);
        for (int trial = 0; trial < 10000; ++trial) {
            auto a = random_vector(3, rng, b_out);
            auto b = random_vector(3, rng, b_out);
            Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
            if (kind == LossKind::squared) {
                g = random_vector(3, rng, 0.5);
            } else {
                g[static_cast<Eigen::Index>(rng() % 3)] = 1.0;
            }
            const double lhs = std::abs(loss.value(a, g) - loss.value(b, g));
            const double kap = loss.kappa(a, b, g);
            CHECK(lhs <= kap * (a - b).norm() + 1e-9);
            CHECK(loss.value(a, g) >= 0.0);
            CHECK(loss.value(a, g) <= env.b_ell + 1e-9);
            CHECK(kap <= env.b_kappa + 1e-9);
        }
    }
}

TEST_CASE("zero residual blocks and a matched target give zero gradients") {
    auto params = random_discrete_params({2, 3, 4, 3, 1.0}, ParamBudget{1.0, 1.0}, 5);
    for (auto& layer : params.layers) {
        layer.W.setZero();
        layer.c.setZero();
    }
    Eigen::VectorXd d(2);
    d << 0.3, 0.4;
    const auto act = catalog("ReLU");
    const Eigen::VectorXd g = discrete_forward(params, act, d).states.back();
    const auto grad = backprop(params, act, make_loss(LossKind::squared), d, g);
    CHECK(grad.loss_value == 0.0);
    for (const auto& dl : grad.d_layers) CHECK(dl.W.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backprop matches central finite differences") {
    const auto act = catalog("DeadZoneLeaky", {1.0, 0.05, 0.2, 0.3});
    const auto loss = make_loss(LossKind::squared);
    const double h = 1e-5;
    int done = 0;
    std::uint64_t seed = 0;
    while (done < 30) {
        ++seed;
        auto params = random_discrete_params({3, 4, 5, 3, 1.0}, ParamBudget{0.8, 1.0}, seed);
        auto rng = make_rng(derive_seed(seed, 12));
        const auto d = random_vector(3, rng);
        const auto g = random_vector(4, rng, 0.5);
        if (kink_margin(params, act, d) < 1e-3) continue;
        ++done;

        const auto grad = backprop(params, act, loss, d, g);
        auto loss_at = [&](const DiscreteParams& p) {
            return loss.value(discrete_forward(p, act, d).states.back(), g);
        };
        double worst = 0.0;
        auto numeric = [&](auto mutate_plus, auto mutate_minus) {
            DiscreteParams plus = params;
            DiscreteParams minus = params;
            mutate_plus(plus);
            mutate_minus(minus);
            return (loss_at(plus) - loss_at(minus)) / (2.0 * h);
        };
        // Floor the denominator: near-zero gradients carry central-difference
        // roundoff of order eps * loss / h, which is absolute, not relative.
        auto compare = [&](double analytic, double fd) {
            const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-4});
            worst = std::max(worst, std::abs(analytic - fd) / denom);
        };
        for (Eigen::Index i = 0; i < params.pre.U.rows(); ++i)
            for (Eigen::Index j = 0; j < params.pre.U.cols(); ++j)
                compare(grad.dU(i, j),
                        numeric([&](DiscreteParams& p) { p.pre.U(i, j) += h; },
                                [&](DiscreteParams& p) { p.pre.U(i, j) -= h; }));
        for (Eigen::Index i = 0; i < params.pre.a.size(); ++i)
            compare(grad.da(i),
                    numeric([&](DiscreteParams& p) { p.pre.a(i) += h; },
                            [&](DiscreteParams& p) { p.pre.a(i) -= h; }));
        for (size_t l = 0; l < params.layers.size(); ++l) {
            for (Eigen::Index i = 0; i < params.layers[l].V.rows(); ++i)
                for (Eigen::Index j = 0; j < params.layers[l].V.cols(); ++j)
                    compare(grad.d_layers[l].V(i, j),
                            numeric([&](DiscreteParams& p) { p.layers[l].V(i, j) += h; },
                                    [&](DiscreteParams& p) { p.layers[l].V(i, j) -= h; }));
            for (Eigen::Index i = 0; i < params.layers[l].W.rows(); ++i)
                for (Eigen::Index j = 0; j < params.layers[l].W.cols(); ++j)
                    compare(grad.d_layers[l].W(i, j),
                            numeric([&](DiscreteParams& p) { p.layers[l].W(i, j) += h; },
                                    [&](DiscreteParams& p) { p.layers[l].W(i, j) -= h; }));
            for (Eigen::Index i = 0; i < params.layers[l].b.size(); ++i)
                compare(grad.d_layers[l].b(i),
                        numeric([&](DiscreteParams& p) { p.layers[l].b(i) += h; },
                                [&](DiscreteParams& p) { p.layers[l].b(i) -= h; }));
            for (Eigen::Index i = 0; i < params.layers[l].c.size(); ++i)
                compare(grad.d_layers[l].c(i),
                        numeric([&](DiscreteParams& p) { p.layers[l].c(i) += h; },
                                [&](DiscreteParams& p) { p.layers[l].c(i) -= h; }));
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("one-layer scalar net: hand-computed c gradient") {
    DiscreteParams p;
    p.horizon = 1.0;
    p.pre.U = Eigen::MatrixXd::Constant(1, 1, 0.9);
    p.pre.a = Eigen::VectorXd::Constant(1, 0.8);
    LayerParams lp;
    lp.V = Eigen::MatrixXd::Constant(1, 1, 0.7);
    lp.W = Eigen::MatrixXd::Constant(1, 1, 0.6);
    lp.b = Eigen::VectorXd::Constant(1, 0.5);
    lp.c = Eigen::VectorXd::Constant(1, 0.4);
    p.layers.push_back(lp);

    // All pre-activations positive, so the leaky activation acts as a(x - alpha).
    const auto act = catalog("DeadZoneLeaky", {1.0, 0.05, 0.1, 0.1});
    Eigen::VectorXd d(1), g(1);
    d << 1.0;
    g << 0.2;
    const double x0 = 1.0 * (0.9 * 1.0 + 0.8 - 0.1);
    const double x1 = x0 + 1.0 * (0.6 * (0.7 * x0 + 0.5 - 0.1) + 0.4);
    const double expected_dc = 1.0 * 2.0 * (x1 - 0.2);
    const auto grad = backprop(p, act, make_loss(LossKind::squared), d, g);
    CHECK(grad.d_layers[0].c[0] == doctest::Approx(expected_dc).epsilon(1e-12));
}

TEST_CASE("learnable dead-zone gradients match finite differences") {
    const double a = 1.0, b = 0.05;
    const auto loss = make_loss(LossKind::squared);
    auto params = random_discrete_params({2, 3, 4, 2, 1.0}, ParamBudget{0.8, 1.0}, 77);
    auto rng = make_rng(78);
    const auto d = random_vector(2, rng);
    const auto g = random_vector(3, rng, 0.5);
    const double alpha = 0.21, beta = 0.34;
    const auto act = catalog("DeadZoneLeaky", {a, b, alpha, beta});
    if (kink_margin(params, act, d) > 1e-3) {
        const auto grad = backprop(params, act, loss, d, g, true);
        const double h = 1e-6;
        auto loss_at = [&](double al, double be) {
            const auto spec = catalog("DeadZoneLeaky", {a, b, al, be});
            return loss.value(discrete_forward(params, spec, d).states.back(), g);
        };
        const double fd_alpha = (loss_at(alpha + h, beta) - loss_at(alpha - h, beta)) / (2 * h);
        const double fd_beta = (loss_at(alpha, beta + h) - loss_at(alpha, beta - h)) / (2 * h);
        CHECK(grad.d_alpha == doctest::Approx(fd_alpha).epsilon(1e-4));
        CHECK(grad.d_beta == doctest::Approx(fd_beta).epsilon(1e-4));
    }
}

TEST_CASE("zero learning rate leaves parameters untouched") {
    const auto init = random_discrete_params({2, 2, 3, 2, 1.0}, ParamBudget{0.5, 1.0}, 6);
    Dataset data;
    auto rng = make_rng(7);
    for (int i = 0; i < 16; ++i) data.push_back({random_vector(2, rng), random_vector(2, rng)});
    TrainConfig cfg;
    cfg.lr = 0.0;
    cfg.epochs = 3;
    const auto result = sgd_train(init, catalog("Tanh"), make_loss(LossKind::squared), data, cfg);
    CHECK((result.params.pre.U - init.pre.U).cwiseAbs().maxCoeff() == 0.0);
    for (size_t l = 0; l < init.layers.size(); ++l)
        CHECK((result.params.layers[l].W - init.layers[l].W).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training is deterministic given the seed") {
    DatasetSpec spec;
    spec.kind = DatasetKind::teacher_net;
    spec.s_train = 64;
    spec.s_test = 32;
    spec.seed = 12;
    const auto data = generate_dataset(spec);
    const auto init = init_discrete_params({3, 2, 5, 3, 1.0}, 0.5, 9);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.seed = 42;
    const auto first =
        sgd_train(init, catalog("Tanh"), make_loss(LossKind::squared), data.train, cfg,
                  &data.test);
    const auto second =
        sgd_train(init, catalog("Tanh"), make_loss(LossKind::squared), data.train, cfg,
                  &data.test);
    REQUIRE(first.log.size() == second.log.size());
    for (size_t e = 0; e < first.log.size(); ++e) {
        CHECK(first.log[e].train_loss == second.log[e].train_loss);
        CHECK(first.log[e].test_loss == second.log[e].test_loss);
        CHECK(first.log[e].param_inf_norm == second.log[e].param_inf_norm);
    }
    CHECK((first.params.pre.U - second.params.pre.U).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("teacher-student regression reaches a small training loss") {
    DatasetSpec spec;
    spec.kind = DatasetKind::teacher_net;
    spec.teacher_dims = {1, 1, 4, 2, 1.0};
    spec.s_train = 512;
    spec.s_test = 64;
    spec.seed = 5;
    const auto data = generate_dataset(spec);
    const auto init = init_discrete_params({1, 1, 4, 2, 1.0}, 0.5, 15);
    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.epochs = 200;
    cfg.batch_size = 32;
    cfg.seed = 2;
    const auto result =
        sgd_train(init, catalog("Tanh"), make_loss(LossKind::squared), data.train, cfg);
    CHECK(result.log.back().train_loss <= 1e-3);
}

TEST_CASE("projection keeps parameters inside the budget") {
    const auto init = init_discrete_params({2, 2, 3, 2, 1.0}, 1.0, 3);
    Dataset data;
    auto rng = make_rng(8);
    for (int i = 0; i < 32; ++i) data.push_back({random_vector(2, rng), random_vector(2, rng)});
    TrainConfig cfg;
    cfg.lr = 0.5;
    cfg.epochs = 5;
    cfg.projection = 0.3;
    const auto result = sgd_train(init, catalog("Tanh"), make_loss(LossKind::squared), data, cfg);
    CHECK(param_inf_norm(result.params) <= 0.3 + 1e-12);
}

TEST_CASE("diverging runs abort with a step index") {
    const auto init = init_discrete_params({2, 2, 4, 4, 1.0}, 2.0, 3);
    Dataset data;
    auto rng = make_rng(9);
    for (int i = 0; i < 32; ++i) data.push_back({random_vector(2, rng), random_vector(2, rng)});
    TrainConfig cfg;
    cfg.lr = 1e6;
    cfg.epochs = 50;
    CHECK_THROWS_WITH_AS(
        sgd_train(init, catalog("ReLU"), make_loss(LossKind::squared), data, cfg),
        doctest::Contains("step"), std::runtime_error);
}

TEST_CASE("training log serializes with the documented columns") {
    TrainLog log;
    log.push_back({0, 0.5, 0.6, 1.0, 12.0});
    const auto path = std::filesystem::temp_directory_path() / "resflow_train_log.csv";
    write_train_log(path, log);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,train_loss,test_loss,param_inf_norm,wall_ms");
}
