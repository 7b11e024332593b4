#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "resflow/activation.hpp"

using namespace resflow;

namespace {

// Independent piecewise definitions of every catalog entry, written directly
// from their case splits rather than through the two-piece decomposition.
double piecewise_reference(const std::string& name, const std::vector<double>& p, double x) {
    if (name == "ReLU") return x >= 0 ? x : 0.0;
    if (name == "PReLU") return x >= 0 ? x : p[0] * x;
    if (name == "TReLU") return x >= p[0] ? x - p[0] : 0.0;
    if (name == "ELU") return x >= 0 ? x : p[0] * (std::exp(x) - 1.0);
    if (name == "TEReLU") {
        if (x >= p[0]) return x - p[0];
        if (x > -p[1]) return 0.0;
        return p[2] * (std::exp(x + p[1]) - 1.0);
    }
    if (name == "SoftThresholdSym") {
        if (x >= p[0]) return x - p[0];
        if (x > -p[0]) return 0.0;
        return x + p[0];
    }
    if (name == "SoftThresholdAsym") {
        if (x >= p[0]) return x - p[0];
        if (x > -p[1]) return 0.0;
        return x + p[1];
    }
    if (name == "Tanh") return std::tanh(x);
    if (name == "DeadZoneLeaky") {
        if (x >= p[2]) return p[0] * (x - p[2]);
        if (x > -p[3]) return 0.0;
        return p[1] * (x + p[3]);
    }
    FAIL("unknown reference name");
    return 0.0;
}

struct CatalogCase {
    std::string name;
    std::vector<double> params;
};

std::vector<CatalogCase> catalog_cases() {
    return {{"ReLU", {}},
            {"PReLU", {0.25}},
            {"TReLU", {0.7}},
            {"ELU", {1.3}},
            {"TEReLU", {0.6, 0.4, 0.8}},
            {"SoftThresholdSym", {0.5}},
            {"SoftThresholdAsym", {0.3, 0.9}},
            {"Tanh", {}},
            {"DeadZoneLeaky", {1.0, 0.05, 0.4, 0.2}}};
}

}  // namespace

TEST_CASE("catalog values match the piecewise forms") {
    CHECK(catalog("ReLU")(-1.0) == 0.0);
    CHECK(catalog("ReLU")(0.0) == 0.0);
    CHECK(catalog("ReLU")(2.0) == 2.0);

    const auto soft = catalog("SoftThresholdSym", {1.0});
    CHECK(soft(2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(soft(0.5) == 0.0);
    CHECK(soft(-2.0) == doctest::Approx(-1.0).epsilon(1e-15));

    const auto leaky = catalog("DeadZoneLeaky", {1.0, 0.05, 0.0, 0.0});
    CHECK(leaky(-10.0) == doctest::Approx(-0.5).epsilon(1e-15));

    for (const auto& [name, params] : catalog_cases()) {
        const auto spec = catalog(name, params);
        for (int i = 0; i < 1000; ++i) {
            const double x = -10.0 + 20.0 * i / 999.0;
            CHECK(spec(x) ==
                  doctest::Approx(piecewise_reference(name, params, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("catalog members are nondecreasing and Lipschitz") {
    for (const auto& [name, params] : catalog_cases()) {
        const auto spec = catalog(name, params);
        const double lip = spec.lip();
        double prev = spec(-10.0);
        double prev_x = -10.0;
        for (int i = 1; i < 1000; ++i) {
            const double x = -10.0 + 20.0 * i / 999.0;
            const double y = spec(x);
            CHECK(y >= prev - 1e-12);
            CHECK(std::abs(y - prev) <= lip * (x - prev_x) + 1e-12);
            prev = y;
            prev_x = x;
        }
    }
}

TEST_CASE("monotone pieces vanish on the nonpositive axis") {
    for (const auto& [name, params] : catalog_cases()) {
        const auto spec = catalog(name, params);
        for (int i = 0; i < 200; ++i) {
            const double u = -5.0 * i / 199.0;
            CHECK(spec.phi1.eval(u) == 0.0);
            CHECK(spec.phi2.eval(u) == 0.0);
        }
        CHECK(spec.lip() == std::max(spec.phi1.lip, spec.phi2.lip));
    }
}

TEST_CASE("dead zone maps to zero") {
    for (const auto& [name, params] : catalog_cases()) {
        const auto spec = catalog(name, params);
        if (!(spec.alpha > 0.0 && spec.beta > 0.0)) continue;
        for (int i = 0; i <= 50; ++i) {
            const double x = std::clamp(-spec.beta + (spec.alpha + spec.beta) * i / 50.0,
                                        -spec.beta, spec.alpha);
            CHECK(spec(x) == 0.0);
        }
    }
}

TEST_CASE("elementwise application and derivatives") {
    Eigen::VectorXd v(2);
    v << -1.0, 3.0;
    const auto relu_out = apply_elementwise(catalog("ReLU"), v);
    CHECK(relu_out[0] == 0.0);
    CHECK(relu_out[1] == 3.0);

    Eigen::VectorXd w(2);
    w << 0.2, -0.2;
    const auto dz = apply_elementwise(catalog("SoftThresholdAsym", {0.5, 0.5}), w);
    CHECK(dz[0] == 0.0);
    CHECK(dz[1] == 0.0);

    Eigen::VectorXd z(1);
    z << 0.0;
    CHECK(apply_elementwise(catalog("Tanh"), z)[0] == 0.0);

    Eigen::VectorXd dv(2);
    dv << -1.0, 2.0;
    const auto relu_d = apply_deriv(catalog("ReLU"), dv);
    CHECK(relu_d[0] == 0.0);
    CHECK(relu_d[1] == 1.0);

    Eigen::VectorXd one(1);
    one << -3.0;
    CHECK(apply_deriv(catalog("DeadZoneLeaky", {1.0, 0.05, 0.0, 0.0}), one)[0] ==
          doctest::Approx(0.05));

    one << 0.0;
    CHECK(apply_deriv(catalog("SoftThresholdSym", {1.0}), one)[0] == 0.0);
}

TEST_CASE("finite differences match the stored derivative away from kinks") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-8.0, 8.0);
    const double h = 1e-6;
    for (const auto& [name, params] : catalog_cases()) {
        const auto spec = catalog(name, params);
        const double kinks[3] = {spec.alpha, -spec.beta, 0.0};
        int checked = 0;
        while (checked < 1000) {
            const double x = unit(rng);
            bool near_kink = false;
            for (double k : kinks)
                if (std::abs(x - k) < 1e-4) near_kink = true;
            if (near_kink) continue;
            ++checked;
            const double fd = (spec(x + h) - spec(x - h)) / (2.0 * h);
            CHECK(std::abs(fd - spec.deriv(x)) <= 1e-4);
        }
    }
}

TEST_CASE("catalog rejects bad names and parameters") {
    CHECK_THROWS_AS(catalog("Gelu"), std::invalid_argument);
    CHECK_THROWS_AS(catalog("PReLU", {1.5}), std::invalid_argument);
    CHECK_THROWS_AS(catalog("TReLU", {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(catalog("ELU", {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(catalog("SoftThresholdAsym", {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(catalog("ReLU", {1.0}), std::invalid_argument);
}

TEST_CASE("ELU default parameter") {
    const auto elu = catalog("ELU");
    CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
}
