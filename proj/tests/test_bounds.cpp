#include <doctest.h>

#include <cmath>

#include "resflow/bounds.hpp"

using namespace resflow;

namespace {

BoundInputs reference_inputs() {
    BoundInputs in;
    in.n = 1;
    in.n_d = 2;
    in.T = 1.0;
    in.L = 4;
    in.S = 100;
    in.delta = 0.05;
    in.budget = {1.0, 1.0};
    in.act = catalog("ReLU");
    in.b_kappa = 1.0;
    in.b_ell = 1.0;
    in.c_slack.assign(4, 0.0);
    return in;
}

}  // namespace

TEST_CASE("m factor closed form") {
    const ParamBudget budget{1.0, 1.0};
    const auto relu = catalog("ReLU");
    CHECK(m_factor(1.0, relu, 2, budget) ==
          doctest::Approx(41.859809850257846077).epsilon(1e-13));
    CHECK(m_factor(0.0, relu, 2, budget) ==
          doctest::Approx(2.6651092223153955127).epsilon(1e-14));

    double prev = 0.0;
    for (int i = 0; i <= 4; ++i) {
        const double v = m_factor(0.5 + 0.5 * i, relu, 2, budget);
        CHECK(v > prev);
        prev = v;
    }
    prev = 0.0;
    for (int i = 0; i <= 4; ++i) {
        const double v = m_factor(1.0, relu, 2, ParamBudget{0.5 + 0.25 * i, 1.0});
        CHECK(v > prev);
        prev = v;
    }
    prev = 0.0;
    for (int i = 0; i <= 4; ++i) {
        const double v = m_factor(1.0, relu, 2, ParamBudget{1.0, 0.5 + 0.25 * i});
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("discrete bound reproduces the frozen reference values") {
    auto in = reference_inputs();
    in.L = 1;
    in.c_slack.assign(1, 0.0);
    const auto report = discrete_bound(in);
    CHECK(report.leading == doctest::Approx(11.839742161718704584).epsilon(1e-13));
    CHECK(report.concentration == doctest::Approx(1.1841657498406387011).epsilon(1e-13));
    CHECK(report.structural == 0.0);
    CHECK(report.total == doctest::Approx(13.023907911559343285).epsilon(1e-13));
}

TEST_CASE("zero or dead-zone-free slack removes the structural term") {
    auto in = reference_inputs();
    const auto zero_slack = discrete_bound(in);
    CHECK(zero_slack.structural == 0.0);
    CHECK(zero_slack.total == zero_slack.leading + zero_slack.concentration);

    in.act = catalog("PReLU", {0.5});
    in.c_slack.assign(4, 3.0);  // any admissible value: coefficient is zero
    const auto prelu = discrete_bound(in);
    CHECK(prelu.structural == 0.0);
}

TEST_CASE("structural term stays within the nonnegativity guarantee") {
    auto in = reference_inputs();
    in.act = catalog("SoftThresholdAsym", {0.4, 0.7});
    const double upper = slack_upper_limit(in.act, in.budget, in.S);
    in.c_slack.assign(4, upper);
    const auto report = discrete_bound(in);
    CHECK(report.structural < 0.0);
    CHECK(report.total >= 0.0);

    in.c_slack.assign(4, upper * 1.01);
    CHECK_THROWS_AS(discrete_bound(in), std::invalid_argument);
    in.clamp_slack = true;
    const auto clamped = discrete_bound(in);
    CHECK(clamped.structural == report.structural);
}

TEST_CASE("continuous bound shares terms with the discrete bound") {
    auto in = reference_inputs();
    const auto disc = discrete_bound(in);
    in.c_slack.assign(1, 0.0);
    const auto cont = continuous_bound(in);
    CHECK(cont.leading == disc.leading);
    CHECK(cont.concentration == disc.concentration);
    CHECK(cont.total == disc.total);

    in.act = catalog("SoftThresholdAsym", {0.4, 0.7});
    in.c_slack.assign(1, slack_upper_limit(in.act, in.budget, in.S));
    CHECK(continuous_bound(in).total >= 0.0);
}

TEST_CASE("sample-size scaling is exact") {
    auto in = reference_inputs();
    in.act = catalog("SoftThresholdSym", {0.5});
    in.c_slack.assign(4, 1.0);
    const auto base = discrete_bound(in);
    in.S *= 4;
    const auto bigger = discrete_bound(in);
    CHECK(bigger.leading == base.leading / 2.0);
    CHECK(bigger.concentration == base.concentration / 2.0);
    CHECK(bigger.structural == doctest::Approx(base.structural / 4.0).epsilon(1e-14));
}

TEST_CASE("match-discrete convention aligns the structural terms") {
    auto in = reference_inputs();
    in.act = catalog("SoftThresholdSym", {0.5});
    const double c = 0.8;
    in.c_slack.assign(4, c);
    const auto disc = discrete_bound(in);
    in.c_slack.assign(1, c);  // tau * sum C^l / T = c for constant slack
    const auto matched = continuous_bound(in, ContinuousConvention::match_discrete);
    CHECK(matched.structural == doctest::Approx(disc.structural).epsilon(1e-12));
    const auto printed = continuous_bound(in, ContinuousConvention::as_printed);
    CHECK(printed.structural != matched.structural);
}

TEST_CASE("layered recursion: seed, single step, growth and envelope") {
    auto in = reference_inputs();
    in.L = 1;
    in.c_slack.assign(1, 0.0);
    const auto rs = layered_recursion(in);
    REQUIRE(rs.size() == 2);
    const double lip = 1.0, B = 1.0;
    const double seed_expected =
        lip * B * (1.0 * std::sqrt(2.0 * std::log(4.0)) + 1.0) / 10.0;
    CHECK(rs[0] == doctest::Approx(seed_expected).epsilon(1e-15));
    const double step_expected = rs[0] * (1.0 + 2.0 * lip * B * B) +
                                 (B / 10.0) * (1.0 + 2.0 * lip * B);
    CHECK(rs[1] == doctest::Approx(step_expected).epsilon(1e-15));

    // Depth sweep: nondecreasing in L, bounded by the depth-uniform envelope.
    const double envelope = (B / std::sqrt(100.0)) * m_factor(1.0, in.act, 2, in.budget);
    double prev = 0.0;
    for (int L = 1; L <= 1024; L *= 2) {
        in.L = L;
        in.c_slack.assign(static_cast<size_t>(L), 0.0);
        const auto r = layered_recursion(in);
        CHECK(r.back() >= prev - 1e-15);
        CHECK(r.back() <= envelope * (1.0 + 1e-9));
        prev = r.back();
    }
}

TEST_CASE("recursion guard floors the increment at zero") {
    auto in = reference_inputs();
    in.act = catalog("SoftThresholdSym", {0.5});
    in.clamp_slack = true;
    in.c_slack.assign(4, 1e9);  // clamped to the admissible upper end
    const auto rs = layered_recursion(in);
    for (size_t l = 1; l < rs.size(); ++l) CHECK(rs[l] >= rs[l - 1]);
}

TEST_CASE("input validation") {
    auto in = reference_inputs();
    in.delta = 1.5;
    CHECK_THROWS_AS(discrete_bound(in), std::invalid_argument);
    in = reference_inputs();
    in.c_slack.assign(3, 0.0);
    CHECK_THROWS_AS(discrete_bound(in), std::invalid_argument);
    in = reference_inputs();
    in.c_slack.assign(2, 0.0);
    CHECK_THROWS_AS(continuous_bound(in), std::invalid_argument);
    in = reference_inputs();
    in.c_slack.assign(4, -0.5);
    CHECK_THROWS_AS(discrete_bound(in), std::invalid_argument);
}
