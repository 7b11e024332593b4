#include "resflow/rademacher.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "resflow/resnet.hpp"
#include "resflow/rng.hpp"
#include "resflow/util.hpp"

namespace resflow {

namespace {

constexpr int kExactBudgetBits = 24;

void validate_class(const EvaluatedClass& cls) {
    if (cls.size() < 1) throw std::invalid_argument("evaluated class needs >= 1 function");
    if (cls.samples() < 1) throw std::invalid_argument("evaluated class needs >= 1 sample");
    if (!cls.values.allFinite())
        throw std::invalid_argument("evaluated class contains non-finite values");
}

// Signed dot products of one function against every sign vector of `bits`
// samples starting at sample `offset` (bit set means sign -1). Built by
// flipping one sign per step, so rounding error stays O(bits) ulps.
std::vector<double> sign_dot_table(const Eigen::MatrixXd& values, int j, int offset,
                                   int bits) {
    std::vector<double> table(static_cast<size_t>(1) << bits);
    double base = 0.0;
    for (int s = 0; s < bits; ++s) base += values(j, offset + s);
    table[0] = base;
    for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
        const int bit = std::countr_zero(mask);
        table[mask] = table[mask & (mask - 1)] - 2.0 * values(j, offset + bit);
    }
    return table;
}

}  // namespace

RademacherEstimate rademacher_exact(const EvaluatedClass& cls) {
    validate_class(cls);
    const int S = cls.samples();
    const int K = cls.size();
    if (S > kExactBudgetBits)
        throw std::invalid_argument("exact enumeration budget is S <= 24, got S = " +
                                    std::to_string(S));

    const int lo_bits = std::min(S, 14);
    const int hi_bits = S - lo_bits;
    std::vector<std::vector<double>> lo(static_cast<size_t>(K));
    std::vector<std::vector<double>> hi(static_cast<size_t>(K));
    for (int j = 0; j < K; ++j) {
        lo[j] = sign_dot_table(cls.values, j, 0, lo_bits);
        hi[j] = hi_bits > 0 ? sign_dot_table(cls.values, j, lo_bits, hi_bits)
                            : std::vector<double>{0.0};
    }

    const std::uint64_t hi_count = static_cast<std::uint64_t>(1) << hi_bits;
    const std::uint64_t lo_count = static_cast<std::uint64_t>(1) << lo_bits;

    auto sum_range = [&](std::uint64_t hi_begin, std::uint64_t hi_end) {
        NeumaierSum acc;
        for (std::uint64_t h = hi_begin; h < hi_end; ++h) {
            for (std::uint64_t l = 0; l < lo_count; ++l) {
                double best = hi[0][h] + lo[0][l];
                for (int j = 1; j < K; ++j) best = std::max(best, hi[j][h] + lo[j][l]);
                acc.add(best);
            }
        }
        return acc.get();
    };

    double total;
    const unsigned workers = std::min<unsigned>(thread_budget(), 8);
    if (hi_count >= 64 && workers > 1) {
        // Fixed 64-chunk split reduced in index order: totals do not depend on
        // the worker count.
        constexpr std::uint64_t kChunks = 64;
        std::vector<double> partials(kChunks);
        std::vector<std::future<void>> jobs;
        std::atomic<std::uint64_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&]() {
                for (;;) {
                    const std::uint64_t chunk = next.fetch_add(1);
                    if (chunk >= kChunks) return;
                    const std::uint64_t begin = chunk * hi_count / kChunks;
                    const std::uint64_t end = (chunk + 1) * hi_count / kChunks;
                    partials[chunk] = sum_range(begin, end);
                }
            }));
        }
        for (auto& job : jobs) job.get();
        NeumaierSum acc;
        for (double p : partials) acc.add(p);
        total = acc.get();
    } else {
        total = sum_range(0, hi_count);
    }

    RademacherEstimate est;
    est.kind = RademacherEstimate::Kind::exact;
    est.value = total / std::ldexp(1.0, S) / static_cast<double>(S);
    if (cls.symmetric_declared && est.value < 0.0)
        throw std::logic_error("declared-symmetric class produced a negative complexity");
    return est;
}

RademacherEstimate rademacher_mc(const EvaluatedClass& cls, long draws, std::uint64_t seed) {
    validate_class(cls);
    if (draws < 100) throw std::invalid_argument("rademacher_mc needs draws >= 100");
    const int S = cls.samples();
    const int K = cls.size();
    auto rng = make_rng(derive_seed(seed, stream::rademacher_mc));

    std::vector<double> signs(static_cast<size_t>(S));
    double mean = 0.0;
    double m2 = 0.0;
    for (long it = 0; it < draws; ++it) {
        for (int s = 0; s < S; ++s) signs[s] = (rng() >> 63) ? -1.0 : 1.0;
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < K; ++j) {
            double dot = 0.0;
            for (int s = 0; s < S; ++s) dot += signs[s] * cls.values(j, s);
            best = std::max(best, dot);
        }
        const double x = best / static_cast<double>(S);
        const double delta = x - mean;
        mean += delta / static_cast<double>(it + 1);
        m2 += delta * (x - mean);
    }
    RademacherEstimate est;
    est.kind = RademacherEstimate::Kind::monte_carlo;
    est.draws = draws;
    est.value = mean;
    const double var = m2 / static_cast<double>(draws - 1);
    est.half_width = 1.96 * std::sqrt(var / static_cast<double>(draws));
    return est;
}

ContractionReport contraction_check(const EvaluatedClass& cls, const ActivationSpec& act) {
    validate_class(cls);
    if (cls.samples() > kExactBudgetBits)
        throw std::invalid_argument("contraction_check exceeds the exact budget S <= 24");

    EvaluatedClass composed;
    composed.values.resize(cls.values.rows(), cls.values.cols());
    for (Eigen::Index j = 0; j < cls.values.rows(); ++j)
        for (Eigen::Index s = 0; s < cls.values.cols(); ++s)
            composed.values(j, s) = act(cls.values(j, s));

    ContractionReport report;
    report.samples = cls.samples();
    report.activation = act.name;
    report.r_g = rademacher_exact(cls).value;
    report.r_psi_g = rademacher_exact(composed).value;
    report.rhs_classic = act.lip() * report.r_g;
    report.slack = report.rhs_classic - report.r_psi_g;
    if (report.slack < -1e-12)
        throw std::logic_error("contraction inequality violated: slack = " +
                               std::to_string(report.slack));

    const double coeff = act.structural_coeff();
    if (coeff > 0.0) {
        report.implied_c = report.slack * static_cast<double>(report.samples) / coeff;
        report.bound_on_c =
            std::min(static_cast<double>(report.samples),
                     act.lip() * static_cast<double>(report.samples) * report.r_g / coeff);
        if (*report.implied_c > report.bound_on_c + 1e-9)
            throw std::logic_error("implied slack constant " + std::to_string(*report.implied_c) +
                                   " exceeds its admissible range " +
                                   std::to_string(report.bound_on_c));
    } else {
        report.bound_on_c = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

void validate(const SoftThresholdClassSpec& spec) {
    if (!(spec.eta > 0.0 && spec.gamma > 0.0 && spec.alpha > 0.0 && spec.beta > 0.0))
        throw std::invalid_argument("soft-threshold class needs eta, gamma, alpha, beta > 0");
    if (!(std::max(spec.alpha, spec.beta) < spec.gamma))
        throw std::invalid_argument("soft-threshold class needs max(alpha, beta) < gamma");
    if (spec.samples < 1) throw std::invalid_argument("soft-threshold class needs S >= 1");
}

namespace {

double binomial_exact(int top, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i)
        out = out * static_cast<double>(top - k + i) / static_cast<double>(i);
    return std::round(out);
}

}  // namespace

SoftThresholdComplexities example33_closed_form(const SoftThresholdClassSpec& spec) {
    validate(spec);
    const int S = spec.samples;
    const double binom = binomial_exact(S - 1, S / 2);
    SoftThresholdComplexities out;
    out.r_g = (spec.eta + spec.gamma) * binom / std::ldexp(1.0, S - 1);
    out.r_psi_g =
        (2.0 * spec.eta + 2.0 * spec.gamma - spec.beta - spec.alpha) * binom / std::ldexp(1.0, S);
    return out;
}

SoftThresholdComplexities example33_bruteforce(const SoftThresholdClassSpec& spec) {
    validate(spec);
    const int S = spec.samples;
    if (S > 20) throw std::invalid_argument("example33_bruteforce budget is S <= 20");

    // On unit-norm samples every member is the constant c1 + c2, ranging over
    // [alpha, eta+gamma] on one rectangle and [-eta-gamma, -beta] on the other.
    const double g_candidates[4] = {spec.alpha, spec.eta + spec.gamma, -spec.eta - spec.gamma,
                                    -spec.beta};
    double psi_candidates[4];
    for (int i = 0; i < 4; ++i) {
        const double v = g_candidates[i];
        psi_candidates[i] = std::max(v - spec.alpha, 0.0) - std::max(-v - spec.beta, 0.0);
    }

    NeumaierSum sum_g, sum_psi;
    const std::uint64_t count = static_cast<std::uint64_t>(1) << S;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const double a =
            static_cast<double>(S) - 2.0 * static_cast<double>(std::popcount(mask));
        double best_g = a * g_candidates[0];
        double best_psi = a * psi_candidates[0];
        for (int i = 1; i < 4; ++i) {
            best_g = std::max(best_g, a * g_candidates[i]);
            best_psi = std::max(best_psi, a * psi_candidates[i]);
        }
        sum_g.add(best_g);
        sum_psi.add(best_psi);
    }
    const double scale = std::ldexp(1.0, S) * static_cast<double>(S);
    return {sum_g.get() / scale, sum_psi.get() / scale};
}

EvaluatedClass example33_endpoint_class(const SoftThresholdClassSpec& spec) {
    validate(spec);
    EvaluatedClass cls;
    cls.values.resize(4, spec.samples);
    const double candidates[4] = {spec.alpha, spec.eta + spec.gamma, -spec.eta - spec.gamma,
                                  -spec.beta};
    for (int j = 0; j < 4; ++j) cls.values.row(j).setConstant(candidates[j]);
    cls.labels = {"c1+c2 = alpha", "c1+c2 = eta+gamma", "c1+c2 = -eta-gamma",
                  "c1+c2 = -beta"};
    return cls;
}

EvaluatedClass hypothesis_class_eval(const std::vector<DiscreteParams>& params_grid,
                                     const ActivationSpec& act, int coord,
                                     const std::vector<Eigen::VectorXd>& data) {
    if (params_grid.empty()) throw std::invalid_argument("parameter grid is empty");
    const int n = params_grid.front().n();
    const int n_d = params_grid.front().n_d();
    const int m = params_grid.front().m();
    const int L = params_grid.front().depth();
    for (const auto& p : params_grid) {
        if (p.n() != n || p.n_d() != n_d || p.m() != m || p.depth() != L)
            throw std::invalid_argument("parameter grid mixes architectures");
    }
    if (coord < 0 || coord >= n) throw std::out_of_range("coordinate out of range [0, n)");
    EvaluatedClass cls;
    cls.values.resize(static_cast<Eigen::Index>(params_grid.size()),
                      static_cast<Eigen::Index>(data.size()));
    for (size_t j = 0; j < params_grid.size(); ++j) {
        for (size_t s = 0; s < data.size(); ++s) {
            const auto traj = discrete_forward(params_grid[j], act, data[s]);
            cls.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) =
                traj.states.back()[coord];
        }
    }
    return cls;
}

}  // namespace resflow
