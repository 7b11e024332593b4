#include "resflow/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace resflow {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void validate_common(const BoundInputs& in) {
    validate(in.budget);
    if (in.n < 1 || in.n_d < 1) throw std::invalid_argument("bound inputs need n, n_d >= 1");
    if (in.S < 1) throw std::invalid_argument("bound inputs need S >= 1");
    if (!(in.T >= 0.0)) throw std::invalid_argument("bound inputs need T >= 0");
    if (!(in.delta > 0.0 && in.delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1), got " + std::to_string(in.delta));
}

// Returns the slack value to use, rejecting or clamping out-of-range entries.
double admit_slack(double c, double upper, bool clamp) {
    if (clamp) return std::clamp(c, 0.0, upper);
    if (c < 0.0 || c > upper)
        throw std::invalid_argument("slack constant " + std::to_string(c) +
                                    " outside its admissible range [0, " +
                                    std::to_string(upper) + "]");
    return c;
}

}  // namespace

double slack_upper_limit(const ActivationSpec& act, const ParamBudget& budget, long S) {
    const double coeff = act.structural_coeff();
    const double s = static_cast<double>(S);
    if (coeff <= 0.0) return s;
    return std::min(std::sqrt(s) * (1.0 + 2.0 * act.lip() * budget.b_theta) / (2.0 * coeff), s);
}

double m_factor(double T, const ActivationSpec& act, int n_d, const ParamBudget& budget) {
    validate(budget);
    if (n_d < 1) throw std::invalid_argument("m_factor needs n_d >= 1");
    if (!(T >= 0.0)) throw std::invalid_argument("m_factor needs T >= 0");
    const double lip = act.lip();
    const double B = budget.b_theta;
    return (lip * budget.b_in * std::sqrt(2.0 * std::log(2.0 * static_cast<double>(n_d))) + 1.0 +
            T * (1.0 + 2.0 * lip * B)) *
           std::exp(2.0 * T * lip * B * B);
}

BoundReport discrete_bound(const BoundInputs& in) {
    validate_common(in);
    if (in.L < 1) throw std::invalid_argument("discrete bound needs L >= 1");
    if (in.c_slack.size() != static_cast<size_t>(in.L))
        throw std::invalid_argument("discrete bound needs one slack constant per layer");

    const double lip = in.act.lip();
    const double B = in.budget.b_theta;
    const double sqrtS = std::sqrt(static_cast<double>(in.S));
    const double tau = in.T / static_cast<double>(in.L);
    const double upper = slack_upper_limit(in.act, in.budget, in.S);

    BoundReport report;
    report.m_factor = m_factor(in.T, in.act, in.n_d, in.budget);
    report.leading = 2.0 * kSqrt2 * static_cast<double>(in.n) * in.b_kappa * B *
                     report.m_factor / sqrtS;
    report.concentration =
        4.0 * in.b_ell * std::sqrt(2.0 * std::log(4.0 / in.delta) / static_cast<double>(in.S));

    double slack_sum = 0.0;
    for (double c : in.c_slack) slack_sum += admit_slack(c, upper, in.clamp_slack);
    report.structural = -2.0 * kSqrt2 * static_cast<double>(in.n) * in.b_kappa * B *
                        in.act.structural_coeff() * std::exp(in.T * lip * B * B) /
                        static_cast<double>(in.S) * tau * slack_sum;
    report.total = report.leading + report.concentration + report.structural;
    return report;
}

BoundReport continuous_bound(const BoundInputs& in, ContinuousConvention convention) {
    validate_common(in);
    if (in.c_slack.size() != 1)
        throw std::invalid_argument("continuous bound needs exactly one slack constant");
    const double upper = slack_upper_limit(in.act, in.budget, in.S);
    const double c = admit_slack(in.c_slack[0], upper, in.clamp_slack);

    const double lip = in.act.lip();
    const double B = in.budget.b_theta;
    const double sqrtS = std::sqrt(static_cast<double>(in.S));

    BoundReport report;
    report.m_factor = m_factor(in.T, in.act, in.n_d, in.budget);
    report.leading = 2.0 * kSqrt2 * static_cast<double>(in.n) * in.b_kappa * B *
                     report.m_factor / sqrtS;
    report.concentration =
        4.0 * in.b_ell * std::sqrt(2.0 * std::log(4.0 / in.delta) / static_cast<double>(in.S));
    const double prefactor = convention == ContinuousConvention::match_discrete
                                 ? 2.0 * kSqrt2 * static_cast<double>(in.n) * in.b_kappa * B
                                 : 1.0;
    report.structural = -prefactor * in.act.structural_coeff() *
                        std::exp(in.T * lip * B * B) * in.T / static_cast<double>(in.S) * c;
    report.total = report.leading + report.concentration + report.structural;
    return report;
}

std::vector<double> layered_recursion(const BoundInputs& in) {
    validate_common(in);
    if (in.L < 1) throw std::invalid_argument("layered recursion needs L >= 1");
    if (in.c_slack.size() != static_cast<size_t>(in.L))
        throw std::invalid_argument("layered recursion needs one slack constant per layer");

    const double lip = in.act.lip();
    const double B = in.budget.b_theta;
    const double sqrtS = std::sqrt(static_cast<double>(in.S));
    const double tau = in.T / static_cast<double>(in.L);
    const double upper = slack_upper_limit(in.act, in.budget, in.S);

    std::vector<double> r;
    r.reserve(static_cast<size_t>(in.L) + 1);
    r.push_back(lip * B * (in.budget.b_in * std::sqrt(2.0 * std::log(2.0 * in.n_d)) + 1.0) /
                sqrtS);
    const double growth = 1.0 + tau * 2.0 * lip * B * B;
    const double positive = tau * (B / sqrtS) * (1.0 + 2.0 * lip * B);
    for (int l = 0; l < in.L; ++l) {
        const double c = admit_slack(in.c_slack[static_cast<size_t>(l)], upper, in.clamp_slack);
        const double negative =
            tau * B * in.act.structural_coeff() * c / static_cast<double>(in.S);
        r.push_back(r.back() * growth + std::max(positive - negative, 0.0));
    }
    return r;
}

}  // namespace resflow
