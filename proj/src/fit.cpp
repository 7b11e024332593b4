#include "resflow/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace resflow {

namespace {

void check_sizes(const std::vector<double>& x, const std::vector<double>& y, size_t at_least) {
    if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
    if (x.size() < at_least)
        throw std::invalid_argument("fit needs at least " + std::to_string(at_least) +
                                    " points");
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

FitResult fit_inverse_sqrt(const std::vector<double>& sample_sizes,
                           const std::vector<double>& gaps) {
    check_sizes(sample_sizes, gaps, 2);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < gaps.size(); ++i) {
        if (!(sample_sizes[i] > 0.0)) throw std::invalid_argument("sample sizes must be positive");
        num += gaps[i] / std::sqrt(sample_sizes[i]);
        den += 1.0 / sample_sizes[i];
    }
    FitResult fit;
    fit.mu = num / den;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean =
        std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    for (size_t i = 0; i < gaps.size(); ++i) {
        const double r = gaps[i] - fit.mu / std::sqrt(sample_sizes[i]);
        ss_res += r * r;
        ss_tot += (gaps[i] - mean) * (gaps[i] - mean);
    }
    fit.residual_rms = std::sqrt(ss_res / static_cast<double>(gaps.size()));
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

double fit_inverse_sqrt_iterative(const std::vector<double>& sample_sizes,
                                  const std::vector<double>& gaps, int iterations) {
    check_sizes(sample_sizes, gaps, 2);
    double mu = 0.0;
    double den = 0.0;
    for (double s : sample_sizes) den += 1.0 / s;
    for (int it = 0; it < iterations; ++it) {
        double grad = 0.0;
        for (size_t i = 0; i < gaps.size(); ++i) {
            const double invs = 1.0 / std::sqrt(sample_sizes[i]);
            grad += 2.0 * (mu * invs - gaps[i]) * invs;
        }
        mu -= grad / (2.0 * den);  // exact Newton step on the quadratic
    }
    return mu;
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    check_sizes(x, y, 2);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("slope undefined: x values coincide");
    return num / den;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    check_sizes(x, y, 2);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

}  // namespace resflow
