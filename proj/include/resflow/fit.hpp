#pragma once

#include <vector>

namespace resflow {

struct FitResult {
    double mu = 0.0;
    double residual_rms = 0.0;
    double r_squared = 0.0;
};

// Least-squares fit of gap ~ mu / sqrt(S); closed form
//   mu = sum(gap_i / sqrt(S_i)) / sum(1 / S_i).
FitResult fit_inverse_sqrt(const std::vector<double>& sample_sizes,
                           const std::vector<double>& gaps);

// Same objective minimized iteratively (exact line search on the quadratic);
// independent route used to cross-check the closed form.
double fit_inverse_sqrt_iterative(const std::vector<double>& sample_sizes,
                                  const std::vector<double>& gaps, int iterations = 64);

// Ordinary least-squares slope of y against x.
double linear_slope(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation; ties get average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace resflow
