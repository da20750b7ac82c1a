#pragma once

#include <span>

namespace construal {

struct Correlation {
    double r = 0.0;
    /// Two-sided, Student t with n - 2 degrees of freedom.
    double p_value = 1.0;
};

/// Pearson r. Needs equal lengths >= 3 and nonzero variance in both inputs.
Correlation pearson_correlation(std::span<const double> xs, std::span<const double> ys);

/// Exact upper tail P(X >= k) for X ~ Binomial(n, p0).
double binomial_test_one_sided(int k, int n, double p0);

} // namespace construal
