#include "construal/stats.hpp"

#include "construal/errors.hpp"
#include "construal/mdp.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace construal {

Correlation pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw ValidationError("correlation inputs differ in length");
    if (xs.size() < 3)
        throw ValidationError("correlation needs at least 3 paired points");
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ValidationError("correlation is undefined for zero-variance input");

    Correlation out;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double dof = n - 2.0;
    const double one_minus_r2 = 1.0 - out.r * out.r;
    if (one_minus_r2 <= 0.0) {
        out.p_value = std::numeric_limits<double>::min();
        return out;
    }
    const double t = std::abs(out.r) * std::sqrt(dof / one_minus_r2);
    const boost::math::students_t dist(dof);
    out.p_value = std::max(2.0 * boost::math::cdf(boost::math::complement(dist, t)),
                           std::numeric_limits<double>::min());
    return out;
}

double binomial_test_one_sided(int k, int n, double p0) {
    if (n < 0 || k < 0 || k > n)
        throw ValidationError("binomial test needs 0 <= k <= n");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw ValidationError("binomial test needs 0 < p0 < 1");
    if (k == 0)
        return 1.0;
    const double log_p = std::log(p0);
    const double log_q = std::log1p(-p0);
    const double log_n_fact = std::lgamma(n + 1.0);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - k + 1));
    for (int i = k; i <= n; ++i)
        terms.push_back(log_n_fact - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * log_p +
                        (n - i) * log_q);
    return std::min(1.0, std::exp(log_sum_exp(terms)));
}

} // namespace construal
