#include "bmdf/numerics.hpp"

#include <algorithm>

#include <boost/math/special_functions/gamma.hpp>

namespace bmdf::num {

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return kNegInf;
    const double hi = *std::max_element(values.begin(), values.end());
    if (hi == kNegInf || !std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

double log_normal_cdf(double z) {
    if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
    // Asymptotic Mills-ratio series; relative error below 1e-12 for z <= -30.
    const double z2 = z * z;
    const double inv = 1.0 / z2;
    const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
    return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) return kNegInf;
    const double y = rate * x;
    if (y > shape) {
        // Upper tail is the small quantity here.
        const double q = boost::math::gamma_q(shape, y);
        return std::log1p(-q);
    }
    const double p = boost::math::gamma_p(shape, y);
    if (p > 1e-250) return std::log(p);
    // Series P(a, y) = y^a e^-y / Gamma(a+1) * sum_k y^k / prod_{j<=k}(a+j).
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
        term *= y / (shape + k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return shape * std::log(y) - y - std::lgamma(shape + 1.0) + std::log(sum);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 16) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const auto half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace bmdf::num
