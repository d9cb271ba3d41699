#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>

namespace bmdf::num {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values);

// log(1 - exp(-x)) for x >= 0.
inline double log1m_exp_neg(double x) {
    return x > std::numbers::ln2 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

inline double log_normal_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

// log Phi(z) accurate far into the lower tail.
double log_normal_cdf(double z);

// log P(X <= x) for X ~ Gamma(shape, rate), accurate when the value underflows.
double log_gamma_cdf(double x, double shape, double rate);

inline double log_gamma_pdf(double x, double shape, double rate) {
    return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape);
}

// Pairwise summation; bounded rounding drift for long reductions.
double pairwise_sum(std::span<const double> values);

}  // namespace bmdf::num
