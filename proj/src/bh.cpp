#include "bmdf/bh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "bmdf/errors.hpp"

namespace bmdf {

ActionVector bh_decide(const PValueVector& p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigurationError("BH level must lie in (0, 1)");
    if (p.empty()) throw DimensionError("BH needs at least one p-value");
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("p-values must lie in [0, 1]");
    }
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::size_t last = 0;  // number of rejections
    for (std::size_t i = m; i >= 1; --i) {
        if (p[order[i - 1]] <= static_cast<double>(i) * q / static_cast<double>(m)) {
            last = i;
            break;
        }
    }
    ActionVector a(m, 0);
    if (last == 0) return a;
    const double cutoff = p[order[last - 1]];
    for (std::size_t i = 0; i < m; ++i) a[i] = p[i] <= cutoff ? 1 : 0;
    return a;
}

namespace {

double two_sided_normal(double z) {
    static const boost::math::normal_distribution<double> std_normal;
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(std_normal, std::fabs(z))));
}

}  // namespace

PValueVector p_values_for_model(const MarginalModel& model, const DataMatrix& data) {
    validate_data(model, data);
    PValueVector out(data.size());
    if (std::holds_alternative<GaussianSpike>(model)) {
        for (std::size_t m = 0; m < data.size(); ++m) out[m] = two_sided_normal(data.row(m)[0]);
    } else if (const auto* t = std::get_if<TwoGroupGaussian>(&model)) {
        if (t->n1 + t->n2 < 3) throw ConfigurationError("t test needs n1 + n2 >= 3 for a variance estimate");
        const double df = static_cast<double>(t->n1 + t->n2 - 2);
        const boost::math::students_t_distribution<double> dist(df);
        for (std::size_t m = 0; m < data.size(); ++m) {
            const auto st = two_group_stats(data.row(m), t->n1, t->n2);
            const double diff = st.mean1 - st.mean2;
            const double s2 = (st.ss1 + st.ss2) / df;
            const double se2 = s2 * (1.0 / static_cast<double>(t->n1) + 1.0 / static_cast<double>(t->n2));
            if (diff == 0.0) {
                out[m] = 1.0;
            } else if (!(se2 > 0.0)) {
                out[m] = 0.0;
            } else {
                const double tstat = std::fabs(diff) / std::sqrt(se2);
                out[m] = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, tstat)));
            }
        }
    } else if (const auto* e = std::get_if<ExponentialPair>(&model)) {
        const boost::math::chi_squared_distribution<double> chi1(1.0);
        const double n = static_cast<double>(e->n);
        for (std::size_t m = 0; m < data.size(); ++m) {
            double s = 0.0;
            for (double v : data.row(m)) s += v;
            const double y = e->lambda0 * s / n;  // lambda0 / lambda_hat
            const double stat = std::max(0.0, 2.0 * n * (y - 1.0 - std::log(y)));
            out[m] = stat == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(chi1, stat));
        }
    } else {
        throw ConfigurationError("no p-value recipe for a user-supplied density pair");
    }
    return out;
}

}  // namespace bmdf
