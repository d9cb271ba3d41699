#pragma once

#include <vector>

#include "bmdf/loss.hpp"
#include "bmdf/models.hpp"

namespace bmdf {

using PValueVector = std::vector<double>;

// Benjamini-Hochberg step-up at level q: reject every p <= p_(i*) where i* is
// the largest i with p_(i) <= i q / M.
ActionVector bh_decide(const PValueVector& p, double q);

// Per-component p-values under the null:
//   GaussianSpike    two-sided z test of mu = 0
//   TwoGroupGaussian two-sided pooled-variance two-sample t test
//   ExponentialPair  likelihood-ratio test of rate = lambda0, chi-square(1) calibration
PValueVector p_values_for_model(const MarginalModel& model, const DataMatrix& data);

}  // namespace bmdf
