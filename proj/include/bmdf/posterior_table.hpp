#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bmdf {

// Normalized posterior mass over Theta = {0,1}^M. Entry i holds pi(theta | x)
// for the state whose bit m (least significant first) is theta_m.
struct PosteriorTable {
    std::size_t m = 0;
    std::vector<double> prob;

    static constexpr std::size_t max_components = 20;

    std::size_t states() const { return prob.size(); }
    static bool bit(std::size_t state, std::size_t component) { return (state >> component) & 1U; }
};

}  // namespace bmdf
