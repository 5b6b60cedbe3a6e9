#pragma once

// Shared random-instance generators for the test suites. All generators take
// an explicit engine so every test is reproducible from its stated seed.

#include <random>

#include "itebounds/core.hpp"

namespace test_helpers {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Random pmf on an integer support of the given size starting at `origin`,
// optionally keeping only a random subset of points (gaps in the support).
inline iteb::DiscretePMF random_pmf(std::mt19937_64& rng, std::size_t size,
                                    int origin = 0, int spread = 0) {
    std::vector<double> support(size), weights(size);
    int value = origin;
    double total = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
        support[k] = value;
        value += 1 + (spread > 0 ? static_cast<int>(rng() % (spread + 1)) : 0);
        weights[k] = 0.05 + uniform01(rng);
        total += weights[k];
    }
    for (double& w : weights) w /= total;
    return iteb::DiscretePMF(std::move(support), std::move(weights));
}

}  // namespace test_helpers
