#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tdc/datagen.hpp"
#include "tdc/entropy.hpp"

namespace tdc::test {

// Reference pulse-count frequencies (tracker sample), values 0..8.
inline const std::vector<double>& pulses_weights() {
    static const std::vector<double> w{0.8825,   0.06591, 0.01948,
                                       0.009375, 0.01503, 0.00653,
                                       0.00101,  0.00013, 2e-6};
    return w;
}

inline Distribution pulses_distribution() {
    return Distribution::from_weights(pulses_weights());
}

inline std::vector<double> random_weights(std::mt19937_64& rng, size_t m) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> w(m);
    for (double& v : w) v = u(rng);
    return w;
}

} // namespace tdc::test
