#pragma once

#include "vrf/frames.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace vrf::fixtures {

inline Pose6D random_pose(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::normal_distribution<double> n;
    Quat q{n(rng), n(rng), n(rng), n(rng)};
    return {{u(rng), u(rng), u(rng)}, q.normalized()};
}

/// Random forest of `count` frames named f0, f1, ...; no chain is deeper
/// than `max_depth` below the zero frame.
inline FrameForest random_forest(std::mt19937_64& rng, int count, int max_depth) {
    FrameForest forest;
    std::vector<int> depth;
    for (int i = 0; i < count; ++i) {
        std::string parent;
        int d = 1;
        const int choice = std::uniform_int_distribution<int>(-1, i - 1)(rng);
        if (choice >= 0 && depth[choice] < max_depth) {
            parent = "f" + std::to_string(choice);
            d = depth[choice] + 1;
        }
        forest.add("f" + std::to_string(i), random_pose(rng), parent);
        depth.push_back(d);
    }
    return forest;
}

}  // namespace vrf::fixtures
