#pragma once

#include <cstdint>
#include <vector>

#include "aoisim/model.hpp"
#include "aoisim/rng.hpp"

namespace aoisim::test {

// Deterministic case generator for property-style tests.
class CaseGen {
public:
    explicit CaseGen(uint64_t seed) : rng_(seed, 0) {}

    double uniform() { return rng_.next_uniform(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }
    bool coin() { return uniform() < 0.5; }

    SystemParams params() {
        SystemParams p;
        p.num_devices = integer(1, 8);
        p.energy_floor = integer(0, 3);
        p.tx_cost = integer(1, 12);
        p.battery_capacity = p.energy_floor + p.tx_cost + integer(1, 60);
        p.harvest_prob = uniform();
        p.aoi_max = integer(1, 50);
        return p;
    }

    DeviceState state_in(const SystemParams& p) {
        return {integer(p.energy_floor, p.battery_capacity), integer(1, p.aoi_max)};
    }

private:
    RandomStream rng_;
};

}  // namespace aoisim::test
