#include "aoisim/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace aoisim {

void SystemParams::validate() const {
    if (num_devices < 1)
        throw std::invalid_argument("num_devices must be >= 1");
    if (battery_capacity < 1)
        throw std::invalid_argument("battery_capacity must be >= 1");
    if (tx_cost < 1)
        throw std::invalid_argument("tx_cost must be >= 1");
    if (energy_floor < 0)
        throw std::invalid_argument("energy_floor must be >= 0");
    if (battery_capacity <= energy_floor + tx_cost)
        throw std::invalid_argument("battery_capacity must exceed energy_floor + tx_cost");
    if (harvest_prob < 0.0 || harvest_prob > 1.0)
        throw std::invalid_argument("harvest_prob must lie in [0,1]");
    if (aoi_max < 1)
        throw std::invalid_argument("aoi_max must be >= 1");
}

int update_energy(int energy, bool harvested, bool transmitted, const SystemParams& params) {
    if (transmitted && energy < params.tx_cost)
        throw std::logic_error("transmission decided with energy below tx_cost");
    const int charged = std::min(energy + (harvested ? 1 : 0), params.battery_capacity);
    return charged - (transmitted ? params.tx_cost : 0);
}

AoiUpdate update_aoi(int aoi, bool success, const SystemParams& params) {
    if (success)
        return {1, false};
    if (aoi < params.aoi_max)
        return {aoi + 1, false};
    return {1, true};  // stale packet discarded, fresh one replaces it
}

double normalized_energy(int energy, const SystemParams& params) {
    return static_cast<double>(energy - params.energy_floor) /
           static_cast<double>(params.battery_capacity - params.energy_floor);
}

double normalized_aoi(int aoi, const SystemParams& params) {
    return static_cast<double>(aoi) / static_cast<double>(params.aoi_max);
}

}  // namespace aoisim
