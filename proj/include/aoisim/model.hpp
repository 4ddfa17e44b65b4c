#pragma once

namespace aoisim {

// Network-wide constants, shared by every device.
struct SystemParams {
    int num_devices = 50;        // D
    int battery_capacity = 100;  // B, energy units
    int tx_cost = 10;            // E, energy units per transmission attempt
    int energy_floor = 1;        // E_min, reserve that must remain after a transmission
    double harvest_prob = 0.5;   // eta, per-slot Bernoulli arrival of one energy unit
    int aoi_max = 200;           // maximum permissible AoI, slots

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// One device's per-slot state.
struct DeviceState {
    int energy = 0;
    int aoi = 1;
};

struct AoiUpdate {
    int aoi = 1;
    bool discarded = false;
};

// Battery update for one slot: the harvested unit is added (capped at
// capacity) before the transmission cost is subtracted.
// Throws std::logic_error if asked to transmit with energy < tx_cost.
int update_energy(int energy, bool harvested, bool transmitted, const SystemParams& params);

// Age update for one slot: reset to 1 on success; at aoi_max without success
// the packet is discarded and the age resets; otherwise increment by 1.
AoiUpdate update_aoi(int aoi, bool success, const SystemParams& params);

// (energy - E_min) / (B - E_min), in [0,1] for energy in [E_min, B].
double normalized_energy(int energy, const SystemParams& params);

// aoi / aoi_max, in (0,1] for aoi in [1, aoi_max].
double normalized_aoi(int aoi, const SystemParams& params);

}  // namespace aoisim
