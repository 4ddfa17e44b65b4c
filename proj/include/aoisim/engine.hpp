#pragma once

#include <cstdint>
#include <vector>

#include "aoisim/model.hpp"
#include "aoisim/policy.hpp"
#include "aoisim/rng.hpp"

namespace aoisim {

struct SimConfig {
    SystemParams params;
    PolicyConfig policy;
    uint64_t num_slots = 1'000'000;  // measured slots
    uint64_t warmup_slots = 10'000;  // excluded from statistics
    uint32_t num_replications = 10;
    uint64_t seed = 1;

    void validate() const;
};

struct EventCounts {
    uint64_t successes = 0;
    uint64_t collisions = 0;
    uint64_t idle_slots = 0;
    uint64_t discards = 0;
    uint64_t packets_generated = 0;  // closed packet epochs: successes + discards
};

struct SimResult {
    double aaoi = 0.0;  // network AAoI: per-device time average, averaged over devices
    double avp = 0.0;   // discards / packets_generated
    bool avp_defined = true;  // false when no packet epoch closed in the window
    std::vector<double> per_device_aaoi;
    EventCounts counts;
    double mean_energy_empirical = 0.0;
    double ci_halfwidth_aaoi = 0.0;  // 95% normal approximation across replications
    int min_energy_observed = 0;     // over all devices, slot boundaries, replications
    std::vector<double> replication_aaoi;
};

struct SlotOutcome {
    int transmitters = 0;
    bool success = false;  // exactly one transmitter
    int winner = -1;       // device index of the successful transmitter
    int discards = 0;      // devices whose age hit aoi_max without delivery
};

struct Avp {
    double value = 0.0;
    bool defined = true;
};

Avp compute_avp(uint64_t discards, uint64_t packets);

// Per-slot transition of the whole network. Keeps scratch buffers so the hot
// loop does not allocate; one instance per replication.
//
// The transmit decision is precomputed into per-energy-level tables (the
// threshold condition is monotone in the age, so each policy reduces to
// "aoi >= age_gate[energy] and u < tx_prob[energy]"). The tables are filled
// by evaluating decide() itself, so both paths agree exactly, boundary cases
// included.
class SlotEngine {
public:
    SlotEngine(const SystemParams& params, const PolicyConfig& policy);

    // Draws harvest then decision for devices 0..D-1, resolves the collision
    // channel (success iff exactly one transmitter) and applies both state
    // updates. Collided transmitters pay the full cost and age normally.
    SlotOutcome step(std::vector<DeviceState>& states, RandomStream& rng);

private:
    SystemParams params_;
    std::vector<int> age_gate_;     // indexed by energy level, aoi_max+1 = never
    std::vector<double> tx_prob_;   // indexed by energy level
    std::vector<uint8_t> harvested_;
    std::vector<uint8_t> transmitted_;
};

// One-off convenience wrapper around SlotEngine.
SlotOutcome run_slot(std::vector<DeviceState>& states, const PolicyConfig& policy,
                     const SystemParams& params, RandomStream& rng);

// Runs all replications (in parallel when num_threads > 1) and merges their
// statistics in replication order; the result is a deterministic function of
// cfg alone. Devices start at full battery with age 1.
SimResult run_simulation(const SimConfig& cfg, int num_threads = 1);

}  // namespace aoisim
