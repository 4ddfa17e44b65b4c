#pragma once

#include <string>
#include <variant>

#include "aoisim/model.hpp"

namespace aoisim {

// Transmission probability as a function of the battery level.
struct ConstantProb {
    double k = 1.0;
    bool operator==(const ConstantProb&) const = default;
};
struct LinearProb {
    double c = 1.0;  // slope; caps at p=1 before full battery when c > 1
    bool operator==(const LinearProb&) const = default;
};
struct EllipticalProb {
    double c = 1.0;  // scales the quarter-ellipse; caps at p=1 when c > 1
    bool operator==(const EllipticalProb&) const = default;
};

using ProbFunction = std::variant<ConstantProb, LinearProb, EllipticalProb>;

// Access policies. NoPolicy transmits whenever the reserve condition holds;
// ThresholdOnly adds the weighted age/energy threshold with p=1; Proposed
// additionally randomizes with an energy-dependent probability; Adra is the
// age-threshold baseline that ignores the battery reserve.
struct NoPolicy {
    bool operator==(const NoPolicy&) const = default;
};

struct ThresholdOnly {
    double alpha = 0.5;
    double tau = 0.5;
    bool operator==(const ThresholdOnly&) const = default;
};

struct Proposed {
    double alpha = 0.5;
    double tau = 0.5;
    ProbFunction prob = ConstantProb{1.0};
    bool operator==(const Proposed&) const = default;
};

struct Adra {
    int age_threshold = 1;
    double p = 1.0;
    // When true, gate at tx_cost + energy_floor like the other policies;
    // default gates at tx_cost only, letting the battery dip below the floor.
    bool respect_reserve = false;
    bool operator==(const Adra&) const = default;
};

using PolicyConfig = std::variant<NoPolicy, ThresholdOnly, Proposed, Adra>;

// energy >= tx_cost + energy_floor: enough to transmit and keep the reserve.
bool energy_eligible(const DeviceState& state, const SystemParams& params);

// (1-alpha)*E_norm + alpha*aoi_norm >= tau.
bool threshold_met(const DeviceState& state, double alpha, double tau, const SystemParams& params);

// Evaluates the transmission probability at the given battery level; output
// is clamped to [0,1].
double eval_prob(const ProbFunction& f, int energy, const SystemParams& params);

// Per-slot transmit/hold decision. `u` is the device's fresh uniform draw in
// [0,1) for this slot; p=0 never transmits and p=1 always does (u < p).
bool decide(const PolicyConfig& policy, const DeviceState& state, const SystemParams& params,
            double u);

// Throws std::invalid_argument naming the offending field.
void validate_policy(const PolicyConfig& policy, const SystemParams& params);

// Short identifier for reports: none, threshold_only, proposed_constant,
// proposed_linear, proposed_elliptical, adra.
std::string policy_label(const PolicyConfig& policy);

}  // namespace aoisim
