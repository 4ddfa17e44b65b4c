#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoisim/engine.hpp"
#include "aoisim/policy.hpp"

namespace aoisim {

enum class Objective { Aaoi, Avp };

struct SimBudget {
    uint64_t num_slots = 1'000'000;
    uint64_t warmup_slots = 10'000;
    uint32_t num_replications = 10;
};

// Which policy family the grid enumerates. Constant covers the fixed-K
// proposed variant; Linear/Elliptical sweep c instead of k.
enum class PolicyFamily { None, ThresholdOnly, ProposedConstant, ProposedLinear,
                          ProposedElliptical, Adra };

struct ParamGrid {
    PolicyFamily family = PolicyFamily::ProposedElliptical;
    std::vector<double> alpha_grid;
    std::vector<double> tau_grid;
    std::vector<double> c_grid;
    std::vector<double> k_grid;
    std::vector<int> adra_threshold_grid;
    std::vector<double> adra_p_grid;
    Objective objective = Objective::Aaoi;
    SimBudget budget;
    uint64_t seed = 1;

    // Coarse screen of every point at screen_budget, then the best
    // refine_top points re-evaluated at the full budget.
    bool two_stage = true;
    SimBudget screen_budget{20'000, 2'000, 2};
    int refine_top = 5;

    // Spec defaults: alpha, tau on a 0.05 grid; c on a 0.1 grid up to 3;
    // ADRA threshold {1, 5, 10, ..., aoi_max} and p on a 0.01 grid.
    static ParamGrid defaults(PolicyFamily family, const SystemParams& params);

    void validate() const;  // non-empty grids for the family, values in range
};

struct GridPoint {
    PolicyConfig config;
    int stage = 1;  // 1 = screen, 2 = refinement (or single full pass)
    double objective_value = 0.0;
    double aaoi = 0.0;
    double avp = 0.0;
    double ci_halfwidth_aaoi = 0.0;
    bool valid = true;
    std::string error;
};

struct OptResult {
    PolicyConfig best_config;
    double best_objective = 0.0;
    double best_aaoi = 0.0;
    double best_avp = 0.0;
    double best_ci_halfwidth = 0.0;
    std::vector<GridPoint> table;  // every evaluation, both stages, audit order
};

// All candidate configs in lexicographic grid order (first listed parameter
// varies slowest); ties in the search break toward the earliest entry.
std::vector<PolicyConfig> enumerate_grid(const ParamGrid& grid);

// Exhaustive search minimizing the objective at one network size. Every grid
// point reuses the same master seed, so replication streams are shared across
// points (common random numbers) and reruns reproduce the identical result.
OptResult grid_search(const ParamGrid& grid, int num_devices, const SystemParams& base,
                      int num_threads = 1);

struct SweepRow {
    int num_devices = 0;
    OptResult result;
};

// Per-D optimization across a device-count grid.
std::vector<SweepRow> sweep_over_d(const std::vector<int>& d_values, const ParamGrid& grid,
                                   const SystemParams& base, int num_threads = 1);

}  // namespace aoisim
