#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aoisim/model.hpp"
#include "aoisim/policy.hpp"

namespace aoisim::dtmc {

// Dense row-stochastic matrix over a contiguous integer state range
// [first_state, first_state + size - 1]. Rows/columns are indexed 0-based;
// state_at maps an index back to its state label.
class TransitionMatrix {
public:
    TransitionMatrix(int first_state, int size);

    int size() const { return size_; }
    int first_state() const { return first_state_; }
    int state_at(int index) const { return first_state_ + index; }
    int index_of(int state) const { return state - first_state_; }

    double& at(int row, int col) { return data_[static_cast<size_t>(row) * size_ + col]; }
    double at(int row, int col) const { return data_[static_cast<size_t>(row) * size_ + col]; }

    // max over rows of |row sum - 1|
    double max_row_sum_error() const;

private:
    int first_state_;
    int size_;
    std::vector<double> data_;
};

struct StationaryDist {
    int first_state = 0;
    std::vector<double> probs;
    std::string method;     // "linear_solve" or "power_iteration"
    int iterations = 0;     // 0 for the direct solve
    double residual = 0.0;  // ||pi*M - pi||_inf

    double at_state(int state) const { return probs[static_cast<size_t>(state - first_state)]; }
};

// Energy-level chain over states [energy_floor, battery_capacity]. tx_prob(m)
// gives the per-slot transmission probability at level m; it is consulted
// only at eligible levels (m >= energy_floor + tx_cost) and must return a
// value in [0,1]. Below eligibility a state can only hold or harvest one unit.
TransitionMatrix build_energy_chain(const SystemParams& params,
                                    const std::function<double(int)>& tx_prob);

// Age chain over states [1, aoi_max]: deterministic increment below the
// threshold, reset with probability q*p' (q = (1-p')^(D-1)) from threshold up,
// and a forced reset at aoi_max.
TransitionMatrix build_aoi_chain(double p_prime, int num_devices, int fictional_t,
                                 const SystemParams& params);

// Solves pi*M = pi, sum(pi) = 1. Direct linear solve first, power iteration
// as fallback; throws std::runtime_error when the chain has more than one
// closed recurrent class (listing them) or when neither solver reaches the
// 1e-10 residual target.
StationaryDist solve_stationary(const TransitionMatrix& m);

// Stationary mass on levels that satisfy the transmission condition.
double prob_eligible(const StationaryDist& energy_dist, const SystemParams& params);

// Expected state label under the distribution (energy levels or AoI values).
double mean_state(const StationaryDist& dist);

inline double mean_energy(const StationaryDist& energy_dist) { return mean_state(energy_dist); }
inline double analytical_aaoi(const StationaryDist& aoi_dist) { return mean_state(aoi_dist); }

enum class ThresholdForm {
    Corrected,  // T = ceil(aoi_max * (tau - (1-alpha)*E_norm_mean) / alpha)
    Literal,    // T = ceil((tau - (1-alpha)*E_mean) / alpha), as printed
};

struct FictionalThreshold {
    int value = 1;            // clamped to [1, aoi_max] when satisfiable
    bool satisfiable = true;  // false iff alpha = 0 and the energy term never reaches tau
};

// Smallest age at which the weighted threshold condition holds at the average
// energy level. alpha = 0 removes the age term entirely: the condition is then
// satisfied at every age or at none, which the satisfiable flag reports.
FictionalThreshold fictional_threshold(double alpha, double tau, double mean_energy_level,
                                       const SystemParams& params,
                                       ThresholdForm form = ThresholdForm::Corrected);

struct CoupledSolution {
    StationaryDist energy_dist;
    StationaryDist aoi_dist;
    double p_e = 0.0;          // stationary probability of being eligible
    double mean_energy = 0.0;  // expected battery level
    double effective_p = 0.0;  // p': unconditional per-slot transmit probability
    double q = 1.0;            // (1 - p')^(D-1)
    FictionalThreshold fictional_t;
    double aaoi = 0.0;  // expectation of the stationary age distribution
    int iterations = 1;
};

// Chains the two models: energy chain -> (P_E, mean energy, p') -> fictional
// threshold -> age chain -> analytical AAoI. Accepts NoPolicy/ThresholdOnly
// (p = 1) and Proposed with any probability function; rejects Adra. When the
// threshold is never satisfiable, the age chain degenerates to the
// deterministic discard cycle.
CoupledSolution solve_coupled(const SystemParams& params, const PolicyConfig& policy,
                              ThresholdForm form = ThresholdForm::Corrected);

// Per-level transmission probability implied by a policy, as used by the
// energy chain: 0 below eligibility, the policy's p at eligible levels.
std::function<double(int)> policy_tx_prob(const PolicyConfig& policy, const SystemParams& params);

}  // namespace aoisim::dtmc
