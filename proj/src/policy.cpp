#include "aoisim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoisim {

namespace {

double clamp01(double x) {
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace

bool energy_eligible(const DeviceState& state, const SystemParams& params) {
    return state.energy >= params.tx_cost + params.energy_floor;
}

bool threshold_met(const DeviceState& state, double alpha, double tau,
                   const SystemParams& params) {
    const double weighted = (1.0 - alpha) * normalized_energy(state.energy, params) +
                            alpha * normalized_aoi(state.aoi, params);
    return weighted >= tau;
}

double eval_prob(const ProbFunction& f, int energy, const SystemParams& params) {
    const int floor = params.energy_floor;
    const int span = params.battery_capacity - floor - params.tx_cost;  // > 0 by validation
    return std::visit(
        [&](const auto& fn) -> double {
            using T = std::decay_t<decltype(fn)>;
            if constexpr (std::is_same_v<T, ConstantProb>) {
                return fn.k;
            } else if constexpr (std::is_same_v<T, LinearProb>) {
                const double rise = static_cast<double>(energy - floor - params.tx_cost);
                return clamp01(fn.c * rise / span);
            } else {
                const double x = clamp01(static_cast<double>(energy - floor) / span);
                return clamp01(fn.c * (1.0 - std::sqrt(1.0 - x * x)));
            }
        },
        f);
}

bool decide(const PolicyConfig& policy, const DeviceState& state, const SystemParams& params,
            double u) {
    return std::visit(
        [&](const auto& pol) -> bool {
            using T = std::decay_t<decltype(pol)>;
            if constexpr (std::is_same_v<T, NoPolicy>) {
                return energy_eligible(state, params);
            } else if constexpr (std::is_same_v<T, ThresholdOnly>) {
                return energy_eligible(state, params) &&
                       threshold_met(state, pol.alpha, pol.tau, params);
            } else if constexpr (std::is_same_v<T, Proposed>) {
                return energy_eligible(state, params) &&
                       threshold_met(state, pol.alpha, pol.tau, params) &&
                       u < eval_prob(pol.prob, state.energy, params);
            } else {
                const int gate =
                    pol.respect_reserve ? params.tx_cost + params.energy_floor : params.tx_cost;
                return state.aoi >= pol.age_threshold && state.energy >= gate && u < pol.p;
            }
        },
        policy);
}

void validate_policy(const PolicyConfig& policy, const SystemParams& params) {
    const auto check_unit = [](double v, const char* name) {
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
    };
    const auto check_prob_fn = [&](const ProbFunction& f) {
        if (const auto* k = std::get_if<ConstantProb>(&f)) {
            check_unit(k->k, "prob.k");
        } else if (const auto* lin = std::get_if<LinearProb>(&f)) {
            if (lin->c <= 0.0)
                throw std::invalid_argument("prob.c must be > 0");
        } else if (const auto* ell = std::get_if<EllipticalProb>(&f)) {
            if (ell->c <= 0.0)
                throw std::invalid_argument("prob.c must be > 0");
        }
    };
    std::visit(
        [&](const auto& pol) {
            using T = std::decay_t<decltype(pol)>;
            if constexpr (std::is_same_v<T, ThresholdOnly>) {
                check_unit(pol.alpha, "alpha");
                check_unit(pol.tau, "tau");
            } else if constexpr (std::is_same_v<T, Proposed>) {
                check_unit(pol.alpha, "alpha");
                check_unit(pol.tau, "tau");
                check_prob_fn(pol.prob);
            } else if constexpr (std::is_same_v<T, Adra>) {
                if (pol.age_threshold < 1 || pol.age_threshold > params.aoi_max)
                    throw std::invalid_argument("age_threshold must lie in [1, aoi_max]");
                check_unit(pol.p, "p");
            }
        },
        policy);
}

std::string policy_label(const PolicyConfig& policy) {
    return std::visit(
        [](const auto& pol) -> std::string {
            using T = std::decay_t<decltype(pol)>;
            if constexpr (std::is_same_v<T, NoPolicy>) {
                return "none";
            } else if constexpr (std::is_same_v<T, ThresholdOnly>) {
                return "threshold_only";
            } else if constexpr (std::is_same_v<T, Proposed>) {
                if (std::holds_alternative<ConstantProb>(pol.prob)) return "proposed_constant";
                if (std::holds_alternative<LinearProb>(pol.prob)) return "proposed_linear";
                return "proposed_elliptical";
            } else {
                return "adra";
            }
        },
        policy);
}

}  // namespace aoisim
