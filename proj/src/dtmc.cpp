#include "aoisim/dtmc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aoisim::dtmc {

TransitionMatrix::TransitionMatrix(int first_state, int size)
    : first_state_(first_state),
      size_(size),
      data_(static_cast<size_t>(size) * static_cast<size_t>(size), 0.0) {
    if (size < 1)
        throw std::invalid_argument("TransitionMatrix size must be >= 1");
}

double TransitionMatrix::max_row_sum_error() const {
    double worst = 0.0;
    for (int r = 0; r < size_; ++r) {
        double sum = 0.0;
        for (int c = 0; c < size_; ++c)
            sum += at(r, c);
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

TransitionMatrix build_energy_chain(const SystemParams& params,
                                    const std::function<double(int)>& tx_prob) {
    params.validate();
    const int floor = params.energy_floor;
    const int cap = params.battery_capacity;
    const int cost = params.tx_cost;
    const int eligible_from = floor + cost;
    const double eta = params.harvest_prob;
    const double eta_bar = 1.0 - eta;

    TransitionMatrix m(floor, cap - floor + 1);
    for (int level = floor; level <= cap; ++level) {
        const int i = m.index_of(level);
        if (level < eligible_from) {
            // holding pattern: the device can only wait for energy arrivals
            m.at(i, i) += eta_bar;
            m.at(i, m.index_of(level + 1)) += eta;
            continue;
        }
        const double p = tx_prob(level);
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("tx_prob must return values in [0,1]");
        const double p_bar = 1.0 - p;
        if (level == cap) {
            // full battery: a harvested unit is wasted, so the harvest
            // indicator drops out of both branches
            m.at(i, i) += p_bar;
            m.at(i, m.index_of(level - cost)) += p;
        } else {
            m.at(i, i) += eta_bar * p_bar;
            m.at(i, m.index_of(level + 1)) += eta * p_bar;
            m.at(i, m.index_of(level - cost)) += eta_bar * p;
            m.at(i, m.index_of(level - cost + 1)) += eta * p;
        }
    }
    return m;
}

TransitionMatrix build_aoi_chain(double p_prime, int num_devices, int fictional_t,
                                 const SystemParams& params) {
    params.validate();
    if (!(p_prime >= 0.0 && p_prime <= 1.0))
        throw std::invalid_argument("p_prime must lie in [0,1]");
    if (fictional_t < 1 || fictional_t > params.aoi_max)
        throw std::invalid_argument("fictional threshold must lie in [1, aoi_max]");
    if (num_devices < 1)
        throw std::invalid_argument("num_devices must be >= 1");

    const double q = std::pow(1.0 - p_prime, num_devices - 1);
    const double reset = q * p_prime;
    TransitionMatrix m(1, params.aoi_max);
    for (int age = 1; age <= params.aoi_max; ++age) {
        const int i = m.index_of(age);
        if (age == params.aoi_max) {
            m.at(i, 0) = 1.0;  // discard: the age restarts with a fresh packet
        } else if (age >= fictional_t) {
            m.at(i, 0) += reset;
            m.at(i, i + 1) += 1.0 - reset;
        } else {
            m.at(i, i + 1) = 1.0;
        }
    }
    return m;
}

namespace {

// Strongly connected components (iterative Tarjan) of the support digraph;
// returns the closed ones, i.e. components with no outgoing edge.
std::vector<std::vector<int>> closed_classes(const TransitionMatrix& m) {
    const int n = m.size();
    std::vector<std::vector<int>> adj(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (m.at(r, c) > 0.0)
                adj[r].push_back(c);

    std::vector<int> order(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int counter = 0;
    int num_comps = 0;

    struct Frame {
        int v;
        size_t edge;
    };
    std::vector<Frame> call;
    for (int start = 0; start < n; ++start) {
        if (order[start] != -1)
            continue;
        call.push_back({start, 0});
        while (!call.empty()) {
            const int v = call.back().v;
            if (call.back().edge == 0) {
                order[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (call.back().edge < adj[v].size()) {
                const int w = adj[v][call.back().edge++];
                if (order[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w])
                    low[v] = std::min(low[v], order[w]);
            }
            if (descended)
                continue;
            if (low[v] == order[v]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = num_comps;
                    if (w == v)
                        break;
                }
                ++num_comps;
            }
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }

    std::vector<char> closed(num_comps, 1);
    for (int r = 0; r < n; ++r)
        for (int c : adj[r])
            if (comp[r] != comp[c])
                closed[comp[r]] = 0;

    std::vector<std::vector<int>> result(num_comps);
    for (int v = 0; v < n; ++v)
        if (closed[comp[v]])
            result[comp[v]].push_back(v);
    std::erase_if(result, [](const std::vector<int>& c) { return c.empty(); });
    return result;
}

double residual_inf(const TransitionMatrix& m, const std::vector<double>& pi) {
    const int n = m.size();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        double next = 0.0;
        for (int i = 0; i < n; ++i)
            next += pi[i] * m.at(i, j);
        worst = std::max(worst, std::abs(next - pi[j]));
    }
    return worst;
}

}  // namespace

StationaryDist solve_stationary(const TransitionMatrix& m) {
    const int n = m.size();
    if (m.max_row_sum_error() > 1e-9)
        throw std::invalid_argument("transition matrix is not row-stochastic");

    const auto classes = closed_classes(m);
    if (classes.size() > 1) {
        std::ostringstream msg;
        msg << "chain has " << classes.size() << " closed recurrent classes:";
        for (const auto& cls : classes)
            msg << " [" << m.state_at(cls.front()) << ".." << m.state_at(cls.back()) << "]("
                << cls.size() << " states)";
        throw std::runtime_error(msg.str());
    }

    StationaryDist dist;
    dist.first_state = m.first_state();
    dist.probs.assign(n, 0.0);

    // Direct solve of (M^T - I) pi = 0 with the last balance row swapped for
    // the normalization constraint.
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a(r, c) = m.at(c, r) - (r == c ? 1.0 : 0.0);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = a.partialPivLu().solve(b);

    bool ok = x.allFinite();
    if (ok) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            if (x(i) < -1e-9) {
                ok = false;
                break;
            }
            dist.probs[i] = std::max(x(i), 0.0);
            sum += dist.probs[i];
        }
        if (ok && sum > 0.0) {
            for (double& v : dist.probs)
                v /= sum;
            dist.method = "linear_solve";
            dist.iterations = 0;
            dist.residual = residual_inf(m, dist.probs);
            if (dist.residual < 1e-10)
                return dist;
        }
    }

    // Fallback: power iteration from the uniform distribution.
    std::vector<double> pi(n, 1.0 / n), next(n, 0.0);
    const int max_iters = 200000;
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        double delta = 0.0;
        for (int j = 0; j < n; ++j)
            next[j] = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = pi[i];
            if (w == 0.0)
                continue;
            for (int j = 0; j < n; ++j)
                next[j] += w * m.at(i, j);
        }
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
            sum += next[j];
        for (int j = 0; j < n; ++j) {
            next[j] /= sum;
            delta = std::max(delta, std::abs(next[j] - pi[j]));
        }
        pi.swap(next);
        if (delta < 1e-14)
            break;
    }
    dist.probs = pi;
    dist.method = "power_iteration";
    dist.iterations = iter + 1;
    dist.residual = residual_inf(m, dist.probs);
    if (dist.residual >= 1e-10) {
        std::ostringstream msg;
        msg << "stationary solve failed: residual " << dist.residual << " after "
            << dist.iterations << " power iterations";
        throw std::runtime_error(msg.str());
    }
    return dist;
}

double prob_eligible(const StationaryDist& energy_dist, const SystemParams& params) {
    const int eligible_from = params.energy_floor + params.tx_cost;
    double mass = 0.0;
    for (size_t i = 0; i < energy_dist.probs.size(); ++i) {
        const int level = energy_dist.first_state + static_cast<int>(i);
        if (level >= eligible_from)
            mass += energy_dist.probs[i];
    }
    return mass;
}

double mean_state(const StationaryDist& dist) {
    double mean = 0.0;
    for (size_t i = 0; i < dist.probs.size(); ++i)
        mean += (dist.first_state + static_cast<int>(i)) * dist.probs[i];
    return mean;
}

FictionalThreshold fictional_threshold(double alpha, double tau, double mean_energy_level,
                                       const SystemParams& params, ThresholdForm form) {
    const double e_norm = (mean_energy_level - params.energy_floor) /
                          (params.battery_capacity - params.energy_floor);
    const double energy_term = (form == ThresholdForm::Corrected) ? e_norm : mean_energy_level;
    if (alpha == 0.0) {
        if (energy_term >= tau)
            return {1, true};
        return {params.aoi_max + 1, false};  // the age term cannot make up the gap
    }
    double raw;
    if (form == ThresholdForm::Corrected)
        raw = std::ceil(params.aoi_max * (tau - (1.0 - alpha) * e_norm) / alpha);
    else
        raw = std::ceil((tau - (1.0 - alpha) * mean_energy_level) / alpha);
    const double clamped = std::clamp(raw, 1.0, static_cast<double>(params.aoi_max));
    return {static_cast<int>(clamped), true};
}

std::function<double(int)> policy_tx_prob(const PolicyConfig& policy,
                                          const SystemParams& params) {
    if (std::holds_alternative<Adra>(policy))
        throw std::invalid_argument("policy kind adra has no energy-chain representation");
    if (const auto* prop = std::get_if<Proposed>(&policy)) {
        const ProbFunction prob = prop->prob;
        return [prob, params](int level) { return eval_prob(prob, level, params); };
    }
    return [](int) { return 1.0; };  // none / threshold_only transmit with p = 1
}

CoupledSolution solve_coupled(const SystemParams& params, const PolicyConfig& policy,
                              ThresholdForm form) {
    params.validate();
    validate_policy(policy, params);
    const auto tx_prob = policy_tx_prob(policy, params);

    CoupledSolution sol;
    sol.energy_dist = solve_stationary(build_energy_chain(params, tx_prob));
    sol.p_e = prob_eligible(sol.energy_dist, params);
    sol.mean_energy = mean_state(sol.energy_dist);

    // Unconditional per-slot transmission probability. For a constant p this
    // is exactly p * P_E; state-dependent functions are weighted by the
    // stationary occupancy, so the energy side needs no further iteration and
    // the coupled fixed point settles in a single pass.
    const int eligible_from = params.energy_floor + params.tx_cost;
    double p_prime = 0.0;
    for (int level = eligible_from; level <= params.battery_capacity; ++level)
        p_prime += tx_prob(level) * sol.energy_dist.at_state(level);

    if (const auto* th = std::get_if<ThresholdOnly>(&policy))
        sol.fictional_t = fictional_threshold(th->alpha, th->tau, sol.mean_energy, params, form);
    else if (const auto* prop = std::get_if<Proposed>(&policy))
        sol.fictional_t =
            fictional_threshold(prop->alpha, prop->tau, sol.mean_energy, params, form);
    else
        sol.fictional_t = {1, true};  // no age/energy threshold

    if (sol.fictional_t.satisfiable) {
        sol.effective_p = p_prime;
        sol.q = std::pow(1.0 - p_prime, params.num_devices - 1);
        sol.aoi_dist = solve_stationary(
            build_aoi_chain(p_prime, params.num_devices, sol.fictional_t.value, params));
    } else {
        // The weighted condition never holds at the average energy level:
        // nobody transmits and the age walks the deterministic discard cycle.
        sol.effective_p = 0.0;
        sol.q = 1.0;
        sol.aoi_dist =
            solve_stationary(build_aoi_chain(0.0, params.num_devices, params.aoi_max, params));
    }
    sol.aaoi = analytical_aaoi(sol.aoi_dist);
    sol.iterations = 1;
    return sol;
}

}  // namespace aoisim::dtmc
