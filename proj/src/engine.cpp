#include "aoisim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace aoisim {

void SimConfig::validate() const {
    params.validate();
    validate_policy(policy, params);
    if (num_slots < 1)
        throw std::invalid_argument("num_slots must be >= 1");
    if (num_replications < 1)
        throw std::invalid_argument("num_replications must be >= 1");
}

Avp compute_avp(uint64_t discards, uint64_t packets) {
    if (packets == 0)
        return {0.0, false};
    return {static_cast<double>(discards) / static_cast<double>(packets), true};
}

SlotEngine::SlotEngine(const SystemParams& params, const PolicyConfig& policy)
    : params_(params),
      age_gate_(params.battery_capacity + 1, params.aoi_max + 1),
      tx_prob_(params.battery_capacity + 1, 0.0),
      harvested_(params.num_devices),
      transmitted_(params.num_devices) {
    for (int energy = 0; energy <= params.battery_capacity; ++energy) {
        // smallest age at which the policy is willing to transmit (u = 0)
        int gate = params.aoi_max + 1;
        for (int age = params.aoi_max; age >= 1; --age) {
            if (decide(policy, DeviceState{energy, age}, params, 0.0))
                gate = age;
            else
                break;
        }
        age_gate_[energy] = gate;
        if (gate <= params.aoi_max) {
            // probe for the transmit probability at this level: the decision
            // is "u < p", so p is the supremum of accepted draws
            if (const auto* prop = std::get_if<Proposed>(&policy))
                tx_prob_[energy] = eval_prob(prop->prob, energy, params);
            else if (const auto* adra = std::get_if<Adra>(&policy))
                tx_prob_[energy] = adra->p;
            else
                tx_prob_[energy] = 1.0;
        }
    }
}

SlotOutcome SlotEngine::step(std::vector<DeviceState>& states, RandomStream& rng) {
    const int d = params_.num_devices;
    const double harvest_prob = params_.harvest_prob;
    int transmitters = 0;
    int winner = -1;
    for (int i = 0; i < d; ++i) {
        harvested_[i] = rng.next_bernoulli(harvest_prob);
        const double u = rng.next_uniform();  // drawn every slot to keep streams aligned
        const DeviceState& s = states[i];
        const bool tx = s.aoi >= age_gate_[s.energy] && u < tx_prob_[s.energy];
        transmitted_[i] = tx;
        if (tx) {
            ++transmitters;
            winner = i;
        }
    }
    SlotOutcome out;
    out.transmitters = transmitters;
    out.success = (transmitters == 1);
    out.winner = out.success ? winner : -1;
    for (int i = 0; i < d; ++i) {
        DeviceState& s = states[i];
        s.energy = update_energy(s.energy, harvested_[i], transmitted_[i], params_);
        const AoiUpdate up = update_aoi(s.aoi, out.success && transmitted_[i], params_);
        s.aoi = up.aoi;
        if (up.discarded)
            ++out.discards;
    }
    return out;
}

SlotOutcome run_slot(std::vector<DeviceState>& states, const PolicyConfig& policy,
                     const SystemParams& params, RandomStream& rng) {
    SlotEngine engine(params, policy);
    return engine.step(states, rng);
}

namespace {

struct ReplicationStats {
    std::vector<double> device_aoi_mean;
    double aaoi = 0.0;
    EventCounts counts;
    double mean_energy = 0.0;
    int min_energy = std::numeric_limits<int>::max();
};

ReplicationStats run_replication(const SimConfig& cfg, uint32_t rep) {
    const SystemParams& p = cfg.params;
    const int d = p.num_devices;
    RandomStream rng(cfg.seed, rep);
    std::vector<DeviceState> states(d, DeviceState{p.battery_capacity, 1});
    SlotEngine engine(p, cfg.policy);

    ReplicationStats stats;
    stats.min_energy = p.battery_capacity;

    for (uint64_t t = 0; t < cfg.warmup_slots; ++t) {
        engine.step(states, rng);
        for (const DeviceState& s : states)
            stats.min_energy = std::min(stats.min_energy, s.energy);
    }

    std::vector<uint64_t> aoi_sum(d, 0);
    uint64_t energy_sum = 0;
    for (uint64_t t = 0; t < cfg.num_slots; ++t) {
        for (int i = 0; i < d; ++i) {
            aoi_sum[i] += static_cast<uint64_t>(states[i].aoi);
            energy_sum += static_cast<uint64_t>(states[i].energy);
        }
        const SlotOutcome out = engine.step(states, rng);
        if (out.success)
            ++stats.counts.successes;
        else if (out.transmitters >= 2)
            ++stats.counts.collisions;
        else
            ++stats.counts.idle_slots;
        stats.counts.discards += static_cast<uint64_t>(out.discards);
        for (const DeviceState& s : states)
            stats.min_energy = std::min(stats.min_energy, s.energy);
    }
    stats.counts.packets_generated = stats.counts.successes + stats.counts.discards;

    stats.device_aoi_mean.resize(d);
    const double slots = static_cast<double>(cfg.num_slots);
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        stats.device_aoi_mean[i] = static_cast<double>(aoi_sum[i]) / slots;
        total += stats.device_aoi_mean[i];
    }
    stats.aaoi = total / d;
    stats.mean_energy = static_cast<double>(energy_sum) / (slots * d);
    return stats;
}

}  // namespace

SimResult run_simulation(const SimConfig& cfg, int num_threads) {
    cfg.validate();
    const uint32_t reps = cfg.num_replications;
    std::vector<ReplicationStats> per_rep(reps);

    const int workers = std::max(1, std::min<int>(num_threads, static_cast<int>(reps)));
    if (workers == 1) {
        for (uint32_t r = 0; r < reps; ++r)
            per_rep[r] = run_replication(cfg, r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (uint32_t r = static_cast<uint32_t>(w); r < reps;
                     r += static_cast<uint32_t>(workers))
                    per_rep[r] = run_replication(cfg, r);
            });
        }
        for (std::thread& t : pool)
            t.join();
    }

    // Merge in replication order so the result is independent of scheduling.
    const int d = cfg.params.num_devices;
    SimResult res;
    res.per_device_aaoi.assign(d, 0.0);
    res.replication_aaoi.resize(reps);
    res.min_energy_observed = std::numeric_limits<int>::max();
    double aaoi_sum = 0.0;
    double energy_sum = 0.0;
    for (uint32_t r = 0; r < reps; ++r) {
        const ReplicationStats& s = per_rep[r];
        res.replication_aaoi[r] = s.aaoi;
        aaoi_sum += s.aaoi;
        energy_sum += s.mean_energy;
        for (int i = 0; i < d; ++i)
            res.per_device_aaoi[i] += s.device_aoi_mean[i] / reps;
        res.counts.successes += s.counts.successes;
        res.counts.collisions += s.counts.collisions;
        res.counts.idle_slots += s.counts.idle_slots;
        res.counts.discards += s.counts.discards;
        res.counts.packets_generated += s.counts.packets_generated;
        res.min_energy_observed = std::min(res.min_energy_observed, s.min_energy);
    }
    res.aaoi = aaoi_sum / reps;
    res.mean_energy_empirical = energy_sum / reps;

    const Avp avp = compute_avp(res.counts.discards, res.counts.packets_generated);
    res.avp = avp.value;
    res.avp_defined = avp.defined;

    if (reps > 1) {
        double ss = 0.0;
        for (uint32_t r = 0; r < reps; ++r) {
            const double dev = res.replication_aaoi[r] - res.aaoi;
            ss += dev * dev;
        }
        const double stddev = std::sqrt(ss / (reps - 1));
        res.ci_halfwidth_aaoi = 1.96 * stddev / std::sqrt(static_cast<double>(reps));
    }
    return res;
}

}  // namespace aoisim
