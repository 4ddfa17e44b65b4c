#include "aoisim/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace aoisim {

namespace {

std::vector<double> arange(double from, double to, double step) {
    std::vector<double> values;
    for (double v = from; v <= to + 1e-9; v += step)
        values.push_back(std::min(v, to));
    return values;
}

}  // namespace

ParamGrid ParamGrid::defaults(PolicyFamily family, const SystemParams& params) {
    ParamGrid grid;
    grid.family = family;
    grid.alpha_grid = arange(0.0, 1.0, 0.05);
    grid.tau_grid = arange(0.0, 1.0, 0.05);
    grid.c_grid = arange(0.1, 3.0, 0.1);
    grid.k_grid = arange(0.05, 1.0, 0.05);
    grid.adra_threshold_grid.push_back(1);
    for (int t = 5; t <= params.aoi_max; t += 5)
        grid.adra_threshold_grid.push_back(t);
    grid.adra_p_grid = arange(0.01, 1.0, 0.01);
    return grid;
}

void ParamGrid::validate() const {
    const auto check_unit_grid = [](const std::vector<double>& g, const char* name) {
        if (g.empty())
            throw std::invalid_argument(std::string(name) + " grid must be non-empty");
        for (double v : g)
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument(std::string(name) + " grid value out of [0,1]");
    };
    const auto check_positive_grid = [](const std::vector<double>& g, const char* name) {
        if (g.empty())
            throw std::invalid_argument(std::string(name) + " grid must be non-empty");
        for (double v : g)
            if (v <= 0.0)
                throw std::invalid_argument(std::string(name) + " grid value must be > 0");
    };
    switch (family) {
        case PolicyFamily::None:
            break;
        case PolicyFamily::ThresholdOnly:
            check_unit_grid(alpha_grid, "alpha");
            check_unit_grid(tau_grid, "tau");
            break;
        case PolicyFamily::ProposedConstant:
            check_unit_grid(alpha_grid, "alpha");
            check_unit_grid(tau_grid, "tau");
            check_unit_grid(k_grid, "k");
            break;
        case PolicyFamily::ProposedLinear:
        case PolicyFamily::ProposedElliptical:
            check_unit_grid(alpha_grid, "alpha");
            check_unit_grid(tau_grid, "tau");
            check_positive_grid(c_grid, "c");
            break;
        case PolicyFamily::Adra:
            if (adra_threshold_grid.empty())
                throw std::invalid_argument("adra_threshold grid must be non-empty");
            for (int t : adra_threshold_grid)
                if (t < 1)
                    throw std::invalid_argument("adra_threshold grid value must be >= 1");
            check_unit_grid(adra_p_grid, "adra_p");
            break;
    }
    if (budget.num_slots < 1 || screen_budget.num_slots < 1)
        throw std::invalid_argument("budget num_slots must be >= 1");
    if (budget.num_replications < 1 || screen_budget.num_replications < 1)
        throw std::invalid_argument("budget num_replications must be >= 1");
    if (refine_top < 1)
        throw std::invalid_argument("refine_top must be >= 1");
}

std::vector<PolicyConfig> enumerate_grid(const ParamGrid& grid) {
    std::vector<PolicyConfig> configs;
    switch (grid.family) {
        case PolicyFamily::None:
            configs.emplace_back(NoPolicy{});
            break;
        case PolicyFamily::ThresholdOnly:
            for (double alpha : grid.alpha_grid)
                for (double tau : grid.tau_grid)
                    configs.emplace_back(ThresholdOnly{alpha, tau});
            break;
        case PolicyFamily::ProposedConstant:
            for (double alpha : grid.alpha_grid)
                for (double tau : grid.tau_grid)
                    for (double k : grid.k_grid)
                        configs.emplace_back(Proposed{alpha, tau, ConstantProb{k}});
            break;
        case PolicyFamily::ProposedLinear:
            for (double alpha : grid.alpha_grid)
                for (double tau : grid.tau_grid)
                    for (double c : grid.c_grid)
                        configs.emplace_back(Proposed{alpha, tau, LinearProb{c}});
            break;
        case PolicyFamily::ProposedElliptical:
            for (double alpha : grid.alpha_grid)
                for (double tau : grid.tau_grid)
                    for (double c : grid.c_grid)
                        configs.emplace_back(Proposed{alpha, tau, EllipticalProb{c}});
            break;
        case PolicyFamily::Adra:
            for (int t : grid.adra_threshold_grid)
                for (double p : grid.adra_p_grid)
                    configs.emplace_back(Adra{t, p});
            break;
    }
    return configs;
}

namespace {

GridPoint evaluate_point(const PolicyConfig& config, int stage, const SimBudget& budget,
                         uint64_t seed, int num_devices, const SystemParams& base) {
    GridPoint point;
    point.config = config;
    point.stage = stage;
    try {
        SimConfig cfg;
        cfg.params = base;
        cfg.params.num_devices = num_devices;
        cfg.policy = config;
        cfg.num_slots = budget.num_slots;
        cfg.warmup_slots = budget.warmup_slots;
        cfg.num_replications = budget.num_replications;
        cfg.seed = seed;
        const SimResult res = run_simulation(cfg, 1);
        point.aaoi = res.aaoi;
        point.avp = res.avp;
        point.ci_halfwidth_aaoi = res.ci_halfwidth_aaoi;
        point.objective_value = res.aaoi;
    } catch (const std::exception& e) {
        point.valid = false;
        point.error = e.what();
    }
    return point;
}

// Evaluates all configs at the given budget, preserving input order.
std::vector<GridPoint> evaluate_stage(const std::vector<PolicyConfig>& configs, int stage,
                                      const SimBudget& budget, uint64_t seed, int num_devices,
                                      const SystemParams& base, Objective objective,
                                      int num_threads) {
    std::vector<GridPoint> points(configs.size());
    const auto work = [&](size_t idx) {
        points[idx] = evaluate_point(configs[idx], stage, budget, seed, num_devices, base);
        if (objective == Objective::Avp)
            points[idx].objective_value = points[idx].avp;
    };
    const int workers = std::max(1, std::min<int>(num_threads, static_cast<int>(configs.size())));
    if (workers == 1) {
        for (size_t i = 0; i < configs.size(); ++i)
            work(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1))
                    work(i);
            });
        }
        for (std::thread& t : pool)
            t.join();
    }
    return points;
}

// Indices of the n best valid points, ties broken by grid order.
std::vector<size_t> best_indices(const std::vector<GridPoint>& points, size_t n) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < points.size(); ++i)
        if (points[i].valid)
            idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return points[a].objective_value < points[b].objective_value;
    });
    if (idx.size() > n)
        idx.resize(n);
    return idx;
}

}  // namespace

OptResult grid_search(const ParamGrid& grid, int num_devices, const SystemParams& base,
                      int num_threads) {
    grid.validate();
    const std::vector<PolicyConfig> configs = enumerate_grid(grid);
    if (configs.empty())
        throw std::invalid_argument("parameter grid is empty");

    SystemParams params = base;
    params.num_devices = num_devices;
    params.validate();
    for (const PolicyConfig& c : configs)
        validate_policy(c, params);

    OptResult result;
    const bool staged = grid.two_stage &&
                        (grid.screen_budget.num_slots != grid.budget.num_slots ||
                         grid.screen_budget.num_replications != grid.budget.num_replications);

    std::vector<PolicyConfig> finalists = configs;
    if (staged) {
        result.table = evaluate_stage(configs, 1, grid.screen_budget, grid.seed, num_devices,
                                      base, grid.objective, num_threads);
        const auto top = best_indices(result.table, static_cast<size_t>(grid.refine_top));
        if (top.empty())
            throw std::runtime_error("every grid point failed during screening");
        finalists.clear();
        for (size_t i : top)
            finalists.push_back(configs[i]);
    }

    const std::vector<GridPoint> final_points = evaluate_stage(
        finalists, staged ? 2 : 1, grid.budget, grid.seed, num_devices, base, grid.objective,
        num_threads);
    result.table.insert(result.table.end(), final_points.begin(), final_points.end());

    const auto winner = best_indices(final_points, 1);
    if (winner.empty())
        throw std::runtime_error("every grid point failed");
    const GridPoint& best = final_points[winner.front()];
    result.best_config = best.config;
    result.best_objective = best.objective_value;
    result.best_aaoi = best.aaoi;
    result.best_avp = best.avp;
    result.best_ci_halfwidth = best.ci_halfwidth_aaoi;
    return result;
}

std::vector<SweepRow> sweep_over_d(const std::vector<int>& d_values, const ParamGrid& grid,
                                   const SystemParams& base, int num_threads) {
    if (d_values.empty())
        throw std::invalid_argument("d_values must be non-empty");
    std::vector<SweepRow> rows;
    rows.reserve(d_values.size());
    for (int d : d_values)
        rows.push_back({d, grid_search(grid, d, base, num_threads)});
    return rows;
}

}  // namespace aoisim
