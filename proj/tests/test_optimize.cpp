#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "aoisim/optimize.hpp"

using namespace aoisim;

namespace {

SystemParams paper_params() {
    SystemParams p;
    p.battery_capacity = 100;
    p.tx_cost = 10;
    p.energy_floor = 1;
    p.harvest_prob = 0.5;
    p.aoi_max = 200;
    return p;
}

ParamGrid tiny_grid(PolicyFamily family) {
    ParamGrid grid;
    grid.family = family;
    grid.alpha_grid = {0.5};
    grid.tau_grid = {0.0, 0.4};
    grid.c_grid = {1.2};
    grid.k_grid = {0.2};
    grid.adra_threshold_grid = {1, 20};
    grid.adra_p_grid = {0.1};
    grid.budget = {20'000, 500, 2};
    grid.two_stage = false;
    grid.seed = 5;
    return grid;
}

}  // namespace

TEST_CASE("grid enumeration order is lexicographic") {
    ParamGrid grid = tiny_grid(PolicyFamily::ProposedElliptical);
    grid.alpha_grid = {0.1, 0.2};
    grid.tau_grid = {0.3, 0.4};
    grid.c_grid = {1.0, 2.0};
    const auto configs = enumerate_grid(grid);
    REQUIRE(configs.size() == 8);
    const auto& first = std::get<Proposed>(configs.front());
    CHECK(first.alpha == 0.1);
    CHECK(first.tau == 0.3);
    CHECK(std::get<EllipticalProb>(first.prob).c == 1.0);
    const auto& second = std::get<Proposed>(configs[1]);
    CHECK(second.alpha == 0.1);
    CHECK(second.tau == 0.3);
    CHECK(std::get<EllipticalProb>(second.prob).c == 2.0);
    const auto& last = std::get<Proposed>(configs.back());
    CHECK(last.alpha == 0.2);
    CHECK(last.tau == 0.4);

    grid.family = PolicyFamily::Adra;
    const auto adra_configs = enumerate_grid(grid);
    REQUIRE(adra_configs.size() == 2);
    CHECK(std::get<Adra>(adra_configs.front()).age_threshold == 1);
}

TEST_CASE("single-point grid returns that point") {
    ParamGrid grid = tiny_grid(PolicyFamily::ProposedElliptical);
    grid.tau_grid = {0.4};
    const OptResult result = grid_search(grid, 5, paper_params());
    REQUIRE(result.table.size() == 1);
    const auto& best = std::get<Proposed>(result.best_config);
    CHECK(best.alpha == 0.5);
    CHECK(best.tau == 0.4);
    CHECK(result.best_objective == result.table.front().objective_value);
    CHECK(result.best_objective == result.best_aaoi);
}

TEST_CASE("argmin over the table with deterministic tie-breaking") {
    ParamGrid grid = tiny_grid(PolicyFamily::ThresholdOnly);
    grid.alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    grid.tau_grid = {0.0, 0.3, 0.6, 0.9};
    const OptResult result = grid_search(grid, 10, paper_params(), 2);
    REQUIRE(result.table.size() == 20);
    double best_seen = 1e300;
    for (const GridPoint& point : result.table) {
        CHECK(point.valid);
        best_seen = std::min(best_seen, point.objective_value);
    }
    CHECK(result.best_objective == best_seen);  // best <= every evaluated point
}

TEST_CASE("common random numbers make the search reproducible") {
    ParamGrid grid = tiny_grid(PolicyFamily::ProposedElliptical);
    grid.two_stage = true;
    grid.screen_budget = {4'000, 200, 1};
    grid.refine_top = 2;
    grid.alpha_grid = {0.3, 0.6};
    grid.tau_grid = {0.2, 0.5};
    const OptResult a = grid_search(grid, 8, paper_params(), 2);
    const OptResult b = grid_search(grid, 8, paper_params(), 1);
    REQUIRE(a.table.size() == b.table.size());
    CHECK(a.table.size() == 4 + 2);  // screen rows then refinement rows
    for (size_t i = 0; i < a.table.size(); ++i) {
        CHECK(a.table[i].stage == b.table[i].stage);
        CHECK(a.table[i].objective_value == b.table[i].objective_value);
        CHECK(a.table[i].aaoi == b.table[i].aaoi);
        CHECK(a.table[i].avp == b.table[i].avp);
        CHECK(a.table[i].config == b.table[i].config);
    }
    CHECK(a.best_config == b.best_config);
    CHECK(a.best_objective == b.best_objective);
}

TEST_CASE("avp objective selects by violation probability") {
    ParamGrid grid = tiny_grid(PolicyFamily::Adra);
    grid.objective = Objective::Avp;
    const OptResult result = grid_search(grid, 5, paper_params());
    for (const GridPoint& point : result.table)
        CHECK(result.best_objective <= point.objective_value);
    CHECK(result.best_objective == result.best_avp);
}

TEST_CASE("grid validation") {
    ParamGrid grid = tiny_grid(PolicyFamily::ProposedElliptical);
    grid.c_grid.clear();
    CHECK_THROWS_AS(grid_search(grid, 5, paper_params()), std::invalid_argument);

    grid = tiny_grid(PolicyFamily::ProposedConstant);
    grid.k_grid = {1.4};
    CHECK_THROWS_AS(grid_search(grid, 5, paper_params()), std::invalid_argument);

    grid = tiny_grid(PolicyFamily::Adra);
    grid.adra_threshold_grid = {0};
    CHECK_THROWS_AS(grid_search(grid, 5, paper_params()), std::invalid_argument);

    // threshold above aoi_max is caught by per-config validation
    grid = tiny_grid(PolicyFamily::Adra);
    grid.adra_threshold_grid = {500};
    CHECK_THROWS_AS(grid_search(grid, 5, paper_params()), std::invalid_argument);
}

TEST_CASE("default grids match the documented steps") {
    const ParamGrid grid = ParamGrid::defaults(PolicyFamily::ProposedLinear, paper_params());
    CHECK(grid.alpha_grid.size() == 21);
    CHECK(grid.alpha_grid.front() == 0.0);
    CHECK(grid.alpha_grid.back() == 1.0);
    CHECK(grid.tau_grid.size() == 21);
    CHECK(grid.c_grid.size() == 30);
    CHECK(grid.c_grid.front() == doctest::Approx(0.1));
    CHECK(grid.c_grid.back() == doctest::Approx(3.0));
    CHECK(grid.adra_threshold_grid.front() == 1);
    CHECK(grid.adra_threshold_grid.back() == 200);
    CHECK(grid.adra_p_grid.size() == 100);
}

TEST_CASE("sweep runs one search per device count") {
    ParamGrid grid = tiny_grid(PolicyFamily::ThresholdOnly);
    grid.budget = {5'000, 200, 1};
    const auto rows = sweep_over_d({2, 4}, grid, paper_params());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].num_devices == 2);
    CHECK(rows[1].num_devices == 4);
    CHECK(rows[0].result.best_aaoi <= rows[1].result.best_aaoi);  // more contention, worse age

    CHECK_THROWS_AS(sweep_over_d({}, grid, paper_params()), std::invalid_argument);
}
