#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "aoisim/model.hpp"
#include "helpers.hpp"

using namespace aoisim;

namespace {

SystemParams paper_params() {
    SystemParams p;
    p.num_devices = 50;
    p.battery_capacity = 100;
    p.tx_cost = 10;
    p.energy_floor = 1;
    p.harvest_prob = 0.5;
    p.aoi_max = 200;
    return p;
}

}  // namespace

TEST_CASE("params validation names the offending field") {
    SystemParams p = paper_params();
    CHECK_NOTHROW(p.validate());

    p.battery_capacity = 5;
    CHECK_THROWS_WITH_AS(p.validate(), "battery_capacity must exceed energy_floor + tx_cost",
                         std::invalid_argument);
    p = paper_params();
    p.battery_capacity = 11;  // exactly floor + cost
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    p = paper_params();
    p.harvest_prob = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.harvest_prob = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    p = paper_params();
    p.aoi_max = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("energy update") {
    const SystemParams p = paper_params();
    CHECK(update_energy(50, true, false, p) == 51);
    CHECK(update_energy(100, true, true, p) == 90);  // cap binds before the cost
    CHECK(update_energy(11, false, true, p) == 1);   // exactly the floor remains

    CHECK(update_energy(100, true, false, p) == 100);
    CHECK(update_energy(0, false, false, p) == 0);

    CHECK_THROWS_AS(update_energy(9, false, true, p), std::logic_error);
    CHECK_THROWS_AS(update_energy(9, true, true, p), std::logic_error);
}

TEST_CASE("energy update is monotone in the energy argument") {
    test::CaseGen gen(101);
    for (int trial = 0; trial < 500; ++trial) {
        const SystemParams p = gen.params();
        const bool harvested = gen.coin();
        const bool transmitted = gen.coin();
        const int lo = transmitted ? p.tx_cost : 0;
        const int a = gen.integer(lo, p.battery_capacity);
        const int b = gen.integer(lo, p.battery_capacity);
        const int ea = update_energy(std::min(a, b), harvested, transmitted, p);
        const int eb = update_energy(std::max(a, b), harvested, transmitted, p);
        CHECK(ea <= eb);
        CHECK(eb <= p.battery_capacity);
        CHECK(ea >= 0);
    }
}

TEST_CASE("aoi update") {
    SystemParams p = paper_params();
    CHECK(update_aoi(5, true, p).aoi == 1);
    CHECK_FALSE(update_aoi(5, true, p).discarded);

    const AoiUpdate near_limit = update_aoi(199, false, p);
    CHECK(near_limit.aoi == 200);
    CHECK_FALSE(near_limit.discarded);

    const AoiUpdate at_limit = update_aoi(200, false, p);
    CHECK(at_limit.aoi == 1);
    CHECK(at_limit.discarded);

    // without success or discard the increment is exactly one
    for (int aoi = 1; aoi < p.aoi_max; ++aoi) {
        const AoiUpdate up = update_aoi(aoi, false, p);
        CHECK(up.aoi == aoi + 1);
        CHECK_FALSE(up.discarded);
    }
}

TEST_CASE("normalizations") {
    const SystemParams p = paper_params();
    CHECK(normalized_energy(100, p) == doctest::Approx(1.0));
    CHECK(normalized_energy(1, p) == doctest::Approx(0.0));
    CHECK(normalized_energy(45, p) == doctest::Approx(44.0 / 99.0));

    CHECK(normalized_aoi(200, p) == doctest::Approx(1.0));
    CHECK(normalized_aoi(1, p) == doctest::Approx(0.005));
    CHECK(normalized_aoi(100, p) == doctest::Approx(0.5));
}

TEST_CASE("normalizations stay in range across the state space") {
    test::CaseGen gen(202);
    for (int trial = 0; trial < 200; ++trial) {
        const SystemParams p = gen.params();
        for (int e = p.energy_floor; e <= p.battery_capacity; ++e) {
            const double en = normalized_energy(e, p);
            CHECK(en >= 0.0);
            CHECK(en <= 1.0);
        }
        for (int a = 1; a <= p.aoi_max; ++a) {
            const double an = normalized_aoi(a, p);
            CHECK(an > 0.0);
            CHECK(an <= 1.0);
        }
    }
}
