#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "aoisim/policy.hpp"
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

TEST_CASE("energy eligibility boundary") {
    const SystemParams p = paper_params();
    CHECK(energy_eligible({11, 1}, p));
    CHECK_FALSE(energy_eligible({10, 1}, p));
    CHECK(energy_eligible({100, 1}, p));
}

TEST_CASE("weighted threshold") {
    SystemParams p = paper_params();
    p.battery_capacity = 101;  // span 100 so E_norm = 0.2 is exact at energy 21
    CHECK(normalized_energy(21, p) == doctest::Approx(0.2));
    CHECK(threshold_met({21, 180}, 0.5, 0.5, p));        // 0.1 + 0.45 = 0.55 >= 0.5
    CHECK_FALSE(threshold_met({21, 100}, 0.5, 0.5, p));  // 0.1 + 0.25 < 0.5

    // alpha = 1 ignores the energy term entirely
    for (int energy : {1, 50, 101})
        CHECK_FALSE(threshold_met({energy, 80}, 1.0, 0.5, p));  // 0.4 < 0.5
    CHECK(threshold_met({1, 101}, 1.0, 0.5, p));                // 0.505 >= 0.5

    // tau = 0 always passes
    test::CaseGen gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const SystemParams q = gen.params();
        CHECK(threshold_met(gen.state_in(q), gen.uniform(), 0.0, q));
    }
}

TEST_CASE("probability functions") {
    const SystemParams p = paper_params();

    CHECK(eval_prob(ConstantProb{0.3}, 55, p) == doctest::Approx(0.3));

    // linear: zero exactly at the eligibility minimum, clamped at full battery
    CHECK(eval_prob(LinearProb{2.0}, 11, p) == 0.0);
    CHECK(eval_prob(LinearProb{2.0}, 100, p) == 1.0);
    CHECK(eval_prob(LinearProb{2.0}, 55, p) == doctest::Approx(2.0 * 44.0 / 89.0));

    // elliptical: the radicand argument saturates at energy = B - E
    CHECK(eval_prob(EllipticalProb{1.2}, 90, p) == 1.0);
    CHECK(eval_prob(EllipticalProb{1.2}, 100, p) == 1.0);
    const double x50 = 49.0 / 89.0;
    CHECK(eval_prob(EllipticalProb{1.2}, 50, p) ==
          doctest::Approx(1.2 * (1.0 - std::sqrt(1.0 - x50 * x50))));
}

TEST_CASE("probability functions are monotone and reach their advertised maxima") {
    const SystemParams p = paper_params();
    for (double c : {0.4, 0.8, 1.0, 1.2, 2.0, 3.0}) {
        double prev_lin = -1.0;
        double prev_ell = -1.0;
        double max_lin = 0.0;
        double max_ell = 0.0;
        int lin_hits_one_at = -1;
        int ell_hits_one_at = -1;
        for (int e = p.energy_floor + p.tx_cost; e <= p.battery_capacity; ++e) {
            const double lin = eval_prob(LinearProb{c}, e, p);
            const double ell = eval_prob(EllipticalProb{c}, e, p);
            CHECK(lin >= prev_lin);
            CHECK(ell >= prev_ell);
            prev_lin = lin;
            prev_ell = ell;
            max_lin = std::max(max_lin, lin);
            max_ell = std::max(max_ell, ell);
            if (lin == 1.0 && lin_hits_one_at < 0)
                lin_hits_one_at = e;
            if (ell == 1.0 && ell_hits_one_at < 0)
                ell_hits_one_at = e;
        }
        if (c <= 1.0) {
            CHECK(max_lin == doctest::Approx(c));
            CHECK(max_ell == doctest::Approx(c));
        } else {
            // p = 1 is reached strictly before a full battery
            CHECK(lin_hits_one_at > 0);
            CHECK(lin_hits_one_at < p.battery_capacity);
            CHECK(ell_hits_one_at > 0);
            CHECK(ell_hits_one_at < p.battery_capacity);
        }
    }
}

TEST_CASE("elliptical is strictly increasing until it saturates") {
    const SystemParams p = paper_params();
    double prev = -1.0;
    for (int e = p.energy_floor + p.tx_cost; e <= p.battery_capacity - p.tx_cost; ++e) {
        const double v = eval_prob(EllipticalProb{0.9}, e, p);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("decisions per policy") {
    const SystemParams p = paper_params();

    // no-policy transmits whenever the reserve condition holds, at any age
    for (int aoi : {1, 50, 200}) {
        CHECK(decide(NoPolicy{}, {11, aoi}, p, 0.999));
        CHECK_FALSE(decide(NoPolicy{}, {10, aoi}, p, 0.0));
    }

    // constant K=1 degenerates the proposed policy to threshold-only
    test::CaseGen gen(11);
    for (int trial = 0; trial < 500; ++trial) {
        const SystemParams q = gen.params();
        const DeviceState s = gen.state_in(q);
        const double alpha = gen.uniform();
        const double tau = gen.uniform();
        const double u = gen.uniform();
        CHECK(decide(Proposed{alpha, tau, ConstantProb{1.0}}, s, q, u) ==
              decide(ThresholdOnly{alpha, tau}, s, q, u));
    }

    // adra age gate dominates everything else
    CHECK_FALSE(decide(Adra{50, 1.0}, {100, 49}, p, 0.0));
    CHECK(decide(Adra{50, 1.0}, {100, 50}, p, 0.0));
}

TEST_CASE("compliant policies never transmit below the reserve") {
    test::CaseGen gen(23);
    for (int trial = 0; trial < 2000; ++trial) {
        const SystemParams q = gen.params();
        DeviceState s = gen.state_in(q);
        s.energy = gen.integer(0, q.tx_cost + q.energy_floor - 1);  // ineligible by construction
        const double u = gen.uniform();
        CHECK_FALSE(decide(NoPolicy{}, s, q, u));
        CHECK_FALSE(decide(ThresholdOnly{gen.uniform(), gen.uniform()}, s, q, u));
        CHECK_FALSE(decide(Proposed{gen.uniform(), gen.uniform(), ConstantProb{1.0}}, s, q, u));
        CHECK_FALSE(
            decide(Proposed{gen.uniform(), gen.uniform(), EllipticalProb{2.0}}, s, q, u));
    }
}

TEST_CASE("adra ignores the reserve unless told otherwise") {
    const SystemParams p = paper_params();
    // energy in [E, E+E_min): physically able to transmit, reserve violated
    CHECK(decide(Adra{1, 1.0}, {10, 5}, p, 0.5));
    CHECK_FALSE(decide(Adra{1, 1.0}, {9, 5}, p, 0.5));
    CHECK_FALSE(decide(Adra{1, 1.0, true}, {10, 5}, p, 0.5));
    CHECK(decide(Adra{1, 1.0, true}, {11, 5}, p, 0.5));
}

TEST_CASE("draw convention: p=0 never transmits, p=1 always") {
    const SystemParams p = paper_params();
    const DeviceState ready{100, 200};
    CHECK_FALSE(decide(Proposed{0.5, 0.0, ConstantProb{0.0}}, ready, p, 0.0));
    CHECK(decide(Proposed{0.5, 0.0, ConstantProb{1.0}}, ready, p, 0.9999999));
    CHECK_FALSE(decide(Adra{1, 0.0}, ready, p, 0.0));
}

TEST_CASE("decision depends only on the (energy, aoi, u) triple") {
    test::CaseGen gen(31);
    const SystemParams q = paper_params();
    const PolicyConfig policy = Proposed{0.7, 0.4, EllipticalProb{1.2}};
    for (int trial = 0; trial < 200; ++trial) {
        const DeviceState s = gen.state_in(q);
        const double u = gen.uniform();
        CHECK(decide(policy, s, q, u) == decide(policy, DeviceState{s.energy, s.aoi}, q, u));
    }
}

TEST_CASE("policy validation") {
    const SystemParams p = paper_params();
    CHECK_NOTHROW(validate_policy(NoPolicy{}, p));
    CHECK_NOTHROW(validate_policy(Proposed{0.0, 1.0, LinearProb{2.0}}, p));
    CHECK_THROWS_AS(validate_policy(ThresholdOnly{1.2, 0.5}, p), std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(ThresholdOnly{0.5, -0.1}, p), std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(Proposed{0.5, 0.5, ConstantProb{1.0001}}, p),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(Proposed{0.5, 0.5, LinearProb{0.0}}, p),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(Adra{0, 0.5}, p), std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(Adra{201, 0.5}, p), std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(Adra{50, 1.5}, p), std::invalid_argument);
}
