#include <catch2/catch_amalgamated.hpp>

#include <bandit/batchdp.hpp>
#include <bandit/pde.hpp>
#include "support.hpp"

#include <cmath>
#include <random>
#include <string>

using namespace bandit;

namespace {

PriorSpec random_two_sided_prior(std::mt19937& rng) {
    std::uniform_int_distribution<int> n_extra(0, 3);
    std::uniform_real_distribution<double> wpos(0.2, 3.0);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    PriorSpec prior;
    prior.atoms.push_back({wpos(rng), mass(rng)});
    prior.atoms.push_back({-wpos(rng), mass(rng)});
    for (int k = n_extra(rng); k > 0; --k) {
        double w = wpos(rng) * (rng() % 2 ? 1.0 : -1.0);
        prior.atoms.push_back({w, mass(rng)});
    }
    double total = prior.total_mass();
    for (auto& a : prior.atoms) a.p /= total;
    return prior;
}

} // namespace

TEST_CASE("single batch reduces to the best fixed action") {
    // with one batch the game is decided at t=0: risk(0) = min(g1, g2)(0,0)
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto f = solve_batch_risk(prior, params, BatchSchedule::uniform(1),
                              make_symmetric_xgrid(0.025, 6.0));
    REQUIRE(f.risk00() == Catch::Approx(0.627).margin(1e-12));
}

TEST_CASE("fifty batches land just above the limiting risk") {
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto f = solve_batch_risk(prior, params, BatchSchedule::uniform(50),
                              testsupport::ci_grid().xgrid());
    double ratio = f.risk00() / testsupport::ci_field().risk00();
    REQUIRE(ratio >= 1.0);
    REQUIRE(ratio <= 1.05);
    // regression pin for this grid
    REQUIRE(f.risk00() == Catch::Approx(0.38052508694727749).epsilon(1e-12));
}

TEST_CASE("x-quadrature refinement barely moves the batch risk") {
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto sched = BatchSchedule::uniform(50);
    double coarse = solve_batch_risk(prior, params, sched,
                                     make_symmetric_xgrid(0.025, 6.0)).risk00();
    double fine = solve_batch_risk(prior, params, sched,
                                   make_symmetric_xgrid(0.0125, 6.0)).risk00();
    // measured delta ~1.5e-6
    REQUIRE(std::abs(coarse - fine) < 1e-4);
}

TEST_CASE("diffusion rescaling multiplies the risk by sqrt(k)") {
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto xg = testsupport::ci_grid().xgrid();

    auto same = verify_scaling(prior, params, BatchSchedule::uniform(20), 1.0, xg);
    REQUIRE(same.ratio == 1.0);

    auto rep = verify_scaling(prior, params, BatchSchedule::uniform(20), 4.0, xg);
    REQUIRE(rep.expected_ratio == 2.0);
    REQUIRE(rep.ratio == Catch::Approx(2.0).margin(1e-12));

    REQUIRE_THROWS_AS(verify_scaling(prior, params, BatchSchedule::uniform(2), -1.0, xg),
                      config_error);
}

TEST_CASE("a batch of M items equals one step of an M-fold noisier model") {
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto xg = testsupport::ci_grid().xgrid();

    auto trivial = verify_batch_one_by_one(prior, params, 10, 1, xg);
    REQUIRE(trivial.diff == 0.0);

    auto rep = verify_batch_one_by_one(prior, params, 10, 5, xg);
    REQUIRE(rep.diff < 1e-9);
}

TEST_CASE("switching to the known arm is absorbing for random priors") {
    auto& rng = testsupport::test_rng();
    ModelParams params;
    XGrid xg = make_symmetric_xgrid(0.04, 7.0);
    std::uniform_int_distribution<int> kdist(1, 5);
    std::uniform_real_distribution<double> ddist(0.3, 1.0);
    for (int trial = 0; trial < 24; ++trial) {
        PriorSpec prior = random_two_sided_prior(rng);
        params.D = ddist(rng);
        auto rep = verify_absorbing(prior, params, kdist(rng), xg);
        INFO("trial " << trial << ": full=" << rep.full_risk
                      << " reduced=" << rep.reduced_risk);
        CHECK(rep.absorbing_ok);
        CHECK(rep.diff < 1e-9);
    }
    REQUIRE_THROWS_AS(verify_absorbing(testsupport::canonical_prior(), params, 7, xg),
                      config_error);
}

TEST_CASE("explore-then-commit upper bound dominates the batch risk") {
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto xg = testsupport::ci_grid().xgrid();
    for (int K : {10, 50}) {
        double risk = solve_batch_risk(prior, params, BatchSchedule::uniform(K), xg).risk00();
        double bound = initial_step_bound(prior, params, 1.0 / K, xg);
        REQUIRE(risk <= bound + 1e-9);
    }
    REQUIRE_THROWS_AS(initial_step_bound(prior, params, 0.0, xg), config_error);
}

TEST_CASE("risk decomposes over the prior atoms under the optimal rule") {
    // value of the fixed threshold rule is linear in the prior, so evaluating
    // the solved rule one atom at a time must reassemble the Bayesian risk
    auto prior = testsupport::canonical_prior();
    ModelParams params;
    auto sched = BatchSchedule::uniform(50);
    auto xg = testsupport::ci_grid().xgrid();
    auto f = solve_batch_risk(prior, params, sched, xg);
    auto strat = f.thresholds();

    double mix = 0.0;
    for (const auto& a : prior.atoms) {
        PriorSpec one{{{a.w, 1.0}}};
        mix += a.p * solve_batch_losses(strat, one, params, sched, xg).risk00();
    }
    REQUIRE(mix == Catch::Approx(f.risk00()).margin(1e-9));
}

TEST_CASE("fixed-arm threshold rules price out exactly") {
    ModelParams params;
    XGrid xg = make_symmetric_xgrid(0.04, 7.0);
    auto sched = BatchSchedule::uniform(10);

    ThresholdStrategy always_switch;  // T above the domain: x < T everywhere
    always_switch.t = {0.0};
    always_switch.T = {100.0};
    ThresholdStrategy never_switch;
    never_switch.t = {0.0};
    never_switch.T = {-100.0};

    for (double d : {1.3, -2.0}) {
        PriorSpec one{{{d, 1.0}}};
        double v = solve_batch_losses(always_switch, one, params, sched, xg).risk00();
        REQUIRE(v == Catch::Approx(std::max(d, 0.0)).margin(1e-12));
    }
    // playing the unknown arm throughout loses |d| per unit horizon when the
    // drift is unfavourable; quadrature truncation grows with |d|
    for (double d : {-0.8, -1.5}) {
        PriorSpec one{{{d, 1.0}}};
        double v = solve_batch_losses(never_switch, one, params, sched, xg).risk00();
        REQUIRE(v == Catch::Approx(-d).margin(1e-6));
    }
    PriorSpec far{{{-3.0, 1.0}}};
    double v = solve_batch_losses(never_switch, far, params, sched, xg).risk00();
    REQUIRE(v == Catch::Approx(3.0).margin(1e-4));
}

TEST_CASE("schedule parsing and field integrity guards") {
    REQUIRE_THROWS_AS(BatchSchedule::uniform(0), config_error);
    BatchSchedule short_sum{{0.5, 0.4}};
    REQUIRE_THROWS_AS(short_sum.validate(), config_error);
    BatchSchedule negative{{0.5, -0.5, 1.0}};
    REQUIRE_THROWS_AS(negative.validate(), config_error);
    BatchSchedule empty{};
    REQUIRE_THROWS_AS(empty.validate(), config_error);

    auto times = BatchSchedule::uniform(4).times();
    REQUIRE(times.size() == 5);
    REQUIRE(times.front() == 0.0);
    REQUIRE(times.back() == 1.0);
    REQUIRE(times[1] == Catch::Approx(0.25).margin(1e-15));

    StepRiskField broken;
    broken.xgrid = make_symmetric_xgrid(0.5, 2.0);
    broken.t = {0.0, 0.5, 1.0};
    broken.threshold = {0.0, 0.0};
    broken.flip_changes = {1, 2};
    broken.flip_ordered = {1, 1};
    try {
        broken.thresholds();
        FAIL("expected integrity_error");
    } catch (const integrity_error& e) {
        REQUIRE(std::string(e.what()).find("2 action changes") != std::string::npos);
    }
}
