#include "doctest.h"

#include <cmath>

#include "fopid/tuning.hpp"

using namespace fopid;

namespace {

GaConfig small_ga(std::uint64_t seed) {
    GaConfig cfg;
    cfg.generations = 30;  // unit-test budget; the full budget runs in the acceptance suite
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("tune_pid drives a first-order lag close to the set-point") {
    const RationalTf plant({1.0}, {1.0, 1.0});
    SimConfig sim;
    sim.step_h = 0.01;
    sim.horizon_t = 40.0;
    const auto res = tune_pid(plant, sim, {1.0, 1.0}, small_ga(5));
    const auto tr = simulate_loop(plant, realize_controller(res.params, sim.deriv_tf()),
                                  SetpointSchedule::unit_step(), sim);
    // |e| small over the second half of the horizon
    for (std::size_t k = tr.size() / 2; k < tr.size(); ++k) CHECK(std::abs(tr.r[k] - tr.y[k]) <= 0.01);
}

TEST_CASE("tuned controller beats the zero controller") {
    const RationalTf plant({1.0}, {1.0, 2.0, 1.0});
    SimConfig sim;
    sim.step_h = 0.01;
    sim.horizon_t = 60.0;
    const CostWeights w{1.0, 1.0};
    const auto res = tune_pid(plant, sim, w, small_ga(3));
    const auto zero = evaluate_cost(
        simulate_loop(plant, realize_controller(PidParams{0, 0, 0}, sim.deriv_tf()), SetpointSchedule::unit_step(), sim),
        w);
    CHECK(res.ga.best_cost < zero);
}

TEST_CASE("reported cost reproduces under re-evaluation") {
    const RationalTf plant({1.0}, {1.0, 2.0, 1.0});
    SimConfig sim;
    sim.step_h = 0.01;
    sim.horizon_t = 60.0;
    const CostWeights w{1.0, 1.0};
    const auto res = tune_pid(plant, sim, w, small_ga(8));
    const double again = evaluate_cost(
        simulate_loop(plant, realize_controller(res.params, sim.deriv_tf()), SetpointSchedule::unit_step(), sim), w);
    CHECK(std::abs(again - res.ga.best_cost) <= 1e-9 * std::max(1.0, res.ga.best_cost));
}

TEST_CASE("tune_pid is seed deterministic (bitwise)") {
    const RationalTf plant({1.0}, {1.0, 2.0, 1.0});
    SimConfig sim;
    sim.step_h = 0.02;
    sim.horizon_t = 40.0;
    const auto a = tune_pid(plant, sim, {1.0, 1.0}, small_ga(17));
    const auto b = tune_pid(plant, sim, {1.0, 1.0}, small_ga(17));
    CHECK(a.params.kp == b.params.kp);
    CHECK(a.params.ki == b.params.ki);
    CHECK(a.params.kd == b.params.kd);
    CHECK(a.ga.best_cost == b.ga.best_cost);
}

TEST_CASE("tune_fopid respects order bounds and warm start never loses to the PID") {
    const RationalTf plant({1.0}, {1.0, 2.0, 1.0}, 0.3);
    SimConfig sim;
    sim.step_h = 0.02;
    sim.horizon_t = 60.0;
    const CostWeights w{1.0, 1.0};
    const auto pid = tune_pid(plant, sim, w, small_ga(2));
    const auto fo = tune_fopid(plant, sim, w, small_ga(2), pid.params);
    CHECK(fo.params.lambda >= 0.1);
    CHECK(fo.params.lambda <= 1.5);
    CHECK(fo.params.mu >= 0.1);
    CHECK(fo.params.mu <= 1.5);
    CHECK(fo.params.kp <= 10.0);
    // warm start puts the PID point in the initial population, so the FOPID
    // search can only match or improve on it
    CHECK(fo.ga.best_cost <= pid.ga.best_cost + 1e-12);
}

TEST_CASE("tune rejects unstable and improper plants") {
    SimConfig sim;
    CHECK_THROWS_AS(tune_pid(RationalTf({1.0}, {-1.0, 1.0}), sim, {1, 1}, small_ga(1)), std::invalid_argument);
    CHECK_THROWS_AS(tune_fopid(RationalTf({0.0, 0.0, 1.0}, {1.0, 1.0}), sim, {1, 1}, small_ga(1)),
                    std::invalid_argument);
}

TEST_CASE("TuningRecord JSON round trip") {
    TuningRecord rec;
    rec.plant_spec = {Family::P2, 0.4};
    rec.soptd = {1.0, 2.5, 0.75, 1.1};
    rec.controller_type = "fopid";
    rec.params = to_json(FopidParams{1.0, 0.5, 0.25, 0.9, 1.1});
    rec.cost = 12.5;
    rec.seed = 99;
    rec.ga_meta = {{"evaluations", 2020}};
    const auto rec2 = tuning_record_from_json(to_json(rec));
    CHECK(rec2.plant_spec.family == rec.plant_spec.family);
    CHECK(rec2.plant_spec.param == rec.plant_spec.param);
    CHECK(rec2.soptd.tau1 == rec.soptd.tau1);
    CHECK(rec2.soptd.L == rec.soptd.L);
    CHECK(rec2.controller_type == "fopid");
    const auto p = fopid_from_json(rec2.params);
    CHECK(p.lambda == 0.9);
    CHECK(rec2.cost == 12.5);
    CHECK(rec2.seed == 99);
    CHECK(rec2.ga_meta.at("evaluations") == 2020);
}
