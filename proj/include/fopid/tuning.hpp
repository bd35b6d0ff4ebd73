#ifndef FOPID_TUNING_HPP
#define FOPID_TUNING_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "fopid/controller.hpp"
#include "fopid/ga.hpp"
#include "fopid/process_models.hpp"
#include "fopid/reduction.hpp"
#include "fopid/simulation.hpp"

namespace fopid {

constexpr double kGainMax = 10.0;
constexpr double kOrderMin = 0.1;
constexpr double kOrderMax = 1.5;

struct PidTuneResult {
    PidParams params;
    GaResult ga;
};

struct FopidTuneResult {
    FopidParams params;
    GaResult ga;
};

namespace detail {

inline void check_tunable(const RationalTf& plant) {
    if (!is_stable(plant)) throw std::invalid_argument("tune: plant must be stable");
    if (!plant.proper()) throw std::invalid_argument("tune: plant must be proper");
}

}  // namespace detail

/// GA-tuned PID for a unit step set-point, gains searched in [0, 10]^3.
inline PidTuneResult tune_pid(const RationalTf& plant, const SimConfig& sim, const CostWeights& weights,
                              GaConfig ga) {
    detail::check_tunable(plant);
    sim.validate();
    weights.validate();
    const LinearSystem plant_sys = LinearSystem::from_tf(RationalTf(plant.num, plant.den, 0.0));
    const auto setpoint = SetpointSchedule::unit_step();
    auto objective = [&](const std::vector<double>& g) {
        const LinearSystem ctrl = controller_blocks(PidParams{g[0], g[1], g[2]}, sim.deriv_tf());
        return evaluate_cost(simulate_loop(plant_sys, plant.delay_s, ctrl, setpoint, sim), weights);
    };
    ga.bounds = {{0.0, kGainMax}, {0.0, kGainMax}, {0.0, kGainMax}};
    GaResult res = ga_minimize(objective, ga);
    if (res.best_cost >= 1e9)
        throw std::runtime_error("tune_pid: every candidate diverged (seed " + std::to_string(ga.seed) + ")");
    return PidTuneResult{PidParams{res.best_genes[0], res.best_genes[1], res.best_genes[2]}, std::move(res)};
}

/// GA-tuned FOPID: gains in [0, 10], orders in [0.1, 1.5]. An optional warm
/// start (typically the tuned PID at lambda = mu = 1) is injected into the
/// initial population, which realizes the search-space containment argument
/// operationally.
inline FopidTuneResult tune_fopid(const RationalTf& plant, const SimConfig& sim, const CostWeights& weights,
                                  GaConfig ga, std::optional<PidParams> warm_start = std::nullopt) {
    detail::check_tunable(plant);
    sim.validate();
    weights.validate();
    const LinearSystem plant_sys = LinearSystem::from_tf(RationalTf(plant.num, plant.den, 0.0));
    const auto setpoint = SetpointSchedule::unit_step();
    auto objective = [&](const std::vector<double>& g) {
        const LinearSystem ctrl =
            controller_blocks(FopidParams{g[0], g[1], g[2], g[3], g[4]}, sim.band, sim.deriv_tf());
        return evaluate_cost(simulate_loop(plant_sys, plant.delay_s, ctrl, setpoint, sim), weights);
    };
    ga.bounds = {{0.0, kGainMax}, {0.0, kGainMax}, {0.0, kGainMax}, {kOrderMin, kOrderMax}, {kOrderMin, kOrderMax}};
    if (warm_start) ga.initial_guesses.push_back({warm_start->kp, warm_start->ki, warm_start->kd, 1.0, 1.0});
    GaResult res = ga_minimize(objective, ga);
    if (res.best_cost >= 1e9)
        throw std::runtime_error("tune_fopid: every candidate diverged (seed " + std::to_string(ga.seed) + ")");
    return FopidTuneResult{
        FopidParams{res.best_genes[0], res.best_genes[1], res.best_genes[2], res.best_genes[3], res.best_genes[4]},
        std::move(res)};
}

/// One tuning-dataset row: everything needed to replay the run bit-exact.
struct TuningRecord {
    ProcessSpec plant_spec;
    SoptdModel soptd;
    std::string controller_type;  // "pid" | "fopid"
    nlohmann::json params;
    double cost = 0.0;
    std::uint64_t seed = 0;
    nlohmann::json ga_meta;
};

inline nlohmann::json to_json(const TuningRecord& rec) {
    return nlohmann::json{{"plant_spec", to_json(rec.plant_spec)},
                          {"soptd", to_json(rec.soptd)},
                          {"controller_type", rec.controller_type},
                          {"params", rec.params},
                          {"cost", rec.cost},
                          {"seed", rec.seed},
                          {"ga", rec.ga_meta}};
}

inline TuningRecord tuning_record_from_json(const nlohmann::json& j) {
    TuningRecord rec;
    rec.plant_spec = process_spec_from_json(j.at("plant_spec"));
    rec.soptd = soptd_from_json(j.at("soptd"));
    rec.controller_type = j.at("controller_type").get<std::string>();
    rec.params = j.at("params");
    rec.cost = j.at("cost").get<double>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.ga_meta = j.at("ga");
    return rec;
}

}  // namespace fopid

#endif  // FOPID_TUNING_HPP
