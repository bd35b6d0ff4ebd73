#ifndef FOPID_GA_HPP
#define FOPID_GA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fopid/rng.hpp"

namespace fopid {

struct GaConfig {
    std::size_t population = 20;
    double crossover_frac = 0.8;
    double mutation_frac = 0.2;
    std::size_t generations = 100;
    std::vector<std::pair<double, double>> bounds;  // per-gene [low, high]
    std::uint64_t seed = 0;
    /// Optional individuals injected into the initial population (clipped to
    /// bounds). Used to warm-start the FOPID search from a tuned PID point.
    std::vector<std::vector<double>> initial_guesses;

    void validate() const {
        if (population < 2) throw std::invalid_argument("GaConfig: population must be >= 2");
        if (crossover_frac < 0.0 || crossover_frac > 1.0 || mutation_frac < 0.0 || mutation_frac > 1.0)
            throw std::invalid_argument("GaConfig: fractions must lie in [0, 1]");
        if (generations < 1) throw std::invalid_argument("GaConfig: generations must be >= 1");
        if (bounds.empty()) throw std::invalid_argument("GaConfig: empty bounds");
        for (const auto& [lo, hi] : bounds)
            if (!(lo < hi)) throw std::invalid_argument("GaConfig: each gene needs low < high");
        for (const auto& g : initial_guesses)
            if (g.size() != bounds.size()) throw std::invalid_argument("GaConfig: initial guess dimension mismatch");
    }
};

struct GaResult {
    std::vector<double> best_genes;
    double best_cost = 0.0;
    std::vector<double> history;  // best cost per generation, nonincreasing
    std::size_t evaluations = 0;
};

/// Real-coded GA: elitism (incumbent always survives), tournament selection
/// of size 2, arithmetic blend crossover with beta in [-0.25, 1.25], per-gene
/// Gaussian mutation with sigma = 5% of the gene range, clipping to bounds.
/// Terminates at `generations` or when the best cost improves by less than
/// 1e-10 over 25 consecutive generations. Fully determined by cfg.seed.
inline GaResult ga_minimize(const std::function<double(const std::vector<double>&)>& objective, const GaConfig& cfg) {
    cfg.validate();
    const std::size_t dim = cfg.bounds.size();
    const std::size_t pop_n = cfg.population;
    Rng rng(cfg.seed);

    auto clip = [&](std::vector<double>& g) {
        for (std::size_t i = 0; i < dim; ++i) g[i] = std::clamp(g[i], cfg.bounds[i].first, cfg.bounds[i].second);
    };

    GaResult res;
    std::vector<std::vector<double>> pop(pop_n, std::vector<double>(dim));
    for (std::size_t p = 0; p < pop_n; ++p)
        for (std::size_t i = 0; i < dim; ++i) pop[p][i] = rng.uniform(cfg.bounds[i].first, cfg.bounds[i].second);
    for (std::size_t g = 0; g < std::min(cfg.initial_guesses.size(), pop_n); ++g) {
        pop[g] = cfg.initial_guesses[g];
        clip(pop[g]);
    }

    std::vector<double> cost(pop_n);
    for (std::size_t p = 0; p < pop_n; ++p) {
        cost[p] = objective(pop[p]);
        ++res.evaluations;
    }
    std::size_t best_idx = static_cast<std::size_t>(
        std::min_element(cost.begin(), cost.end()) - cost.begin());
    res.best_genes = pop[best_idx];
    res.best_cost = cost[best_idx];

    auto tournament = [&]() -> const std::vector<double>& {
        const std::size_t a = rng.index(pop_n);
        const std::size_t b = rng.index(pop_n);
        return cost[a] <= cost[b] ? pop[a] : pop[b];
    };

    std::size_t stall = 0;
    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        std::vector<std::vector<double>> next;
        next.reserve(pop_n);
        next.push_back(res.best_genes);  // elitism
        while (next.size() < pop_n) {
            std::vector<double> c1 = tournament();
            std::vector<double> c2 = tournament();
            if (rng.uniform01() < cfg.crossover_frac) {
                for (std::size_t i = 0; i < dim; ++i) {
                    const double beta = rng.uniform(-0.25, 1.25);
                    const double a = c1[i], b = c2[i];
                    c1[i] = beta * a + (1.0 - beta) * b;
                    c2[i] = beta * b + (1.0 - beta) * a;
                }
            }
            for (auto* child : {&c1, &c2}) {
                for (std::size_t i = 0; i < dim; ++i) {
                    if (rng.uniform01() < cfg.mutation_frac) {
                        const double range = cfg.bounds[i].second - cfg.bounds[i].first;
                        (*child)[i] += 0.05 * range * rng.gaussian();
                    }
                }
                clip(*child);
            }
            next.push_back(std::move(c1));
            if (next.size() < pop_n) next.push_back(std::move(c2));
        }
        pop = std::move(next);
        const double prev_best = res.best_cost;
        for (std::size_t p = 0; p < pop_n; ++p) {
            cost[p] = objective(pop[p]);
            ++res.evaluations;
            if (cost[p] < res.best_cost) {
                res.best_cost = cost[p];
                res.best_genes = pop[p];
            }
        }
        res.history.push_back(res.best_cost);
        stall = prev_best - res.best_cost < 1e-10 ? stall + 1 : 0;
        if (stall >= 25) break;
    }
    return res;
}

}  // namespace fopid

#endif  // FOPID_GA_HPP
