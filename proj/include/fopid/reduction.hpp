#ifndef FOPID_REDUCTION_HPP
#define FOPID_REDUCTION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "fopid/ga.hpp"
#include "fopid/transfer_function.hpp"

namespace fopid {

/// Second-order-plus-time-delay template K e^{-Ls} / ((tau1 s + 1)(tau2 s + 1)),
/// with tau1 >= tau2 as the canonical ordering.
struct SoptdModel {
    double K = 1.0;
    double tau1 = 1.0;
    double tau2 = 1.0;
    double L = 0.0;

    void validate() const {
        if (!(tau1 >= tau2 && tau2 > 0.0)) throw std::invalid_argument("SoptdModel: need tau1 >= tau2 > 0");
        if (!(L >= 0.0)) throw std::invalid_argument("SoptdModel: need L >= 0");
        if (!(std::isfinite(K) && K != 0.0)) throw std::invalid_argument("SoptdModel: K must be finite and nonzero");
    }

    double time_scale() const { return tau1 + tau2 + L; }
};

inline RationalTf soptd_to_tf(const SoptdModel& m) {
    m.validate();
    return RationalTf({m.K}, {1.0, m.tau1 + m.tau2, m.tau1 * m.tau2}, m.L);
}

inline nlohmann::json to_json(const SoptdModel& m) {
    return nlohmann::json{{"K", m.K}, {"tau1", m.tau1}, {"tau2", m.tau2}, {"L", m.L}};
}

inline SoptdModel soptd_from_json(const nlohmann::json& j) {
    SoptdModel m{j.at("K").get<double>(), j.at("tau1").get<double>(), j.at("tau2").get<double>(),
                 j.at("L").get<double>()};
    m.validate();
    return m;
}

/// Weights on the real/imaginary Nyquist-plane mismatch (distinct from the
/// time-domain cost weights).
struct NyquistWeights {
    double w1_re = 1.0;
    double w2_im = 1.0;

    void validate() const {
        if (!(w1_re >= 0.0 && w2_im >= 0.0 && w1_re + w2_im > 0.0))
            throw std::invalid_argument("NyquistWeights: weights must be nonnegative with positive sum");
    }
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
    return g;
}

struct ReductionConfig {
    std::vector<double> omega_grid = log_grid(1e-3, 1e2, 100);
    NyquistWeights weights{};
    std::size_t max_evaluations = 4000;
    double tau_min = 1e-3, tau_max = 50.0;
    double delay_min = 0.0, delay_max = 20.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (omega_grid.empty()) throw std::invalid_argument("ReductionConfig: empty frequency grid");
        double prev = 0.0;
        for (double w : omega_grid) {
            if (!(w > prev)) throw std::invalid_argument("ReductionConfig: grid must be positive and increasing");
            prev = w;
        }
        weights.validate();
        if (!(tau_min > 0.0 && tau_min < tau_max)) throw std::invalid_argument("ReductionConfig: bad tau bounds");
        if (!(delay_min >= 0.0 && delay_min < delay_max))
            throw std::invalid_argument("ReductionConfig: bad delay bounds");
        if (max_evaluations < 100) throw std::invalid_argument("ReductionConfig: budget too small");
    }
};

/// Discrete 2-norm Nyquist discrepancy:
///   w1*||Re P - Re P~||_2 + w2*||Im P - Im P~||_2 over the grid.
inline double nyquist_cost(const RationalTf& p, const SoptdModel& m, const ReductionConfig& cfg) {
    cfg.validate();
    m.validate();
    double re2 = 0.0, im2 = 0.0;
    for (double w : cfg.omega_grid) {
        const std::complex<double> full = p.at(w);
        const std::complex<double> jw{0.0, w};
        const std::complex<double> red =
            m.K / ((1.0 + m.tau1 * jw) * (1.0 + m.tau2 * jw)) * std::exp(std::complex<double>{0.0, -w * m.L});
        const double dre = full.real() - red.real();
        const double dim = full.imag() - red.imag();
        re2 += dre * dre;
        im2 += dim * dim;
    }
    return cfg.weights.w1_re * std::sqrt(re2) + cfg.weights.w2_im * std::sqrt(im2);
}

struct ReductionResult {
    SoptdModel model;
    double final_cost = 0.0;
    bool budget_exhausted = false;
};

/// Fit {tau1, tau2, L} by GA global search plus coordinate-descent polish;
/// K is pinned to the plant's dc gain so the steady-state mismatch is exactly
/// zero and the search stays three-dimensional.
inline ReductionResult reduce_to_soptd(const RationalTf& p, const ReductionConfig& cfg) {
    cfg.validate();
    if (!p.proper()) throw std::invalid_argument("reduce_to_soptd: plant must be proper");
    if (!is_stable(p)) throw std::invalid_argument("reduce_to_soptd: plant must be stable");
    const double k = p.dc_gain();
    if (k == 0.0) throw std::invalid_argument("reduce_to_soptd: zero dc gain");

    // Precompute the full-model response once; the inner objective only
    // evaluates the analytic SOPTD response.
    std::vector<std::complex<double>> full;
    full.reserve(cfg.omega_grid.size());
    for (double w : cfg.omega_grid) full.push_back(p.at(w));

    auto objective = [&](const std::vector<double>& genes) {
        const double t1 = std::max(genes[0], genes[1]);
        const double t2 = std::min(genes[0], genes[1]);
        const double l = genes[2];
        double re2 = 0.0, im2 = 0.0;
        for (std::size_t i = 0; i < cfg.omega_grid.size(); ++i) {
            const double w = cfg.omega_grid[i];
            const std::complex<double> jw{0.0, w};
            const std::complex<double> red =
                k / ((1.0 + t1 * jw) * (1.0 + t2 * jw)) * std::exp(std::complex<double>{0.0, -w * l});
            const double dre = full[i].real() - red.real();
            const double dim = full[i].imag() - red.imag();
            re2 += dre * dre;
            im2 += dim * dim;
        }
        return cfg.weights.w1_re * std::sqrt(re2) + cfg.weights.w2_im * std::sqrt(im2);
    };

    GaConfig ga;
    ga.bounds = {{cfg.tau_min, cfg.tau_max}, {cfg.tau_min, cfg.tau_max}, {cfg.delay_min, cfg.delay_max}};
    ga.seed = cfg.seed;
    ga.generations = std::max<std::size_t>(1, cfg.max_evaluations / ga.population);
    GaResult global = ga_minimize(objective, ga);

    // Coordinate descent with step halving down to 1e-8. A pattern move after
    // each successful sweep (extrapolating the sweep's aggregate direction)
    // keeps the polish from limit-cycling in the diagonal valley that the
    // correlated tau genes produce.
    std::vector<double> x = global.best_genes;
    double best = global.best_cost;
    std::vector<double> step = {0.1 * (cfg.tau_max - cfg.tau_min), 0.1 * (cfg.tau_max - cfg.tau_min),
                                0.1 * (cfg.delay_max - cfg.delay_min)};
    const std::vector<std::pair<double, double>> box = ga.bounds;
    while (*std::max_element(step.begin(), step.end()) >= 1e-8) {
        const std::vector<double> x_sweep = x;
        for (std::size_t i = 0; i < 3; ++i) {
            for (double dir : {+1.0, -1.0}) {
                std::vector<double> cand = x;
                cand[i] = std::clamp(cand[i] + dir * step[i], box[i].first, box[i].second);
                const double c = objective(cand);
                if (c < best) {
                    best = c;
                    x = cand;
                    break;
                }
            }
        }
        // Halve every step together once a full sweep stalls; halving a
        // coordinate on its own failure freezes it while the others still
        // move, leaving its residual locked in.
        if (x == x_sweep) {
            for (double& s : step) s *= 0.5;
        } else {
            std::vector<double> cand(3);
            for (std::size_t i = 0; i < 3; ++i)
                cand[i] = std::clamp(2.0 * x[i] - x_sweep[i], box[i].first, box[i].second);
            const double c = objective(cand);
            if (c < best) {
                best = c;
                x = cand;
            }
        }
    }

    ReductionResult res;
    res.model = SoptdModel{k, std::max(x[0], x[1]), std::min(x[0], x[1]), x[2]};
    res.model.validate();
    res.final_cost = best;
    res.budget_exhausted = global.history.size() >= ga.generations && best >= global.best_cost;
    return res;
}

}  // namespace fopid

#endif  // FOPID_REDUCTION_HPP
