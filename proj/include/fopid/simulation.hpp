#ifndef FOPID_SIMULATION_HPP
#define FOPID_SIMULATION_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fopid/controller.hpp"
#include "fopid/linear_system.hpp"
#include "fopid/transfer_function.hpp"

namespace fopid {

struct SimConfig {
    double step_h = 0.01;
    double horizon_t = 100.0;
    double divergence_limit = 1e6;
    BandApproxConfig band{};

    void validate() const {
        if (!(step_h > 0.0)) throw std::invalid_argument("SimConfig: step_h must be positive");
        if (!(horizon_t >= 10.0 * step_h)) throw std::invalid_argument("SimConfig: horizon too short for step");
        if (!(divergence_limit > 0.0)) throw std::invalid_argument("SimConfig: divergence_limit must be positive");
        band.validate();
    }

    /// Derivative-filter time constant used for proper PID realizations.
    double deriv_tf() const { return 100.0 * step_h; }
};

/// Horizon sized so every benchmark loop settles well inside it.
inline SimConfig default_sim_config(double time_scale) {
    SimConfig cfg;
    cfg.horizon_t = std::max(100.0, 15.0 * time_scale);
    cfg.step_h = cfg.horizon_t / 10000.0;
    return cfg;
}

struct CostWeights {
    double w1_itae = 1.0;
    double w2_isco = 1.0;

    void validate() const {
        if (!(w1_itae >= 0.0 && w2_isco >= 0.0 && w1_itae + w2_isco > 0.0))
            throw std::invalid_argument("CostWeights: weights must be nonnegative with positive sum");
    }
};

/// Piecewise-constant set-point: value of the last step at or before t.
struct SetpointSchedule {
    std::vector<std::pair<double, double>> steps;  // (time, value)

    static SetpointSchedule unit_step() { return SetpointSchedule{{{0.0, 1.0}}}; }

    void validate() const {
        if (steps.empty()) throw std::invalid_argument("SetpointSchedule: empty schedule");
        if (steps.front().first != 0.0) throw std::invalid_argument("SetpointSchedule: first step must be at t=0");
        for (std::size_t i = 1; i < steps.size(); ++i)
            if (!(steps[i].first > steps[i - 1].first))
                throw std::invalid_argument("SetpointSchedule: step times must be strictly increasing");
    }

    double at(double t) const {
        double v = steps.front().second;
        for (const auto& [ts, val] : steps) {
            if (ts > t) break;
            v = val;
        }
        return v;
    }
};

struct SimulationTrace {
    std::vector<double> t, r, y, u;
    bool diverged = false;
    double step_h = 0.0;
    double horizon_t = 0.0;

    std::size_t size() const { return t.size(); }
};

/// Fixed-step RK4 integrator for the unity-feedback loop with the plant dead
/// time realized as a sample-indexed history of the undelayed plant output
/// (linear interpolation for the fractional remainder). Dead times below half
/// a step collapse to the exact zero-delay algebraic path.
class ClosedLoopStepper {
public:
    ClosedLoopStepper(LinearSystem controller, LinearSystem plant, double plant_delay, const SimConfig& cfg,
                      bool feedback = true)
        : ctrl_(std::move(controller)),
          plant_(std::move(plant)),
          delay_(plant_delay),
          h_(cfg.step_h),
          feedback_(feedback),
          xc_(ctrl_.order(), 0.0),
          xp_(plant_.order(), 0.0),
          kc_(4, std::vector<double>(ctrl_.order())),
          kp_(4, std::vector<double>(plant_.order())),
          txc_(ctrl_.order()),
          txp_(plant_.order()) {
        if (delay_ < 0.0) throw std::invalid_argument("ClosedLoopStepper: negative dead time");
        if (delay_ < 0.5 * h_) delay_ = 0.0;
        push_history();
    }

    double time() const { return t_; }
    const std::vector<double>& controller_state() const { return xc_; }
    const std::vector<double>& plant_state() const { return xp_; }
    void set_controller_state(std::vector<double> xc) {
        if (xc.size() != xc_.size()) throw std::invalid_argument("set_controller_state: dimension mismatch");
        xc_ = std::move(xc);
    }

    /// Resume a delay-free loop from captured states (the output history is
    /// re-primed from the new states, so prior dead-time samples are lost).
    void set_states(std::vector<double> xc, std::vector<double> xp) {
        if (xc.size() != xc_.size() || xp.size() != xp_.size())
            throw std::invalid_argument("set_states: dimension mismatch");
        xc_ = std::move(xc);
        xp_ = std::move(xp);
        history_.clear();
        push_history();
    }

    /// Swap controller coefficients in place; state persists. Dimensions must
    /// match (same realization order across parameter updates).
    void swap_controller(LinearSystem controller) {
        if (controller.order() != ctrl_.order())
            throw std::invalid_argument("swap_controller: realization order changed");
        ctrl_ = std::move(controller);
    }

    /// Swap the plant and re-initialize its state so the (undelayed) output is
    /// continuous at the switch instant: the new state is the steady-state
    /// direction of the controllable-canonical form scaled to match y.
    void swap_plant(LinearSystem plant, double plant_delay) {
        const double y_now = history_.back();
        plant_ = std::move(plant);
        delay_ = plant_delay < 0.5 * h_ ? 0.0 : plant_delay;
        xp_.assign(plant_.order(), 0.0);
        for (auto& k : kp_) k.assign(plant_.order(), 0.0);
        txp_.assign(plant_.order(), 0.0);
        if (!xp_.empty()) init_plant_state_for_output(y_now);
        history_.back() = plant_raw_output(0.0);
    }

    /// Sample the loop at the current time for the given set-point.
    struct Sample {
        double y, u, e;
    };

    Sample sample(double r) const {
        double y;
        if (delay_ == 0.0) {
            y = algebraic_output(r, xc_, xp_);
        } else {
            y = delayed_output(t_);
        }
        const double e = feedback_ ? r - y : r;
        const double u = ctrl_.output(xc_, e);
        return {y, u, e};
    }

    /// One RK4 step; rv evaluates the set-point at arbitrary stage times.
    void step(const std::function<double(double)>& rv) {
        stage(t_, xc_, xp_, rv, kc_[0], kp_[0]);
        axpy(xc_, kc_[0], 0.5 * h_, txc_);
        axpy(xp_, kp_[0], 0.5 * h_, txp_);
        stage(t_ + 0.5 * h_, txc_, txp_, rv, kc_[1], kp_[1]);
        axpy(xc_, kc_[1], 0.5 * h_, txc_);
        axpy(xp_, kp_[1], 0.5 * h_, txp_);
        stage(t_ + 0.5 * h_, txc_, txp_, rv, kc_[2], kp_[2]);
        axpy(xc_, kc_[2], h_, txc_);
        axpy(xp_, kp_[2], h_, txp_);
        stage(t_ + h_, txc_, txp_, rv, kc_[3], kp_[3]);
        for (std::size_t i = 0; i < xc_.size(); ++i)
            xc_[i] += h_ / 6.0 * (kc_[0][i] + 2.0 * kc_[1][i] + 2.0 * kc_[2][i] + kc_[3][i]);
        for (std::size_t i = 0; i < xp_.size(); ++i)
            xp_[i] += h_ / 6.0 * (kp_[0][i] + 2.0 * kp_[1][i] + 2.0 * kp_[2][i] + kp_[3][i]);
        t_ += h_;
        push_history();
    }

private:
    static void axpy(const std::vector<double>& x, const std::vector<double>& k, double a, std::vector<double>& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * k[i];
    }

    // Undelayed plant output for a given input.
    double plant_raw_output(double u) const { return plant_.output(xp_, u); }

    double delayed_output(double t) const {
        const double tq = t - delay_;
        if (tq <= 0.0) return 0.0;
        const double idx = tq / h_;
        const auto lo = static_cast<std::size_t>(idx);
        if (lo + 1 >= history_.size()) return history_.back();
        const double frac = idx - static_cast<double>(lo);
        return history_[lo] * (1.0 - frac) + history_[lo + 1] * frac;
    }

    double algebraic_output(double r, const std::vector<double>& xc, const std::vector<double>& xp) const {
        const double sp = plant_.output_state_part(xp);
        const double sc = ctrl_.output_state_part(xc);
        const double dp = plant_.feedthrough();
        if (!feedback_) return sp + dp * ctrl_.output(xc, r);
        const double dc = ctrl_.feedthrough();
        return (sp + dp * sc + dp * dc * r) / (1.0 + dp * dc);
    }

    void stage(double t, const std::vector<double>& xc, const std::vector<double>& xp,
               const std::function<double(double)>& rv, std::vector<double>& dxc, std::vector<double>& dxp) const {
        const double r = rv(t);
        const double y = delay_ == 0.0 ? algebraic_output(r, xc, xp) : delayed_output(t);
        const double e = feedback_ ? r - y : r;
        const double u = ctrl_.output(xc, e);
        ctrl_.deriv(xc, e, dxc);
        plant_.deriv(xp, u, dxp);
    }

    void push_history() {
        // The delayed lookups only ever reference completed samples, so the
        // feedthrough contribution (zero for every strictly proper plant in
        // this library) is evaluated with the input reconstructed lazily.
        history_.push_back(plant_.output_state_part(xp_));
    }

    void init_plant_state_for_output(double y) {
        // Steady-state of the controllable canonical form for constant input:
        // x = (u/a0) e_1 when a0 != 0; scale that direction so C x = y.
        // Sections are handled chain by chain; only the first chain's first
        // section is populated (plants are single-section systems here).
        const auto& sec = plant_.chains.front().sections.front();
        std::vector<double> dir(xp_.size(), 0.0);
        dir[0] = 1.0;
        double cy = 0.0;
        for (std::size_t i = 0; i < dir.size(); ++i) cy += sec.c[i] * dir[i];
        cy *= plant_.chains.front().gain;
        if (cy != 0.0)
            xp_[0] = y / cy;
    }

    LinearSystem ctrl_;
    LinearSystem plant_;
    double delay_;
    double h_;
    bool feedback_;
    double t_ = 0.0;
    std::vector<double> xc_, xp_;
    std::vector<std::vector<double>> kc_, kp_;
    std::vector<double> txc_, txp_;
    std::vector<double> history_;
};

/// Unity-feedback simulation of controller and plant blocks.
inline SimulationTrace simulate_loop(const LinearSystem& plant, double plant_delay, const LinearSystem& controller,
                                     const SetpointSchedule& setpoint, const SimConfig& cfg, bool feedback = true) {
    cfg.validate();
    setpoint.validate();
    ClosedLoopStepper stepper(controller, plant, plant_delay, cfg, feedback);
    const auto nsteps = static_cast<std::size_t>(std::llround(cfg.horizon_t / cfg.step_h));
    SimulationTrace trace;
    trace.step_h = cfg.step_h;
    trace.horizon_t = cfg.horizon_t;
    trace.t.reserve(nsteps + 1);
    auto rv = [&](double t) { return setpoint.at(t); };
    for (std::size_t k = 0; k <= nsteps; ++k) {
        const double t = stepper.time();
        const double r = setpoint.at(t);
        const auto s = stepper.sample(r);
        trace.t.push_back(t);
        trace.r.push_back(r);
        trace.y.push_back(s.y);
        trace.u.push_back(s.u);
        if (!std::isfinite(s.y) || !std::isfinite(s.u) || std::abs(s.y) > cfg.divergence_limit ||
            std::abs(s.u) > cfg.divergence_limit) {
            trace.diverged = true;
            break;
        }
        if (k < nsteps) stepper.step(rv);
    }
    return trace;
}

/// Spec-level entry point on rational transfer functions.
inline SimulationTrace simulate_loop(const RationalTf& plant, const RationalTf& controller,
                                     const SetpointSchedule& setpoint, const SimConfig& cfg) {
    if (controller.delay_s != 0.0) throw std::invalid_argument("simulate_loop: controller dead time unsupported");
    RationalTf plant_core(plant.num, plant.den, 0.0);
    return simulate_loop(LinearSystem::from_tf(plant_core), plant.delay_s, LinearSystem::from_tf(controller),
                         setpoint, cfg);
}

/// Open-loop unit step response (the set-point drives the plant directly).
inline SimulationTrace step_response(const RationalTf& plant, const SimConfig& cfg) {
    RationalTf plant_core(plant.num, plant.den, 0.0);
    LinearSystem unity;
    unity.direct = 1.0;
    return simulate_loop(LinearSystem::from_tf(plant_core), plant.delay_s, unity, SetpointSchedule::unit_step(), cfg,
                         /*feedback=*/false);
}

/// Rectangle-rule discretization of J = integral of w1*t*|e| + w2*u^2.
/// Diverged traces score the divergence penalty plus a remaining-time term so
/// earlier blow-ups rank strictly worse.
inline double evaluate_cost(const SimulationTrace& trace, const CostWeights& w) {
    w.validate();
    if (trace.size() == 0) throw std::invalid_argument("evaluate_cost: empty trace");
    if (trace.diverged) {
        const double t_end = trace.t.back();
        return 1e9 * (1.0 + std::max(0.0, trace.horizon_t - t_end) / trace.horizon_t);
    }
    double j = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double e = trace.r[k] - trace.y[k];
        j += w.w1_itae * trace.t[k] * std::abs(e) + w.w2_isco * trace.u[k] * trace.u[k];
    }
    return j * trace.step_h;
}

inline void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline std::string trace_to_csv(const SimulationTrace& trace) {
    std::string out = "t,r,y,u\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        append_double(out, trace.t[k]);
        out.push_back(',');
        append_double(out, trace.r[k]);
        out.push_back(',');
        append_double(out, trace.y[k]);
        out.push_back(',');
        append_double(out, trace.u[k]);
        out.push_back('\n');
    }
    return out;
}

}  // namespace fopid

#endif  // FOPID_SIMULATION_HPP
