#ifndef FOPID_SCHEDULER_HPP
#define FOPID_SCHEDULER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fopid/process_models.hpp"
#include "fopid/rbf.hpp"
#include "fopid/simulation.hpp"

namespace fopid {

struct SwitchEvent {
    double time_s = 0.0;
    ProcessSpec process;
    double setpoint = 1.0;
};

struct ScheduleScenario {
    std::vector<SwitchEvent> events;
    double horizon_s = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (events.empty()) throw std::invalid_argument("ScheduleScenario: no events");
        if (events.front().time_s != 0.0) throw std::invalid_argument("ScheduleScenario: first event must be at t=0");
        for (std::size_t i = 1; i < events.size(); ++i)
            if (!(events[i].time_s > events[i - 1].time_s))
                throw std::invalid_argument("ScheduleScenario: event times must be strictly increasing");
        if (!(horizon_s > events.back().time_s))
            throw std::invalid_argument("ScheduleScenario: horizon must extend past the last event");
    }
};

struct ScenarioConfig {
    std::vector<Family> families{Family::P1, Family::P2, Family::P3, Family::P4};
    double setpoint_min = 0.5, setpoint_max = 2.0;
    double dwell_min = 20.0, dwell_max = 40.0;
    std::size_t event_count = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (families.empty()) throw std::invalid_argument("ScenarioConfig: no families");
        if (!(dwell_min > 0.0 && dwell_min <= dwell_max)) throw std::invalid_argument("ScenarioConfig: bad dwell range");
        if (!(setpoint_min <= setpoint_max)) throw std::invalid_argument("ScenarioConfig: bad setpoint range");
        if (event_count < 1) throw std::invalid_argument("ScenarioConfig: need at least one event");
    }
};

/// Random switching scenario: processes drawn uniformly from the benchmark
/// discrete parameter sets, set-points and dwell times uniform in range.
inline ScheduleScenario generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    for (Family f : cfg.families)
        if (family_param_set(f).empty()) throw std::invalid_argument("generate_scenario: empty parameter set");
    Rng rng(cfg.seed);
    ScheduleScenario scen;
    scen.seed = cfg.seed;
    double t = 0.0;
    for (std::size_t k = 0; k < cfg.event_count; ++k) {
        SwitchEvent ev;
        ev.time_s = t;
        const Family fam = cfg.families[rng.index(cfg.families.size())];
        const auto& params = family_param_set(fam);
        ev.process = ProcessSpec{fam, params[rng.index(params.size())]};
        ev.setpoint = rng.uniform(cfg.setpoint_min, cfg.setpoint_max);
        scen.events.push_back(ev);
        t += rng.uniform(cfg.dwell_min, cfg.dwell_max);
    }
    scen.horizon_s = t;  // one full dwell beyond the last event
    scen.validate();
    return scen;
}

struct EventTransient {
    double time_s = 0.0;
    double peak_e = 0.0;
    double peak_u = 0.0;
    double settling_s = std::numeric_limits<double>::quiet_NaN();
    bool settled = false;
    bool window_truncated = false;
};

struct TransientReport {
    std::vector<EventTransient> events;
    bool bounded = true;
};

/// SimulationTrace plus the per-sample scheduling columns.
struct ScheduledTrace {
    SimulationTrace trace;
    std::vector<std::string> active_family;
    std::vector<double> active_param;
    std::vector<int> event_flag;  // 1 at samples where a switch was applied
};

using NetworkSet = std::map<std::string, RbfNetwork>;       // family name -> net
using SoptdLookup = std::map<std::string, SoptdModel>;      // ProcessSpec id -> reduced model

namespace detail {

inline LinearSystem scheduled_controller(const std::string& controller_type, const RbfNetwork& net,
                                         const SoptdModel& soptd, const SimConfig& sim) {
    const std::vector<double> pred = rbf_predict(net, {soptd.K, soptd.L, soptd.tau1, soptd.tau2});
    // Interpolated predictions can leave the admissible box by a hair; clamp.
    auto gain = [](double v) { return std::clamp(v, 0.0, kGainMax); };
    auto order = [](double v) { return std::clamp(v, kOrderMin, kOrderMax); };
    if (controller_type == "pid") {
        return controller_blocks(PidParams{gain(pred[0]), gain(pred[1]), gain(pred[2])}, sim.deriv_tf());
    }
    if (controller_type == "fopid") {
        return controller_blocks(FopidParams{gain(pred[0]), gain(pred[1]), gain(pred[2]), order(pred[3]),
                                             order(pred[4])},
                                 sim.band, sim.deriv_tf(), /*force_fractional=*/true);
    }
    throw std::invalid_argument("unknown controller type '" + controller_type + "'");
}

}  // namespace detail

/// Capture of the loop state around each switch, for consistency checks.
struct SegmentCapture {
    double time_s = 0.0;
    std::vector<double> ctrl_state_before;
    std::vector<double> ctrl_state_after;
    std::vector<double> plant_state;
};

/// Runs the supervisor loop of the scheduling experiment: at every switch the
/// active plant is swapped (state re-initialized to keep the output
/// continuous), the family network is queried with the event's reduced-model
/// parameters, and the controller realization is rebuilt with its internal
/// state carried over unchanged.
inline ScheduledTrace run_scheduled_loop(const ScheduleScenario& scenario, const NetworkSet& networks,
                                         const std::string& controller_type, const SoptdLookup& soptd_lookup,
                                         const SimConfig& cfg, std::vector<SegmentCapture>* captures = nullptr) {
    scenario.validate();
    cfg.validate();
    for (const auto& ev : scenario.events) {
        if (!networks.count(family_name(ev.process.family)))
            throw std::invalid_argument("run_scheduled_loop: missing network for " + family_name(ev.process.family));
        if (!soptd_lookup.count(ev.process.id()))
            throw std::invalid_argument("run_scheduled_loop: missing reduced model for " + ev.process.id());
    }

    SimConfig sim = cfg;
    sim.horizon_t = scenario.horizon_s;

    const auto& first = scenario.events.front();
    LinearSystem ctrl = detail::scheduled_controller(
        controller_type, networks.at(family_name(first.process.family)), soptd_lookup.at(first.process.id()), sim);
    RationalTf plant_tf = build_process(first.process);
    ClosedLoopStepper stepper(ctrl, LinearSystem::from_tf(plant_tf), plant_tf.delay_s, sim);

    const auto nsteps = static_cast<std::size_t>(std::llround(sim.horizon_t / sim.step_h));
    ScheduledTrace out;
    out.trace.step_h = sim.step_h;
    out.trace.horizon_t = sim.horizon_t;

    std::size_t next_event = 1;  // event 0 is applied at construction
    std::string cur_family = family_name(first.process.family);
    double cur_param = first.process.param;
    double cur_setpoint = first.setpoint;
    auto rv = [&](double) { return cur_setpoint; };

    for (std::size_t k = 0; k <= nsteps; ++k) {
        const double t = static_cast<double>(k) * sim.step_h;
        int flag = k == 0 ? 1 : 0;
        if (next_event < scenario.events.size() && t >= scenario.events[next_event].time_s) {
            const auto& ev = scenario.events[next_event];
            SegmentCapture cap;
            cap.time_s = t;
            cap.ctrl_state_before = stepper.controller_state();
            RationalTf new_plant = build_process(ev.process);
            stepper.swap_plant(LinearSystem::from_tf(new_plant), new_plant.delay_s);
            stepper.swap_controller(detail::scheduled_controller(
                controller_type, networks.at(family_name(ev.process.family)), soptd_lookup.at(ev.process.id()), sim));
            cap.ctrl_state_after = stepper.controller_state();
            cap.plant_state = stepper.plant_state();
            if (captures) captures->push_back(std::move(cap));
            cur_family = family_name(ev.process.family);
            cur_param = ev.process.param;
            cur_setpoint = ev.setpoint;
            ++next_event;
            flag = 1;
        }
        const auto s = stepper.sample(cur_setpoint);
        out.trace.t.push_back(t);
        out.trace.r.push_back(cur_setpoint);
        out.trace.y.push_back(s.y);
        out.trace.u.push_back(s.u);
        out.active_family.push_back(cur_family);
        out.active_param.push_back(cur_param);
        out.event_flag.push_back(flag);
        if (!std::isfinite(s.y) || !std::isfinite(s.u) || std::abs(s.y) > sim.divergence_limit ||
            std::abs(s.u) > sim.divergence_limit) {
            out.trace.diverged = true;
            break;
        }
        if (k < nsteps) stepper.step(rv);
    }
    return out;
}

/// Per-event peaks of |e| and |u| inside [t_event, t_event + window] and the
/// 2%-band settling time within the segment.
inline TransientReport transient_metrics(const SimulationTrace& trace, const std::vector<double>& event_times,
                                         double window_s) {
    if (!(window_s > 0.0)) throw std::invalid_argument("transient_metrics: window must be positive");
    if (trace.size() == 0) throw std::invalid_argument("transient_metrics: empty trace");
    TransientReport report;
    report.bounded = !trace.diverged;
    const double t_end = trace.t.back();
    for (std::size_t ev = 0; ev < event_times.size(); ++ev) {
        const double t0 = event_times[ev];
        const double t_seg_end = ev + 1 < event_times.size() ? event_times[ev + 1] : t_end;
        EventTransient tr;
        tr.time_s = t0;
        tr.window_truncated = t0 + window_s > t_end;
        const double t_win_end = std::min(t0 + window_s, t_end);

        // Set-point change magnitude at the event: r just after minus r (or 0
        // at the initial event) just before.
        double r_after = 0.0, r_before = 0.0, e_at = 0.0;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            if (trace.t[k] >= t0) {
                r_after = trace.r[k];
                e_at = trace.r[k] - trace.y[k];
                r_before = k > 0 ? trace.r[k - 1] : 0.0;
                break;
            }
        }
        if (t0 == trace.t.front()) r_before = 0.0;
        const double delta_r = r_after - r_before;
        (void)e_at;

        double last_violation = -1.0;
        const double band = 0.02 * std::abs(delta_r);
        for (std::size_t k = 0; k < trace.size(); ++k) {
            const double t = trace.t[k];
            if (t < t0) continue;
            const double e = trace.r[k] - trace.y[k];
            if (t <= t_win_end) {
                tr.peak_e = std::max(tr.peak_e, std::abs(e));
                tr.peak_u = std::max(tr.peak_u, std::abs(trace.u[k]));
            }
            if (t < t_seg_end && band > 0.0 && std::abs(e) > band) last_violation = t;
            if (t >= t_seg_end && t > t_win_end) break;
        }
        if (band == 0.0) {
            tr.settled = true;
            tr.settling_s = 0.0;
        } else if (last_violation < t_seg_end - trace.step_h) {
            tr.settled = true;
            tr.settling_s = std::max(0.0, last_violation + trace.step_h - t0);
        }
        report.events.push_back(tr);
    }
    return report;
}

inline nlohmann::json to_json(const SwitchEvent& ev) {
    return nlohmann::json{{"time_s", ev.time_s}, {"process", to_json(ev.process)}, {"setpoint", ev.setpoint}};
}

inline nlohmann::json to_json(const ScheduleScenario& scen) {
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& ev : scen.events) evs.push_back(to_json(ev));
    return nlohmann::json{{"events", evs}, {"horizon_s", scen.horizon_s}, {"seed", scen.seed}};
}

inline ScheduleScenario scenario_from_json(const nlohmann::json& j) {
    ScheduleScenario scen;
    scen.horizon_s = j.at("horizon_s").get<double>();
    scen.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("events")) {
        SwitchEvent ev;
        ev.time_s = e.at("time_s").get<double>();
        ev.process = process_spec_from_json(e.at("process"));
        ev.setpoint = e.at("setpoint").get<double>();
        scen.events.push_back(ev);
    }
    scen.validate();
    return scen;
}

inline nlohmann::json to_json(const TransientReport& report) {
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& tr : report.events) {
        nlohmann::json e{{"time_s", tr.time_s}, {"peak_e", tr.peak_e},    {"peak_u", tr.peak_u},
                         {"settled", tr.settled}, {"window_truncated", tr.window_truncated}};
        if (tr.settled) e["settling_s"] = tr.settling_s;
        evs.push_back(e);
    }
    return nlohmann::json{{"events", evs}, {"bounded", report.bounded}};
}

inline std::string scheduled_trace_to_csv(const ScheduledTrace& st) {
    std::string out = "t,r,y,u,active_family,active_param,event\n";
    for (std::size_t k = 0; k < st.trace.size(); ++k) {
        append_double(out, st.trace.t[k]);
        out.push_back(',');
        append_double(out, st.trace.r[k]);
        out.push_back(',');
        append_double(out, st.trace.y[k]);
        out.push_back(',');
        append_double(out, st.trace.u[k]);
        out.push_back(',');
        out += st.active_family[k];
        out.push_back(',');
        append_double(out, st.active_param[k]);
        out.push_back(',');
        out += std::to_string(st.event_flag[k]);
        out.push_back('\n');
    }
    return out;
}

}  // namespace fopid

#endif  // FOPID_SCHEDULER_HPP
