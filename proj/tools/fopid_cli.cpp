// Command-line pipeline: reduce -> tune -> train -> schedule / sweep.
// Every stage is a pure function of its declared inputs plus explicit seeds,
// so re-running a stage with the same arguments reproduces its outputs
// byte for byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fopid/fopid.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path.string());
    out << content;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open: " + path.string());
    return json::parse(in);
}

struct PipelineOptions {
    std::uint64_t seed = 0;
    fopid::ReductionConfig reduction;
    fopid::GaConfig ga;
    fopid::CostWeights weights;
    fopid::BandApproxConfig band;
    std::optional<double> step_h;
    std::optional<double> horizon_t;

    fopid::SimConfig sim_for(const fopid::SoptdModel& m) const {
        fopid::SimConfig sim = fopid::default_sim_config(m.time_scale());
        if (horizon_t) sim.horizon_t = *horizon_t;
        if (step_h) sim.step_h = *step_h;
        sim.band = band;
        return sim;
    }
};

void apply_config_file(PipelineOptions& opt, const fs::path& path) {
    const json cfg = read_json(path);
    if (cfg.contains("seed")) opt.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("band")) opt.band = fopid::band_cfg_from_json(cfg["band"]);
    if (cfg.contains("sim")) {
        const auto& s = cfg["sim"];
        if (s.contains("step_h")) opt.step_h = s["step_h"].get<double>();
        if (s.contains("horizon_t")) opt.horizon_t = s["horizon_t"].get<double>();
    }
    if (cfg.contains("ga")) {
        const auto& g = cfg["ga"];
        if (g.contains("population")) opt.ga.population = g["population"].get<std::size_t>();
        if (g.contains("generations")) opt.ga.generations = g["generations"].get<std::size_t>();
        if (g.contains("crossover_frac")) opt.ga.crossover_frac = g["crossover_frac"].get<double>();
        if (g.contains("mutation_frac")) opt.ga.mutation_frac = g["mutation_frac"].get<double>();
    }
    if (cfg.contains("reduction")) {
        const auto& r = cfg["reduction"];
        if (r.contains("max_evaluations")) opt.reduction.max_evaluations = r["max_evaluations"].get<std::size_t>();
    }
}

std::vector<fopid::ProcessSpec> resolve_specs(bool all, const std::string& family, double param) {
    if (all) return fopid::all_benchmark_specs();
    if (family.empty()) throw std::invalid_argument("need --family/--param or --all");
    return {fopid::ProcessSpec{fopid::family_from_name(family), param}};
}

// ---- reduce ---------------------------------------------------------------

int cmd_reduce(const PipelineOptions& opt, bool all, const std::string& family, double param, const fs::path& out) {
    for (const auto& spec : resolve_specs(all, family, param)) {
        fopid::ReductionConfig cfg = opt.reduction;
        cfg.seed = fopid::derive_seed(opt.seed, spec.id() + ".reduce");
        const auto result = fopid::reduce_to_soptd(fopid::build_process(spec), cfg);
        const fs::path file = out / (spec.id() + ".soptd.json");
        write_file(file, fopid::to_json(result.model).dump(2) + "\n");
        std::cout << spec.id() << " -> " << file.string() << "  cost=" << result.final_cost << "\n";
    }
    return 0;
}

// ---- tune -----------------------------------------------------------------

std::map<std::string, fopid::SoptdModel> load_models(const fs::path& dir) {
    std::map<std::string, fopid::SoptdModel> models;
    if (!fs::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".soptd.json";
        if (name.size() <= suffix.size() || name.substr(name.size() - suffix.size()) != suffix) continue;
        models[name.substr(0, name.size() - suffix.size())] = fopid::soptd_from_json(read_json(entry.path()));
    }
    if (models.empty()) throw std::invalid_argument("no *.soptd.json files in " + dir.string());
    return models;
}

fopid::ProcessSpec spec_from_id(const std::string& id) {
    const auto us = id.find('_');
    if (us == std::string::npos) throw std::invalid_argument("bad model id: " + id);
    return fopid::ProcessSpec{fopid::family_from_name(id.substr(0, us)), std::stod(id.substr(us + 1))};
}

int cmd_tune(const PipelineOptions& opt, const fs::path& models_dir, const std::string& controller,
             const fs::path& out) {
    if (controller != "pid" && controller != "fopid" && controller != "both")
        throw std::invalid_argument("--controller must be pid, fopid or both");
    const auto models = load_models(models_dir);
    for (const auto& [id, soptd] : models) {
        const fopid::ProcessSpec spec = spec_from_id(id);
        const fopid::RationalTf plant = fopid::soptd_to_tf(soptd);
        const fopid::SimConfig sim = opt.sim_for(soptd);
        std::optional<fopid::PidParams> pid_params;

        if (controller != "fopid") {
            fopid::GaConfig ga = opt.ga;
            ga.seed = fopid::derive_seed(opt.seed, id + ".pid");
            const auto res = fopid::tune_pid(plant, sim, opt.weights, ga);
            pid_params = res.params;
            fopid::TuningRecord rec{spec,
                                    soptd,
                                    "pid",
                                    fopid::to_json(res.params),
                                    res.ga.best_cost,
                                    ga.seed,
                                    json{{"population", ga.population},
                                         {"generations", ga.generations},
                                         {"evaluations", res.ga.evaluations},
                                         {"crossover_frac", ga.crossover_frac},
                                         {"mutation_frac", ga.mutation_frac},
                                         {"band", fopid::to_json(sim.band)},
                                         {"step_h", sim.step_h},
                                         {"horizon_t", sim.horizon_t}}};
            write_file(out / (id + ".pid.json"), fopid::to_json(rec).dump(2) + "\n");
            std::cout << id << " pid cost=" << res.ga.best_cost << "\n";
        }
        if (controller != "pid") {
            fopid::GaConfig ga = opt.ga;
            ga.seed = fopid::derive_seed(opt.seed, id + ".fopid");
            const auto res = fopid::tune_fopid(plant, sim, opt.weights, ga, pid_params);
            fopid::TuningRecord rec{spec,
                                    soptd,
                                    "fopid",
                                    fopid::to_json(res.params),
                                    res.ga.best_cost,
                                    ga.seed,
                                    json{{"population", ga.population},
                                         {"generations", ga.generations},
                                         {"evaluations", res.ga.evaluations},
                                         {"crossover_frac", ga.crossover_frac},
                                         {"mutation_frac", ga.mutation_frac},
                                         {"warm_start", pid_params.has_value()},
                                         {"band", fopid::to_json(sim.band)},
                                         {"step_h", sim.step_h},
                                         {"horizon_t", sim.horizon_t}}};
            write_file(out / (id + ".fopid.json"), fopid::to_json(rec).dump(2) + "\n");
            std::cout << id << " fopid cost=" << res.ga.best_cost << "\n";
        }
    }
    return 0;
}

// ---- train ----------------------------------------------------------------

std::vector<fopid::TuningRecord> load_records(const fs::path& dir, const std::string& type_suffix) {
    std::vector<fopid::TuningRecord> records;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() <= type_suffix.size() || name.substr(name.size() - type_suffix.size()) != type_suffix)
            continue;
        records.push_back(fopid::tuning_record_from_json(read_json(entry.path())));
    }
    return records;
}

int cmd_train(const fs::path& records_dir, const fs::path& out) {
    if (!fs::is_directory(records_dir)) throw std::invalid_argument("not a directory: " + records_dir.string());
    json mse_report = json::object();
    int trained = 0;
    for (const std::string type : {"pid", "fopid"}) {
        const auto records = load_records(records_dir, "." + type + ".json");
        for (fopid::Family fam : {fopid::Family::P1, fopid::Family::P2, fopid::Family::P3, fopid::Family::P4}) {
            std::vector<fopid::TuningRecord> fam_records;
            for (const auto& rec : records)
                if (rec.plant_spec.family == fam) fam_records.push_back(rec);
            if (fam_records.empty()) continue;
            if (fam_records.size() < 2)
                throw std::runtime_error("train: fewer than 2 records for " + fopid::family_name(fam));
            const auto data = fopid::dataset_from_records(fam_records);
            const auto net = fopid::rbf_train(data);
            const std::string name = fopid::family_name(fam) + "." + type;
            write_file(out / (name + ".net.json"), fopid::to_json(net).dump(2) + "\n");
            mse_report[name] = json{{"training_mse", net.training_mse},
                                    {"training_mse_normalized", fopid::rbf_mse_normalized(net, data)},
                                    {"rows", data.inputs.size()}};
            std::cout << name << " mse=" << net.training_mse << "\n";
            ++trained;
        }
    }
    if (trained == 0) throw std::invalid_argument("train: no tuning records found in " + records_dir.string());
    write_file(out / "mse_report.json", mse_report.dump(2) + "\n");
    return 0;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const PipelineOptions& opt, const fs::path& nets_dir, const std::string& family,
              const std::string& controller, std::size_t points, const fs::path& out) {
    const fopid::Family fam = fopid::family_from_name(family);
    const auto net = fopid::rbf_from_json(read_json(nets_dir / (family + "." + controller + ".net.json")));
    const auto& set = fopid::family_param_set(fam);

    std::vector<double> sweep;
    if (fam == fopid::Family::P1) {
        // integer-only exponent; the dense sweep degenerates to the discrete set
        sweep = set;
    } else {
        const double lo = set.front(), hi = set.back();
        for (std::size_t i = 0; i < points; ++i)
            sweep.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    }

    std::string csv = "param,K,L,tau1,tau2";
    for (const auto& name : fopid::controller_output_names(controller)) csv += "," + name;
    csv += "\n";
    for (double p : sweep) {
        const fopid::ProcessSpec spec{fam, p};
        fopid::ReductionConfig cfg = opt.reduction;
        cfg.seed = fopid::derive_seed(opt.seed, spec.id() + ".reduce");
        const auto red = fopid::reduce_to_soptd(fopid::build_process(spec), cfg);
        const auto pred = fopid::rbf_predict(net, {red.model.K, red.model.L, red.model.tau1, red.model.tau2});
        fopid::append_double(csv, p);
        for (double v : {red.model.K, red.model.L, red.model.tau1, red.model.tau2}) {
            csv.push_back(',');
            fopid::append_double(csv, v);
        }
        for (double v : pred) {
            csv.push_back(',');
            fopid::append_double(csv, v);
        }
        csv.push_back('\n');
    }
    write_file(out, csv);
    std::cout << "wrote " << out.string() << " (" << sweep.size() << " rows)\n";
    return 0;
}

// ---- schedule -------------------------------------------------------------

fopid::NetworkSet load_networks(const fs::path& dir, const std::string& type) {
    fopid::NetworkSet nets;
    for (const std::string fam : {"P1", "P2", "P3", "P4"}) {
        const fs::path file = dir / (fam + "." + type + ".net.json");
        if (fs::exists(file)) nets[fam] = fopid::rbf_from_json(read_json(file));
    }
    if (nets.empty()) throw std::invalid_argument("no " + type + " networks in " + dir.string());
    return nets;
}

int cmd_schedule(const PipelineOptions& opt, const fs::path& nets_dir, const fs::path& models_dir,
                 std::size_t events, double dwell_min, double dwell_max, double sp_min, double sp_max,
                 const fs::path& out) {
    fopid::ScenarioConfig scen_cfg;
    scen_cfg.event_count = events;
    scen_cfg.dwell_min = dwell_min;
    scen_cfg.dwell_max = dwell_max;
    scen_cfg.setpoint_min = sp_min;
    scen_cfg.setpoint_max = sp_max;
    scen_cfg.seed = opt.seed;
    const auto scenario = fopid::generate_scenario(scen_cfg);
    write_file(out / "scenario.json", fopid::to_json(scenario).dump(2) + "\n");

    fopid::SoptdLookup lookup;
    for (const auto& [id, m] : load_models(models_dir)) lookup[id] = m;

    fopid::SimConfig sim;
    sim.horizon_t = scenario.horizon_s;
    if (opt.step_h) {
        sim.step_h = *opt.step_h;
    } else {
        // fixed-step RK4 must resolve the fastest lag among the scheduled plants
        sim.step_h = scenario.horizon_s / 10000.0;
        for (const auto& ev : scenario.events)
            sim.step_h = std::min(sim.step_h, fopid::smallest_time_constant(ev.process) / 5.0);
    }
    sim.band = opt.band;

    std::vector<double> event_times;
    for (const auto& ev : scenario.events) event_times.push_back(ev.time_s);
    const double window = std::min(10.0, dwell_min);

    json summary = json::object();
    for (const std::string type : {"pid", "fopid"}) {
        const auto nets = load_networks(nets_dir, type);
        const auto run = fopid::run_scheduled_loop(scenario, nets, type, lookup, sim);
        const auto report = fopid::transient_metrics(run.trace, event_times, window);
        write_file(out / ("trace_" + type + ".csv"), fopid::scheduled_trace_to_csv(run));
        write_file(out / ("transients_" + type + ".json"), fopid::to_json(report).dump(2) + "\n");
        double mean_e = 0.0, mean_u = 0.0;
        for (const auto& tr : report.events) {
            mean_e += tr.peak_e;
            mean_u += tr.peak_u;
        }
        mean_e /= static_cast<double>(report.events.size());
        mean_u /= static_cast<double>(report.events.size());
        summary[type] = json{{"mean_peak_e", mean_e},
                             {"mean_peak_u", mean_u},
                             {"bounded", report.bounded},
                             {"diverged", run.trace.diverged}};
        std::cout << type << ": mean peak |e|=" << mean_e << " mean peak |u|=" << mean_u
                  << (report.bounded ? "" : "  DIVERGED") << "\n";
    }
    write_file(out / "summary.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal PID/FOPID tuning with RBF-network gain and order scheduling"};
    app.require_subcommand(1);

    PipelineOptions opt;
    std::string config_file;
    app.add_option("--config", config_file, "JSON file with pipeline overrides")->check(CLI::ExistingFile);
    app.add_option("--seed", opt.seed, "master seed (per-job seeds are derived from it)");

    bool all = false;
    std::string family;
    double param = 0.0;
    std::string out_dir = ".";
    std::string controller = "both";
    std::string models_dir, records_dir, nets_dir;

    auto* reduce = app.add_subcommand("reduce", "reduce benchmark processes to SOPTD models");
    reduce->add_flag("--all", all, "reduce every benchmark process");
    reduce->add_option("--family", family, "process family (P1..P4)");
    reduce->add_option("--param", param, "family parameter (n, alpha or T)");
    reduce->add_option("--out", out_dir, "output directory")->required();

    auto* tune = app.add_subcommand("tune", "GA-tune controllers for reduced models");
    tune->add_option("--models", models_dir, "directory of *.soptd.json files")->required();
    tune->add_option("--controller", controller, "pid | fopid | both");
    tune->add_option("--out", out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train", "train RBF networks from tuning records");
    train->add_option("--records", records_dir, "directory of tuning records")->required();
    train->add_option("--out", out_dir, "output directory")->required();

    std::size_t sweep_points = 101;
    std::string sweep_out = "sweep.csv";
    auto* sweep = app.add_subcommand("sweep", "dense parameter sweep through a trained network");
    sweep->add_option("--nets", nets_dir, "directory of network files")->required();
    sweep->add_option("--family", family, "process family (P1..P4)")->required();
    sweep->add_option("--controller", controller, "pid | fopid")->required();
    sweep->add_option("--points", sweep_points, "sweep resolution");
    sweep->add_option("--out", sweep_out, "output CSV path")->required();

    std::size_t events = 10;
    double dwell_min = 20.0, dwell_max = 40.0, sp_min = 0.5, sp_max = 2.0;
    auto* schedule = app.add_subcommand("schedule", "run the switched-process scheduling experiment");
    schedule->add_option("--nets", nets_dir, "directory of network files")->required();
    schedule->add_option("--models", models_dir, "directory of *.soptd.json files")->required();
    schedule->add_option("--events", events, "number of switch events");
    schedule->add_option("--dwell-min", dwell_min, "minimum dwell time (s)");
    schedule->add_option("--dwell-max", dwell_max, "maximum dwell time (s)");
    schedule->add_option("--setpoint-min", sp_min, "set-point range lower edge");
    schedule->add_option("--setpoint-max", sp_max, "set-point range upper edge");
    schedule->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (!config_file.empty()) apply_config_file(opt, config_file);
        if (reduce->parsed()) return cmd_reduce(opt, all, family, param, out_dir);
        if (tune->parsed()) return cmd_tune(opt, models_dir, controller, out_dir);
        if (train->parsed()) return cmd_train(records_dir, out_dir);
        if (sweep->parsed()) return cmd_sweep(opt, nets_dir, family, controller, sweep_points, sweep_out);
        if (schedule->parsed())
            return cmd_schedule(opt, nets_dir, models_dir, events, dwell_min, dwell_max, sp_min, sp_max, out_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return 0;
}
