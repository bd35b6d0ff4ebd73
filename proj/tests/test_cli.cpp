#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fopid/fopid.hpp"

// FOPID_CLI_PATH is injected by the build as the absolute path of the
// compiled command-line tool.
#ifndef FOPID_CLI_PATH
#error "FOPID_CLI_PATH must be defined"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FOPID_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "fopid_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

/// Small budgets so the whole pipeline stays unit-test sized; full budgets are
/// exercised by the acceptance suite.
fs::path config_path() {
    static const fs::path p = [] {
        const fs::path file = work_dir() / "config.json";
        std::ofstream out(file);
        out << json{{"ga", {{"generations", 5}, {"population", 10}}},
                    {"sim", {{"step_h", 0.05}, {"horizon_t", 50.0}}},
                    {"reduction", {{"max_evaluations", 800}}}}
                   .dump();
        return file;
    }();
    return p;
}

}  // namespace

TEST_CASE("argument errors exit with code 2") {
    CHECK(run_cli("") == 2);                                     // missing subcommand
    CHECK(run_cli("reduce") == 2);                               // missing --out
    CHECK(run_cli("reduce --family P9 --param 1 --out /tmp") == 2);  // unknown family
    CHECK(run_cli("tune --models /nonexistent --out /tmp") == 2);
    CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("reduce writes the model file contract and reruns byte-identically") {
    const fs::path out_a = work_dir() / "models_a";
    const fs::path out_b = work_dir() / "models_b";
    const std::string base = "--config " + config_path().string() + " --seed 7 reduce --family P1 --param 3 --out ";
    REQUIRE(run_cli(base + out_a.string()) == 0);
    REQUIRE(run_cli(base + out_b.string()) == 0);

    const fs::path file = out_a / "P1_3.soptd.json";
    REQUIRE(fs::exists(file));
    const auto model = fopid::soptd_from_json(read_json(file));
    CHECK(model.K == 1.0);
    CHECK(model.tau1 >= model.tau2);

    CHECK(slurp(file) == slurp(out_b / "P1_3.soptd.json"));

    // a different master seed may land elsewhere, but still satisfies the contract
    REQUIRE(run_cli("--config " + config_path().string() + " --seed 8 reduce --family P1 --param 3 --out " +
                    (work_dir() / "models_c").string()) == 0);
    CHECK(fopid::soptd_from_json(read_json(work_dir() / "models_c" / "P1_3.soptd.json")).K == 1.0);
}

TEST_CASE("tune -> train -> sweep pipeline file contracts") {
    const fs::path models = work_dir() / "models";
    const fs::path records = work_dir() / "records";
    const fs::path nets = work_dir() / "nets";
    const std::string cfg = "--config " + config_path().string() + " --seed 7 ";

    REQUIRE(run_cli(cfg + "reduce --family P1 --param 3 --out " + models.string()) == 0);
    REQUIRE(run_cli(cfg + "reduce --family P1 --param 4 --out " + models.string()) == 0);

    REQUIRE(run_cli(cfg + "tune --models " + models.string() + " --controller both --out " + records.string()) == 0);
    for (const std::string id : {"P1_3", "P1_4"}) {
        const auto pid = fopid::tuning_record_from_json(read_json(records / (id + ".pid.json")));
        const auto fo = fopid::tuning_record_from_json(read_json(records / (id + ".fopid.json")));
        CHECK(pid.controller_type == "pid");
        CHECK(fo.controller_type == "fopid");
        CHECK_NOTHROW(fopid::pid_from_json(pid.params));
        CHECK_NOTHROW(fopid::fopid_from_json(fo.params));
        // warm start guarantees the fractional arm never loses to the PID
        CHECK(fo.cost <= pid.cost + 1e-12);
        CHECK(fo.ga_meta.at("warm_start") == true);
    }

    // tuning reruns are byte-identical too
    const fs::path records2 = work_dir() / "records2";
    REQUIRE(run_cli(cfg + "tune --models " + models.string() + " --controller pid --out " + records2.string()) == 0);
    CHECK(slurp(records / "P1_3.pid.json") == slurp(records2 / "P1_3.pid.json"));

    REQUIRE(run_cli(cfg + "train --records " + records.string() + " --out " + nets.string()) == 0);
    for (const std::string name : {"P1.pid", "P1.fopid"}) {
        const auto net = fopid::rbf_from_json(read_json(nets / (name + ".net.json")));
        CHECK(net.centers.size() == 2);
        CHECK(net.input_dim() == 4);
    }
    const auto report = read_json(nets / "mse_report.json");
    CHECK(report.at("P1.pid").at("rows") == 2);
    CHECK(report.at("P1.pid").at("training_mse").get<double>() <= 1e-6);

    const fs::path sweep_csv = work_dir() / "sweep.csv";
    REQUIRE(run_cli(cfg + "sweep --nets " + nets.string() + " --family P1 --controller pid --points 5 --out " +
                    sweep_csv.string()) == 0);
    const auto csv = slurp(sweep_csv);
    CHECK(csv.rfind("param,K,L,tau1,tau2,kp,ki,kd\n", 0) == 0);
    // P1's sweep covers its discrete parameter set: 8 rows plus the header
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 9);
}

TEST_CASE("train with fewer than two records per family is an error") {
    const fs::path models = work_dir() / "single_model";
    const fs::path records = work_dir() / "single_record";
    const std::string cfg = "--config " + config_path().string() + " --seed 7 ";
    REQUIRE(run_cli(cfg + "reduce --family P2 --param 0.5 --out " + models.string()) == 0);
    REQUIRE(run_cli(cfg + "tune --models " + models.string() + " --controller pid --out " + records.string()) == 0);
    CHECK(run_cli(cfg + "train --records " + records.string() + " --out " + (work_dir() / "no_nets").string()) == 3);
}

TEST_CASE("schedule refuses to run without networks for the drawn families") {
    // only P1 networks exist at this point, while the generated scenario draws
    // from all four families
    CHECK(run_cli("--config " + config_path().string() + " --seed 7 schedule --nets " +
                  (work_dir() / "nets").string() + " --models " + (work_dir() / "models").string() + " --out " +
                  (work_dir() / "sched").string()) == 2);
}
