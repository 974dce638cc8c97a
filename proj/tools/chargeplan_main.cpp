#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chargeplan/core/instance_io.hpp"
#include "chargeplan/core/parallel.hpp"
#include "chargeplan/gen/generator.hpp"
#include "chargeplan/robust/framework.hpp"
#include "chargeplan/robust/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chargeplan;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitPreconditionInfeasible = 3;
constexpr int kExitTimeLimit = 4;
constexpr int kExitValidationFailed = 5;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json file_entry(const std::string& path) {
    const std::string bytes = read_text_file(path);
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  (unsigned long long)robust::fnv64_bytes(bytes));
    return {{"path", path}, {"fnv64", hash}};
}

struct ManifestBuilder {
    json doc;
    std::string started = iso_timestamp();

    ManifestBuilder(const std::string& command, int argc, char** argv, uint64_t seed, int jobs) {
        doc["format"] = "chargeplan-manifest";
        doc["version"] = 1;
        doc["command"] = command;
        json args = json::array();
        for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
        doc["argv"] = std::move(args);
        doc["run_seed"] = seed;
        doc["jobs"] = jobs;
        doc["inputs"] = json::array();
        doc["outputs"] = json::array();
    }
    void input(const std::string& path) { doc["inputs"].push_back(file_entry(path)); }
    void output(const std::string& path) { doc["outputs"].push_back(file_entry(path)); }
    void write(const std::string& path, const std::vector<std::pair<std::string, double>>& times) {
        doc["started_at"] = started;
        doc["finished_at"] = iso_timestamp();
        json jt = json::object();
        for (const auto& [phase, seconds] : times) jt[phase] = seconds;
        doc["wall_seconds"] = std::move(jt);
        write_text_file(path, doc.dump(2) + "\n");
    }
};

int cmd_generate(const std::string& config_path, const std::string& out_path, int out_of_sample,
                 int argc, char** argv) {
    gen::GeneratorConfig cfg;
    try {
        cfg = gen::GeneratorConfig::from_json(json::parse(read_text_file(config_path)));
        if (cfg.n_stations > cfg.n_raw_sites)
            throw std::runtime_error("n_stations exceeds n_raw_sites");
        if (cfg.n_scenarios < 1) throw std::runtime_error("n_scenarios must be at least 1");
        if (cfg.n_vehicles < 1) throw std::runtime_error("n_vehicles must be at least 1");
    } catch (const std::exception& e) {
        std::cerr << "generator config invalid: " << e.what() << "\n";
        return kExitConfigError;
    }

    ManifestBuilder manifest("generate", argc, argv, cfg.rng_seed, worker_count());
    manifest.input(config_path);
    const auto t0 = std::chrono::steady_clock::now();

    auto emit = [&](int variant, const std::string& path) {
        gen::GenerationResult result = gen::generate_instance(cfg, variant);
        save_instance(result.instance, path);
        json prov;
        prov["format"] = "chargeplan-provenance";
        prov["version"] = 1;
        prov["rng_seed"] = cfg.rng_seed;
        prov["demand_variant"] = variant;
        prov["replaced_vehicles"] = result.replaced_vehicles;
        json stats = json::array();
        for (size_t i = 0; i < result.scenario_stats.size(); ++i) {
            stats.push_back({{"scenario", result.instance.scenarios[i].id},
                             {"median_shift_hours", result.scenario_stats[i].median_shift_hours},
                             {"mean_trips_per_shift", result.scenario_stats[i].mean_trips_per_shift},
                             {"mean_distance_km", result.scenario_stats[i].mean_distance_km}});
        }
        prov["scenario_stats"] = std::move(stats);
        write_text_file(path + ".provenance.json", prov.dump(2) + "\n");
        manifest.output(path);
        manifest.output(path + ".provenance.json");
        std::cout << "wrote " << path << " (" << result.instance.scenarios.size()
                  << " scenarios, " << result.instance.stations.size() << " stations)\n";
    };

    emit(0, out_path);
    for (int i = 1; i <= out_of_sample; ++i) {
        fs::path p(out_path);
        const std::string oos =
            (p.parent_path() / (p.stem().string() + "-oos" + std::to_string(i) + ".json")).string();
        emit(i, oos);
    }

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::path mp(out_path);
    manifest.write((mp.parent_path() / (mp.stem().string() + ".manifest.json")).string(),
                   {{"generate", total}});
    return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& mode_str, double alpha,
              const std::string& seed_strategy, const std::string& scenario_id, uint64_t seed,
              double time_limit, const std::string& out_dir, int argc, char** argv) {
    Instance inst;
    robust::RobustConfig rc;
    try {
        inst = load_instance(instance_path);
        if (mode_str == "fsa") rc.mode = robust::Mode::FSA;
        else if (mode_str == "asa") rc.mode = robust::Mode::ASA;
        else if (mode_str == "ava") rc.mode = robust::Mode::AVA;
        else if (mode_str == "isa") rc.mode = robust::Mode::ISA;
        else if (mode_str == "det") rc.mode = robust::Mode::Deterministic;
        else throw std::runtime_error("unknown mode '" + mode_str + "'");
        if (alpha <= 0.0 || alpha > 1.0) throw std::runtime_error("alpha must lie in (0, 1]");
        if (rc.mode == robust::Mode::FSA) alpha = 1.0;
        rc.alpha = alpha;
        rc.seed_strategy = seed_strategy == "m" ? robust::SeedStrategy::MedianCost
                                                : robust::SeedStrategy::LowestCost;
        rc.run_seed = seed;
        rc.time_limit_seconds = time_limit;
        if (rc.mode == robust::Mode::Deterministic) {
            if (scenario_id.empty())
                throw std::runtime_error("--scenario is required with --mode det");
            rc.scenario_index = -1;
            for (int i = 0; i < (int)inst.scenarios.size(); ++i)
                if (inst.scenarios[i].id == scenario_id) rc.scenario_index = i;
            if (rc.scenario_index < 0)
                throw std::runtime_error("scenario '" + scenario_id + "' not in instance");
        }
    } catch (const std::exception& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return kExitConfigError;
    }

    ManifestBuilder manifest("solve", argc, argv, seed, worker_count());
    manifest.input(instance_path);

    robust::SolveOutcome outcome;
    try {
        robust::RobustSolver solver(inst, rc);
        outcome = solver.solve();
    } catch (const robust::TimeLimitError& e) {
        std::cerr << e.what() << "\n";
        return kExitTimeLimit;
    } catch (const ccp::PreconditionInfeasible& e) {
        std::cerr << "precondition infeasible: " << e.what() << "\n";
        return kExitPreconditionInfeasible;
    }

    fs::create_directories(out_dir);
    const std::string base = (fs::path(out_dir) / outcome.run_name).string();
    const std::string solution_path = base + ".solution.json";
    const std::string report_path = base + ".report.json";
    const std::string cuts_path = base + ".cuts.json";
    write_text_file(solution_path, robust::solution_to_json(outcome, rc, inst).dump(2) + "\n");
    write_text_file(report_path,
                    robust::run_report_to_json(outcome, rc, inst, {}).dump(2) + "\n");
    write_text_file(cuts_path, outcome.cuts.to_json(inst).dump(2) + "\n");
    manifest.output(solution_path);
    manifest.output(report_path);
    manifest.output(cuts_path);
    manifest.write(base + ".manifest.json", outcome.phase_seconds);

    std::cout << outcome.run_name << ": cost " << outcome.cost << ", "
              << outcome.config.open_count() << " stations open, "
              << outcome.cutting_plane_iterations << " cutting-plane iterations\n";
    std::cout << "  optimization set: mean vehicle feasibility "
              << outcome.optimization_report.mean_vehicle_feasibility * 100.0 << "%, min "
              << outcome.optimization_report.min_vehicle_feasibility * 100.0
              << "%, scenario feasibility "
              << outcome.optimization_report.scenario_feasibility * 100.0 << "%\n";
    std::cout << "  wrote " << solution_path << "\n";
    return 0;
}

int cmd_validate(const std::string& solution_path, const std::vector<std::string>& set_paths,
                 const std::string& out_path, int argc, char** argv) {
    try {
        if (set_paths.empty()) throw std::runtime_error("at least one scenario set is required");
        Instance first = load_instance(set_paths[0]);
        robust::SolutionMeta meta =
            robust::solution_from_json(json::parse(read_text_file(solution_path)), first);

        ManifestBuilder manifest("validate", argc, argv, 0, worker_count());
        manifest.input(solution_path);

        bool all_pass = true;
        json table = json::array();
        std::cout << "validating " << meta.run_name << " (alpha "
                  << meta.alpha << ")\n";
        for (const std::string& path : set_paths) {
            Instance set_inst = load_instance(path);
            manifest.input(path);
            if (set_inst.stations.size() != first.stations.size())
                throw std::runtime_error("incompatible station universe in " + path);
            for (size_t s = 0; s < first.stations.size(); ++s)
                if (set_inst.stations[s].id != first.stations[s].id)
                    throw std::runtime_error("incompatible station universe in " + path);

            robust::FeasibilityReport report = robust::evaluate_feasibility(
                set_inst, set_inst.scenarios,
                StationConfiguration::from_open_set(
                    set_inst, meta.config.open_indices()),
                bnp::SearchLimits{});
            const bool pass = robust::passes_mode_predicate(meta.mode, meta.alpha, report);
            all_pass = all_pass && pass;
            json entry = robust::feasibility_report_to_json(report);
            entry["set"] = fs::path(path).filename().string();
            entry["passes"] = pass;
            table.push_back(std::move(entry));
            std::cout << "  " << path << ": mean " << report.mean_vehicle_feasibility * 100.0
                      << "%, min " << report.min_vehicle_feasibility * 100.0
                      << "%, scenario " << report.scenario_feasibility * 100.0 << "% -> "
                      << (pass ? "pass" : "FAIL") << "\n";
        }
        if (!out_path.empty()) {
            json doc;
            doc["format"] = "chargeplan-validation";
            doc["version"] = 1;
            doc["run_name"] = meta.run_name;
            doc["alpha"] = meta.alpha;
            doc["sets"] = std::move(table);
            write_text_file(out_path, doc.dump(2) + "\n");
            manifest.output(out_path);
            manifest.write(out_path + ".manifest.json", {});
        }
        return all_pass ? 0 : kExitValidationFailed;
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"charging-station network planning for fixed-schedule taxi fleets"};
    app.require_subcommand(1);

    int jobs = 0;
    if (const char* env = std::getenv("CHARGEPLAN_JOBS")) jobs = std::atoi(env);
    app.add_option("--jobs", jobs, "worker threads (0 = hardware default)");

    auto* gen_cmd = app.add_subcommand("generate", "emit a synthetic instance");
    std::string gen_config, gen_out = "instance.json";
    int out_of_sample = 0;
    gen_cmd->add_option("--config", gen_config, "generator config JSON")->required();
    gen_cmd->add_option("--out", gen_out, "output instance path");
    gen_cmd->add_option("--out-of-sample", out_of_sample,
                        "additional demand variants over the same stations");

    auto* solve_cmd = app.add_subcommand("solve", "compute a station configuration");
    std::string instance_path, mode = "fsa", seed_strategy = "l", scenario_id, out_dir = ".";
    double alpha = 1.0, time_limit = -1.0;
    uint64_t seed = 1;
    solve_cmd->add_option("--instance", instance_path, "instance JSON")->required();
    solve_cmd->add_option("--mode", mode, "fsa|asa|ava|isa|det");
    solve_cmd->add_option("--alpha", alpha, "feasibility level in (0,1]");
    solve_cmd->add_option("--seed-strategy", seed_strategy, "l|m (lowest or median cost seed)");
    solve_cmd->add_option("--scenario", scenario_id, "scenario id for --mode det");
    solve_cmd->add_option("--seed", seed, "run seed");
    solve_cmd->add_option("--time-limit", time_limit, "wall-clock limit in seconds");
    solve_cmd->add_option("--out-dir", out_dir, "artifact directory");

    auto* validate_cmd = app.add_subcommand("validate", "a-posteriori solution validation");
    std::string solution_path, validate_out;
    std::vector<std::string> set_paths;
    validate_cmd->add_option("--solution", solution_path, "solution JSON")->required();
    validate_cmd->add_option("--sets", set_paths, "scenario-set instance files")->required();
    validate_cmd->add_option("--out", validate_out, "validation report path");

    CLI11_PARSE(app, argc, argv);
    set_worker_count(jobs > 0 ? jobs : hardware_worker_default());

    try {
        if (gen_cmd->parsed()) return cmd_generate(gen_config, gen_out, out_of_sample, argc, argv);
        if (solve_cmd->parsed())
            return cmd_solve(instance_path, mode, alpha, seed_strategy, scenario_id, seed,
                             time_limit, out_dir, argc, argv);
        if (validate_cmd->parsed())
            return cmd_validate(solution_path, set_paths, validate_out, argc, argv);
    } catch (const InvalidInstanceError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
