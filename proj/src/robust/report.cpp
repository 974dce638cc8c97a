#include "chargeplan/robust/report.hpp"

#include <stdexcept>

#include "chargeplan/core/instance_io.hpp"

namespace chargeplan::robust {

using nlohmann::json;

namespace {

std::string mode_tag(Mode mode) {
    switch (mode) {
        case Mode::Deterministic: return "det";
        case Mode::FSA: return "fsa";
        case Mode::ASA: return "asa";
        case Mode::AVA: return "ava";
        case Mode::ISA: return "isa";
    }
    return "?";
}

Mode mode_from_tag(const std::string& tag) {
    if (tag == "det") return Mode::Deterministic;
    if (tag == "fsa") return Mode::FSA;
    if (tag == "asa") return Mode::ASA;
    if (tag == "ava") return Mode::AVA;
    if (tag == "isa") return Mode::ISA;
    throw std::runtime_error("unknown mode tag '" + tag + "'");
}

}  // namespace

json feasibility_report_to_json(const FeasibilityReport& report) {
    json doc;
    doc["mean_vehicle_feasibility"] = report.mean_vehicle_feasibility;
    doc["min_vehicle_feasibility"] = report.min_vehicle_feasibility;
    doc["scenario_feasibility"] = report.scenario_feasibility;
    doc["per_scenario"] = json::array();
    for (const auto& sf : report.per_scenario) {
        doc["per_scenario"].push_back({{"scenario", sf.scenario_id},
                                       {"vehicles", sf.total_vehicles},
                                       {"feasible_vehicles", sf.feasible_vehicles},
                                       {"exact", sf.exact}});
    }
    return doc;
}

json solution_to_json(const SolveOutcome& outcome, const RobustConfig& cfg,
                      const Instance& inst) {
    json doc = configuration_to_json(outcome.config, inst);
    doc["run_name"] = outcome.run_name;
    doc["mode"] = mode_tag(cfg.mode);
    doc["alpha"] = cfg.alpha;
    doc["seed_strategy"] = cfg.seed_strategy == SeedStrategy::LowestCost ? "l" : "m";
    doc["run_seed"] = cfg.run_seed;
    return doc;
}

SolutionMeta solution_from_json(const json& doc, const Instance& inst) {
    SolutionMeta meta;
    meta.config = configuration_from_json(doc, inst);
    meta.mode = mode_from_tag(doc.value("mode", "fsa"));
    meta.alpha = doc.value("alpha", 1.0);
    meta.run_name = doc.value("run_name", "");
    return meta;
}

json run_report_to_json(const SolveOutcome& outcome, const RobustConfig& cfg,
                        const Instance& inst, const std::vector<ValidationEntry>& validations) {
    json doc;
    doc["format"] = "chargeplan-report";
    doc["version"] = 1;
    doc["run_name"] = outcome.run_name;
    doc["mode"] = mode_tag(cfg.mode);
    doc["alpha"] = cfg.alpha;
    doc["seed_strategy"] = cfg.seed_strategy == SeedStrategy::LowestCost ? "l" : "m";
    doc["run_seed"] = cfg.run_seed;
    doc["cost"] = outcome.cost;
    json open = json::array();
    for (int s : outcome.config.open_indices()) open.push_back(inst.stations[s].id);
    doc["opened"] = std::move(open);
    doc["cutting_plane_iterations"] = outcome.cutting_plane_iterations;
    doc["adversarial_iterations"] = outcome.adversarial_iterations;
    if (outcome.seed_scenario >= 0)
        doc["seed_scenario"] = inst.scenarios[outcome.seed_scenario].id;
    if (!outcome.scenario_costs.empty()) {
        json ranking = json::array();
        for (const auto& sc : outcome.scenario_costs)
            ranking.push_back(
                {{"scenario", inst.scenarios[sc.scenario_index].id}, {"cost", sc.cost}});
        doc["scenario_costs"] = std::move(ranking);
    }
    doc["optimization_set"] = feasibility_report_to_json(outcome.optimization_report);
    if (!validations.empty()) {
        json sets = json::array();
        for (const auto& v : validations) {
            json entry = feasibility_report_to_json(v.report);
            entry["set"] = v.label;
            sets.push_back(std::move(entry));
        }
        doc["out_of_sample"] = std::move(sets);
    }
    return doc;
}

uint64_t fnv64_bytes(const std::string& bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
    return h;
}

}  // namespace chargeplan::robust
