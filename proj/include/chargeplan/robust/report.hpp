#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chargeplan/robust/framework.hpp"

namespace chargeplan::robust {

struct ValidationEntry {
    std::string label;
    FeasibilityReport report;
};

nlohmann::json feasibility_report_to_json(const FeasibilityReport& report);

// Solution file: opened stations plus the accepted guarantee (mode, alpha)
// needed to re-validate against other scenario sets.
nlohmann::json solution_to_json(const SolveOutcome& outcome, const RobustConfig& cfg,
                                const Instance& inst);

struct SolutionMeta {
    StationConfiguration config;
    Mode mode = Mode::FSA;
    double alpha = 1.0;
    std::string run_name;
};
SolutionMeta solution_from_json(const nlohmann::json& doc, const Instance& inst);

// Deterministic run report (no wall-clock content; timings live in the
// manifest).
nlohmann::json run_report_to_json(const SolveOutcome& outcome, const RobustConfig& cfg,
                                  const Instance& inst,
                                  const std::vector<ValidationEntry>& validations);

uint64_t fnv64_bytes(const std::string& bytes);

}  // namespace chargeplan::robust
