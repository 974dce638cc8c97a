#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chargeplan/bnp/master.hpp"

namespace chargeplan::bnp {

enum class FeasibilityMode { ProveFeasible, MaxFeasibleCount };

struct TraceRecord {
    int depth = 0;
    double lp_value = 0.0;
    std::string constraint;
};

struct SearchLimits {
    long node_cap = 10000;
    long restoration_node_cap = 20000;
    double restoration_time_limit_seconds = 60.0;
    int restoration_cadence = 5;   // root plus every N processed nodes
    int early_exit_threshold = -1; // stop once the infeasible count is pinned vs this budget
};

struct FeasibilityResult {
    bool feasible = false;  // an integral all-routed solution exists
    bool proven = false;    // optimum proven (tree exhausted); false when capped
    int total_vehicles = 0;
    int max_feasible_count = 0;    // achievable feasible-vehicle count
    int min_infeasible_bound = 0;  // proven lower bound on infeasible vehicles
    std::vector<int> infeasible_vehicles;  // dummy-routed vehicles of the best incumbent
    long nodes = 0;
    long lp_solves = 0;
    std::vector<TraceRecord> trace;

    int infeasible_count() const { return total_vehicles - max_feasible_count; }
};

// Warm state carried across repeated feasibility questions on the same
// scenario (cutting-plane iterations, strengthening probes).
struct ScenarioCache {
    ColumnPool pool;
    std::map<std::pair<int, std::vector<int>>, bool> vehicle_reachability;
};

// First vertex deviation between two routes, compared gap by gap: a station
// mismatch is a station deviation, a shared station with different periods a
// time deviation. Empty when the visit sequences agree.
std::optional<tsn::BranchConstraint> first_deviation(const pricing::Route& p,
                                                     const pricing::Route& q, int num_gaps);

// Hierarchical branching step: the first vertex deviation between two
// selected paths of one fractional vehicle, station level before period
// level. Returns the enforce-side constraint; the forbid child negates it.
std::optional<std::pair<int, tsn::BranchConstraint>> find_branch(
    const RelaxationOutcome& relax, const ColumnPool& pool);

FeasibilityResult check_feasibility(const Instance& inst, const Scenario& scenario,
                                    const StationConfiguration& config, FeasibilityMode mode,
                                    const SearchLimits& limits = {},
                                    ScenarioCache* cache = nullptr);

}  // namespace chargeplan::bnp
