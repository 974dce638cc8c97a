#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chargeplan/bnp/search.hpp"
#include "chargeplan/ccp/cutting_plane.hpp"
#include "chargeplan/core/types.hpp"

namespace chargeplan::robust {

enum class Mode { Deterministic, FSA, ASA, AVA, ISA };
enum class SeedStrategy { LowestCost, MedianCost };

std::string mode_name(Mode mode, double alpha, SeedStrategy seed);

struct RobustConfig {
    Mode mode = Mode::FSA;
    double alpha = 1.0;  // fixed at 1 for FSA
    SeedStrategy seed_strategy = SeedStrategy::LowestCost;
    uint64_t run_seed = 1;
    int scenario_index = 0;  // Deterministic target scenario
    double time_limit_seconds = -1.0;  // wall guard; expiry aborts without a solution
    bnp::SearchLimits limits;
    ccp::StrengthenOptions strengthen;
};

class TimeLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioFeasibility {
    std::string scenario_id;
    int total_vehicles = 0;
    int feasible_vehicles = 0;
    bool exact = true;

    double ratio() const {
        return total_vehicles == 0 ? 1.0 : (double)feasible_vehicles / total_vehicles;
    }
};

struct FeasibilityReport {
    std::vector<ScenarioFeasibility> per_scenario;
    double mean_vehicle_feasibility = 0.0;  // average of per-scenario ratios
    double min_vehicle_feasibility = 0.0;   // worst scenario ratio
    double scenario_feasibility = 0.0;      // share of fully feasible scenarios
};

// Exact maximum-feasible-vehicle counts per scenario under the given
// configuration, aggregated into the three feasibility measures.
FeasibilityReport evaluate_feasibility(const Instance& inst,
                                       const std::vector<Scenario>& scenarios,
                                       const StationConfiguration& config,
                                       const bnp::SearchLimits& limits = {},
                                       std::map<std::string, bnp::ScenarioCache>* caches = nullptr);

// The acceptance predicate a finished run promises on its optimization set.
bool passes_mode_predicate(Mode mode, double alpha, const FeasibilityReport& report);

// Allowed infeasible vehicles at level alpha: floor((1-alpha)*n).
int alpha_budget(double alpha, int n);

struct ScenarioCost {
    int scenario_index = -1;
    double cost = 0.0;
};

struct SolveOutcome {
    StationConfiguration config;
    std::string run_name;
    double cost = 0.0;
    int cutting_plane_iterations = 0;
    int adversarial_iterations = 0;
    int seed_scenario = -1;
    std::vector<ScenarioCost> scenario_costs;  // seed ranking (ISA / aVA)
    FeasibilityReport optimization_report;
    ccp::CutPool cuts;
    std::vector<ccp::IterationTrace> ccp_trace;
    std::vector<std::pair<std::string, double>> phase_seconds;
};

class RobustSolver {
public:
    RobustSolver(const Instance& inst, const RobustConfig& cfg);

    SolveOutcome solve();

    // Full-feasibility test for one scenario, warm across calls.
    bool scenario_feasible(const Scenario& scenario, const StationConfiguration& config);

private:
    SolveOutcome solve_deterministic(int scenario_index);
    SolveOutcome solve_fsa();
    SolveOutcome solve_asa();
    SolveOutcome solve_ava();
    SolveOutcome solve_isa();

    struct Sweep {
        std::vector<int> infeasible;  // in serial scan order, up to the stop count
        long serial_evaluations = 0;
    };
    // Full-feasibility sweep with the serial early-exit semantics; evaluation
    // may fan out in chunks, the reported counts follow the serial order.
    Sweep sweep_full_feasibility(const std::vector<const Scenario*>& set,
                                 const StationConfiguration& config, int stop_after);

    ccp::AcceptanceOracle all_feasible_oracle(std::vector<const Scenario*> set);
    ccp::AcceptanceOracle scenario_budget_oracle(int budget);

    // Deterministic ranking of per-scenario solves used for ISA and seeds.
    std::vector<ScenarioCost> rank_scenarios(std::vector<SolveOutcome>& outcomes);

    bnp::ScenarioCache& cache_for(const Scenario& scenario);
    uint64_t vehicle_rank(const std::string& scenario_id, const std::string& vehicle_id) const;
    void check_deadline() const;

    const Instance& inst_;
    RobustConfig cfg_;
    std::map<std::string, bnp::ScenarioCache> caches_;
    std::mt19937_64 rng_;
    std::chrono::steady_clock::time_point deadline_;
    bool has_deadline_ = false;
};

}  // namespace chargeplan::robust
