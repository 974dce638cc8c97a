#pragma once

#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "chargeplan/core/types.hpp"

namespace chargeplan::ccp {

// A cover: a set of stations whose simultaneous closure is operationally
// infeasible for the governing scenario set. The induced cut opens at least
// one of them.
struct CoverCut {
    std::vector<int> stations;  // sorted, non-empty

    bool is_superset_of(const CoverCut& other) const;
};

class CutPool {
public:
    // Dominance-pruned insert: rejects supersets of existing cuts and evicts
    // existing supersets of the new cut. Returns false for dominated or
    // duplicate cuts.
    bool add(CoverCut cut);

    const std::vector<CoverCut>& cuts() const { return cuts_; }
    size_t size() const { return cuts_.size(); }

    nlohmann::json to_json(const Instance& inst) const;
    static CutPool from_json(const nlohmann::json& doc, const Instance& inst);

private:
    std::vector<CoverCut> cuts_;
};

// Cost-minimal configuration satisfying every cover cut, solved to proven
// optimality by the embedded binary solver.
StationConfiguration solve_ccp(const Instance& inst, const CutPool& pool);

struct OracleStats {
    long scenario_evaluations = 0;
};

// Acceptance question of the governing mode: is this configuration
// operationally acceptable? Implementations report their per-scenario
// evaluation count for the deterministic strengthening budget.
using AcceptanceOracle = std::function<bool(const StationConfiguration&, OracleStats&)>;

// Cover validity question used while shrinking: is closing exactly this
// station set (all others open) unacceptable?
using CoverOracle = std::function<bool(const std::vector<int>&, OracleStats&)>;

struct StrengthenOptions {
    long min_budget_evaluations = 64;
    int feasible_retries = 2;  // redraws from the last verified cover
};

// Shrinks a cover into a set of tighter verified covers. Every output is a
// subset of the input, re-verified through the oracle, and the result is
// pruned to non-dominated members. The input survives unless dominated.
std::vector<CoverCut> strengthen_cover(const CoverCut& cover, const CoverOracle& closing_infeasible,
                                       long budget_evaluations, std::mt19937_64& rng,
                                       const StrengthenOptions& opts = {});

class PreconditionInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IterationTrace {
    double ccp_cost = 0.0;
    std::vector<int> incumbent_open;
    std::vector<CoverCut> added_cuts;
    bool accepted = false;
};

struct CuttingPlaneOutcome {
    StationConfiguration config;
    int iterations = 0;
    std::vector<IterationTrace> trace;
};

// The deterministic cutting-plane loop: solve the first-stage program, test
// acceptance, derive the closed-station cover on rejection, strengthen it,
// add all resulting cuts, repeat. Throws PreconditionInfeasible when even
// the all-open configuration is rejected (empty cover).
CuttingPlaneOutcome cutting_plane_solve(const Instance& inst, const AcceptanceOracle& accept,
                                        CutPool& pool, std::mt19937_64& rng,
                                        const StrengthenOptions& opts = {});

}  // namespace chargeplan::ccp
