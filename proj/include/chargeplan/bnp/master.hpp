#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "chargeplan/core/types.hpp"
#include "chargeplan/lp/linear_program.hpp"
#include "chargeplan/pricing/labeling.hpp"
#include "chargeplan/tsn/network.hpp"

namespace chargeplan::bnp {

// Global per-scenario route pool. Routes survive across cutting-plane
// iterations and branch nodes; validity against the current configuration
// and branching constraints is filtered at use.
class ColumnPool {
public:
    explicit ColumnPool(int num_vehicles = 0) : routes_(num_vehicles) {}

    void reset(int num_vehicles) {
        routes_.assign(num_vehicles, {});
        keys_.assign(num_vehicles, {});
    }
    int num_vehicles() const { return (int)routes_.size(); }

    // Returns false for duplicates of an already pooled (vehicle, visit
    // sequence) pair.
    bool add(int vehicle, pricing::Route route);

    const std::vector<pricing::Route>& routes(int vehicle) const { return routes_[vehicle]; }
    size_t total_routes() const;

private:
    std::vector<std::vector<pricing::Route>> routes_;
    std::vector<std::unordered_map<uint64_t, std::vector<int>>> keys_;
};

struct VehicleConstraint {
    int vehicle = -1;
    tsn::BranchConstraint constraint;
};

bool route_satisfies(const pricing::Route& route, const tsn::BranchConstraint& bc);
bool route_usable(const pricing::Route& route, const StationConfiguration& config,
                  const std::vector<VehicleConstraint>& constraints, int vehicle);

struct SelectedColumn {
    int pool_index = -1;  // -1 marks the dummy route
    double value = 0.0;
};

struct RelaxationOutcome {
    double objective = 0.0;
    std::vector<double> dummy_values;                   // per vehicle
    std::vector<std::vector<SelectedColumn>> selection; // per vehicle, y > tol
    std::vector<double> rho;                            // convexity duals
    tsn::DualPrices prices;                             // charge prices (-lambda)
    long lp_solves = 0;
    long pricing_rounds = 0;
};

// Column-generation master for one (scenario, configuration) question.
// Capacity rows are instantiated lazily: a row enters the program when the
// current primal overloads its station-period pair, so slack rows keep
// their zero dual implicitly.
class MasterContext {
public:
    MasterContext(const Instance& inst, const Scenario& scenario,
                  const StationConfiguration& config, ColumnPool& pool);

    RelaxationOutcome solve_relaxation(const std::vector<VehicleConstraint>& constraints);

    // Binary solve over the pooled columns that satisfy `constraints`.
    // Returns the dummy count, or -1 when no integral solution was proven
    // within the limits.
    int restore_integrality(const std::vector<VehicleConstraint>& constraints,
                            const lp::BinaryLimits& limits,
                            std::vector<std::vector<SelectedColumn>>* selection = nullptr);

    const Instance& instance() const { return inst_; }
    const Scenario& scenario() const { return scenario_; }
    const StationConfiguration& config() const { return config_; }
    ColumnPool& pool() { return pool_; }

private:
    const Instance& inst_;
    const Scenario& scenario_;
    StationConfiguration config_;  // by value: callers often pass temporaries
    ColumnPool& pool_;
};

}  // namespace chargeplan::bnp
