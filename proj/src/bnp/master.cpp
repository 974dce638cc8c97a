#include "chargeplan/bnp/master.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "chargeplan/core/parallel.hpp"

namespace chargeplan::bnp {

namespace {
constexpr double kSelectTol = 1e-6;
constexpr double kCapacityTol = 1e-7;
}  // namespace

bool ColumnPool::add(int vehicle, pricing::Route route) {
    if (keys_.size() != routes_.size()) keys_.resize(routes_.size());
    auto& index = keys_[vehicle];
    const uint64_t key = route.key();
    auto it = index.find(key);
    if (it != index.end()) {
        for (int ri : it->second)
            if (routes_[vehicle][ri].same_visits(route)) return false;
    }
    routes_[vehicle].push_back(std::move(route));
    index[key].push_back((int)routes_[vehicle].size() - 1);
    return true;
}

size_t ColumnPool::total_routes() const {
    size_t n = 0;
    for (const auto& v : routes_) n += v.size();
    return n;
}

bool route_satisfies(const pricing::Route& route, const tsn::BranchConstraint& bc) {
    const pricing::ChargeVisit* at_gap = nullptr;
    for (const auto& v : route.visits)
        if (v.gap == bc.gap) at_gap = &v;
    if (bc.enforce) {
        if (!at_gap || at_gap->station != bc.station) return false;
        if (bc.period >= 0 &&
            !(at_gap->enter_period <= bc.period && bc.period <= at_gap->exit_period))
            return false;
        return true;
    }
    if (!at_gap || at_gap->station != bc.station) return true;
    if (bc.period < 0) return false;
    return !(at_gap->enter_period <= bc.period && bc.period <= at_gap->exit_period);
}

bool route_usable(const pricing::Route& route, const StationConfiguration& config,
                  const std::vector<VehicleConstraint>& constraints, int vehicle) {
    for (const auto& [station, period] : route.footprint)
        if (!config.is_open(station)) return false;
    for (const auto& vc : constraints)
        if (vc.vehicle == vehicle && !route_satisfies(route, vc.constraint)) return false;
    return true;
}

MasterContext::MasterContext(const Instance& inst, const Scenario& scenario,
                             const StationConfiguration& config, ColumnPool& pool)
    : inst_(inst), scenario_(scenario), config_(config), pool_(pool) {
    if (pool_.num_vehicles() != (int)scenario.vehicles.size())
        throw std::invalid_argument("column pool sized for a different scenario");
}

RelaxationOutcome MasterContext::solve_relaxation(
    const std::vector<VehicleConstraint>& constraints) {
    const int num_vehicles = (int)scenario_.vehicles.size();
    RelaxationOutcome out;

    std::vector<tsn::BranchConstraint> per_vehicle_constraints_flat;
    std::vector<std::vector<tsn::BranchConstraint>> vehicle_filters(num_vehicles);
    for (const auto& vc : constraints)
        if (vc.vehicle >= 0 && vc.vehicle < num_vehicles)
            vehicle_filters[vc.vehicle].push_back(vc.constraint);

    // Active column set: pool indices valid under config and constraints.
    std::vector<std::vector<int>> active(num_vehicles);
    auto refresh_active = [&](int vehicle) {
        active[vehicle].clear();
        const auto& routes = pool_.routes(vehicle);
        for (int ri = 0; ri < (int)routes.size(); ++ri)
            if (route_usable(routes[ri], config_, constraints, vehicle))
                active[vehicle].push_back(ri);
    };
    for (int v = 0; v < num_vehicles; ++v) refresh_active(v);

    // Capacity rows instantiated so far: (station, period) -> row id.
    std::map<std::pair<int, int>, int> capacity_row;
    std::vector<lp::BasisEntry> warm;
    bool have_warm = false;

    lp::LpSolution sol;
    std::vector<int> var_vehicle;         // LP var -> vehicle
    std::vector<int> var_pool_index;      // LP var -> pool index (-1 dummy)

    while (true) {
        // Build the LP over dummies + active columns and the instantiated
        // capacity rows, then grow rows until no station-period overloads.
        while (true) {
            lp::LinearProgram master;
            var_vehicle.clear();
            var_pool_index.clear();
            std::vector<std::vector<std::pair<int, double>>> row_coeffs(
                num_vehicles + capacity_row.size());
            for (int v = 0; v < num_vehicles; ++v) {
                const int dummy = master.add_variable(1.0, 0.0, lp::kInfinity);
                var_vehicle.push_back(v);
                var_pool_index.push_back(-1);
                row_coeffs[v].push_back({dummy, 1.0});
                for (int ri : active[v]) {
                    const int col = master.add_variable(0.0, 0.0, lp::kInfinity);
                    var_vehicle.push_back(v);
                    var_pool_index.push_back(ri);
                    row_coeffs[v].push_back({col, 1.0});
                    for (const auto& st : pool_.routes(v)[ri].footprint) {
                        auto it = capacity_row.find(st);
                        if (it != capacity_row.end())
                            row_coeffs[it->second].push_back({col, 1.0});
                    }
                }
            }
            for (int v = 0; v < num_vehicles; ++v)
                master.add_row(lp::Sense::Equal, 1.0, std::move(row_coeffs[v]));
            // Capacity rows in row-id order, matching the coefficient slots.
            std::vector<std::pair<int, std::pair<int, int>>> rows_by_id;
            for (const auto& [st, row] : capacity_row) rows_by_id.push_back({row, st});
            std::sort(rows_by_id.begin(), rows_by_id.end());
            for (const auto& [row, st] : rows_by_id)
                master.add_row(lp::Sense::LessEqual,
                               (double)inst_.stations[st.first].charge_points,
                               std::move(row_coeffs[row]));

            sol = lp::solve_lp(master, have_warm ? &warm : nullptr);
            ++out.lp_solves;
            if (sol.status != lp::LpStatus::Optimal)
                throw std::runtime_error("master relaxation did not solve to optimality");
            warm = sol.basis;
            have_warm = true;

            // Occupancy check across every station-period touched by the
            // current fractional selection.
            std::map<std::pair<int, int>, double> occupancy;
            for (int j = 0; j < (int)sol.primal.size(); ++j) {
                if (var_pool_index[j] < 0 || sol.primal[j] <= kSelectTol) continue;
                for (const auto& st : pool_.routes(var_vehicle[j])[var_pool_index[j]].footprint)
                    occupancy[st] += sol.primal[j];
            }
            bool added_row = false;
            for (const auto& [st, used] : occupancy) {
                if (capacity_row.count(st)) continue;
                if (used > inst_.stations[st.first].charge_points + kCapacityTol) {
                    const int row = num_vehicles + (int)capacity_row.size();
                    capacity_row[st] = row;
                    added_row = true;
                }
            }
            if (!added_row) break;
            // New rows start basic on their slacks.
            for (size_t k = warm.size(); k < num_vehicles + capacity_row.size(); ++k)
                warm.push_back({true, (int)k});
        }

        // Duals: rho from convexity rows, charge prices from capacity rows.
        out.rho.assign(num_vehicles, 0.0);
        for (int v = 0; v < num_vehicles; ++v) out.rho[v] = sol.duals[v];
        out.prices = tsn::DualPrices((int)inst_.stations.size(), inst_.horizon.periods);
        for (const auto& [st, row] : capacity_row)
            out.prices.set(st.first, st.second, std::max(0.0, -sol.duals[row]));

        // Price every vehicle against the current duals.
        std::vector<pricing::PricingResult> priced(num_vehicles);
        parallel_for(num_vehicles, [&](int v) {
            tsn::ExpandedNetwork net = tsn::build_network(inst_, scenario_.vehicles[v], config_,
                                                          out.prices, vehicle_filters[v]);
            priced[v] = pricing::price_vehicle(net, inst_, scenario_.vehicles[v], out.rho[v]);
        });
        ++out.pricing_rounds;

        bool any_new = false;
        for (int v = 0; v < num_vehicles; ++v) {
            for (auto& route : priced[v].routes) {
                if (pool_.add(v, std::move(route))) any_new = true;
            }
            refresh_active(v);
        }
        if (!any_new) break;
    }

    out.objective = sol.objective;
    out.dummy_values.assign(num_vehicles, 0.0);
    out.selection.assign(num_vehicles, {});
    for (int j = 0; j < (int)sol.primal.size(); ++j) {
        if (sol.primal[j] <= kSelectTol) continue;
        if (var_pool_index[j] < 0) {
            out.dummy_values[var_vehicle[j]] = sol.primal[j];
            out.selection[var_vehicle[j]].push_back({-1, sol.primal[j]});
        } else {
            out.selection[var_vehicle[j]].push_back({var_pool_index[j], sol.primal[j]});
        }
    }
    return out;
}

int MasterContext::restore_integrality(const std::vector<VehicleConstraint>& constraints,
                                        const lp::BinaryLimits& limits,
                                        std::vector<std::vector<SelectedColumn>>* selection) {
    const int num_vehicles = (int)scenario_.vehicles.size();
    lp::LinearProgram bin;
    std::vector<int> var_vehicle, var_pool_index;
    std::vector<std::vector<std::pair<int, double>>> convexity(num_vehicles);
    std::map<std::pair<int, int>, std::vector<int>> touching;

    for (int v = 0; v < num_vehicles; ++v) {
        const int dummy = bin.add_variable(1.0, 0.0, 1.0);
        var_vehicle.push_back(v);
        var_pool_index.push_back(-1);
        convexity[v].push_back({dummy, 1.0});
        const auto& routes = pool_.routes(v);
        for (int ri = 0; ri < (int)routes.size(); ++ri) {
            if (!route_usable(routes[ri], config_, constraints, v)) continue;
            const int col = bin.add_variable(0.0, 0.0, 1.0);
            var_vehicle.push_back(v);
            var_pool_index.push_back(ri);
            convexity[v].push_back({col, 1.0});
            for (const auto& st : routes[ri].footprint) touching[st].push_back(col);
        }
    }
    for (int v = 0; v < num_vehicles; ++v)
        bin.add_row(lp::Sense::Equal, 1.0, std::move(convexity[v]));
    for (const auto& [st, cols] : touching) {
        const int cap = inst_.stations[st.first].charge_points;
        if ((int)cols.size() <= cap) continue;  // row can never bind
        std::vector<std::pair<int, double>> coeffs;
        for (int c : cols) coeffs.push_back({c, 1.0});
        bin.add_row(lp::Sense::LessEqual, (double)cap, std::move(coeffs));
    }

    lp::BinarySolution sol = lp::solve_binary(bin, limits);
    if (sol.status != lp::BinaryStatus::Optimal && sol.status != lp::BinaryStatus::LimitFeasible)
        return -1;
    if (selection) {
        selection->assign(num_vehicles, {});
        for (int j = 0; j < (int)sol.values.size(); ++j)
            if (sol.values[j]) (*selection)[var_vehicle[j]].push_back({var_pool_index[j], 1.0});
    }
    return (int)std::lround(sol.objective);
}

}  // namespace chargeplan::bnp
