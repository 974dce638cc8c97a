#include "chargeplan/bnp/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chargeplan/core/parallel.hpp"

namespace chargeplan::bnp {

namespace {

constexpr double kFracTol = 1e-6;

const pricing::ChargeVisit* visit_at_gap(const pricing::Route& route, int gap) {
    for (const auto& v : route.visits)
        if (v.gap == gap) return &v;
    return nullptr;
}

}  // namespace

std::optional<tsn::BranchConstraint> first_deviation(const pricing::Route& p,
                                                     const pricing::Route& q, int num_gaps) {
    for (int g = 0; g < num_gaps; ++g) {
        const pricing::ChargeVisit* vp = visit_at_gap(p, g);
        const pricing::ChargeVisit* vq = visit_at_gap(q, g);
        if (!vp && !vq) continue;
        if (!vp || !vq || vp->station != vq->station) {
            tsn::BranchConstraint bc;
            bc.gap = g;
            bc.station = vp ? vp->station : vq->station;
            bc.period = -1;
            bc.enforce = true;
            return bc;
        }
        if (vp->enter_period != vq->enter_period || vp->exit_period != vq->exit_period) {
            tsn::BranchConstraint bc;
            bc.gap = g;
            bc.station = vp->station;
            bc.enforce = true;
            bc.period = vp->enter_period != vq->enter_period
                            ? std::min(vp->enter_period, vq->enter_period)
                            : std::min(vp->exit_period, vq->exit_period) + 1;
            return bc;
        }
    }
    return std::nullopt;
}

namespace {

struct SearchNode {
    std::vector<VehicleConstraint> constraints;
    double parent_bound = 0.0;
    int depth = 0;
    std::string created_by = "root";
};

}  // namespace

std::optional<std::pair<int, tsn::BranchConstraint>> find_branch(const RelaxationOutcome& relax,
                                                                 const ColumnPool& pool) {
    // Vehicle choice: the route value closest to one half.
    int best_vehicle = -1;
    double best_score = -1.0;
    for (int v = 0; v < (int)relax.selection.size(); ++v) {
        for (const auto& sel : relax.selection[v]) {
            if (sel.pool_index < 0) continue;
            if (sel.value < kFracTol || sel.value > 1.0 - kFracTol) continue;
            const double score = 0.5 - std::fabs(sel.value - 0.5);
            if (score > best_score) {
                best_score = score;
                best_vehicle = v;
            }
        }
    }
    if (best_vehicle < 0) return std::nullopt;

    std::vector<SelectedColumn> routes;
    for (const auto& sel : relax.selection[best_vehicle])
        if (sel.pool_index >= 0) routes.push_back(sel);
    std::stable_sort(routes.begin(), routes.end(),
                     [](const SelectedColumn& a, const SelectedColumn& b) {
                         return a.value > b.value;
                     });

    const int num_gaps =
        routes.empty() ? 0 : 1 + [&] {
            int mx = -1;
            for (const auto& sel : routes)
                for (const auto& vis : pool.routes(best_vehicle)[sel.pool_index].visits)
                    mx = std::max(mx, vis.gap);
            return mx;
        }();

    if (routes.size() >= 2) {
        for (size_t a = 0; a + 1 < routes.size(); ++a) {
            auto bc = first_deviation(pool.routes(best_vehicle)[routes[a].pool_index],
                                      pool.routes(best_vehicle)[routes[a + 1].pool_index],
                                      num_gaps);
            if (bc) return std::make_pair(best_vehicle, *bc);
        }
    }
    // A single fractional route against the dummy: separate on its first
    // charging visit.
    if (!routes.empty()) {
        const pricing::Route& r = pool.routes(best_vehicle)[routes[0].pool_index];
        if (!r.visits.empty()) {
            tsn::BranchConstraint bc;
            bc.gap = r.visits[0].gap;
            bc.station = r.visits[0].station;
            bc.period = -1;
            bc.enforce = true;
            return std::make_pair(best_vehicle, bc);
        }
    }
    throw std::logic_error("fractional relaxation without a branchable deviation");
}

FeasibilityResult check_feasibility(const Instance& inst, const Scenario& scenario,
                                    const StationConfiguration& config, FeasibilityMode mode,
                                    const SearchLimits& limits, ScenarioCache* cache) {
    const int num_vehicles = (int)scenario.vehicles.size();
    FeasibilityResult result;
    result.total_vehicles = num_vehicles;

    // Vehicles with no SOC-feasible path even alone can only take the dummy;
    // they are settled before any master problem is built.
    std::vector<char> routable(num_vehicles, 0);
    {
        std::vector<int> open = config.open_indices();
        parallel_for(num_vehicles, [&](int v) {
            bool known = false, value = false;
            std::pair<int, std::vector<int>> key;
            if (cache) {
                std::vector<int> reachable;
                for (const auto& gap : scenario.vehicles[v].gaps)
                    for (const auto& a : gap.stations)
                        if (config.is_open(a.station)) reachable.push_back(a.station);
                std::sort(reachable.begin(), reachable.end());
                reachable.erase(std::unique(reachable.begin(), reachable.end()), reachable.end());
                key = {v, std::move(reachable)};
#pragma omp critical(chargeplan_reach_cache)
                {
                    auto it = cache->vehicle_reachability.find(key);
                    if (it != cache->vehicle_reachability.end()) {
                        known = true;
                        value = it->second;
                    }
                }
            }
            if (!known) {
                value = pricing::vehicle_feasible(inst, scenario.vehicles[v], config);
                if (cache) {
#pragma omp critical(chargeplan_reach_cache)
                    cache->vehicle_reachability[key] = value;
                }
            }
            routable[v] = value ? 1 : 0;
        });
    }
    int base_infeasible = 0;
    std::vector<int> sub_index;  // searched vehicle -> original index
    for (int v = 0; v < num_vehicles; ++v) {
        if (routable[v]) sub_index.push_back(v);
        else {
            ++base_infeasible;
            result.infeasible_vehicles.push_back(v);
        }
    }

    result.min_infeasible_bound = base_infeasible;
    result.max_feasible_count = (int)sub_index.size();  // optimistic start, settled below

    if (mode == FeasibilityMode::ProveFeasible && base_infeasible > 0) {
        result.feasible = false;
        result.proven = true;
        result.max_feasible_count = 0;  // not evaluated in this mode
        return result;
    }
    if (limits.early_exit_threshold >= 0 && base_infeasible > limits.early_exit_threshold) {
        result.feasible = false;
        result.proven = false;
        result.max_feasible_count = (int)sub_index.size();
        return result;
    }
    if (sub_index.empty()) {
        result.feasible = base_infeasible == 0;
        result.proven = true;
        result.max_feasible_count = 0;
        return result;
    }

    Scenario sub;
    sub.id = scenario.id;
    sub.weight = scenario.weight;
    for (int v : sub_index) sub.vehicles.push_back(scenario.vehicles[v]);

    ColumnPool local_pool((int)sub.vehicles.size());
    ColumnPool* pool = &local_pool;
    if (cache) {
        if (cache->pool.num_vehicles() != (int)sub.vehicles.size())
            cache->pool.reset((int)sub.vehicles.size());
        pool = &cache->pool;
    }
    MasterContext master(inst, sub, config, *pool);

    const int sub_count = (int)sub.vehicles.size();
    int incumbent = sub_count;  // every vehicle on its dummy route
    std::vector<int> incumbent_dummies(sub_count);
    for (int v = 0; v < sub_count; ++v) incumbent_dummies[v] = v;
    double min_pruned_lp = std::numeric_limits<double>::infinity();
    bool capped = false;
    bool proven_pass = false;
    bool proven_fail = false;

    std::vector<SearchNode> stack{SearchNode{}};
    long processed = 0;

    auto open_lb = [&]() {
        double lb = std::numeric_limits<double>::infinity();
        for (const auto& nd : stack) lb = std::min(lb, nd.parent_bound);
        return std::min(lb, min_pruned_lp);
    };

    while (!stack.empty()) {
        if (limits.early_exit_threshold >= 0) {
            const int adjusted = limits.early_exit_threshold - base_infeasible;
            if (incumbent <= adjusted) {
                proven_pass = true;  // budget provably met by the incumbent
                break;
            }
            const int lb_int = (int)std::ceil(open_lb() - kFracTol);
            if (lb_int > adjusted && incumbent > adjusted) {
                proven_fail = true;  // budget provably exceeded
                break;
            }
        }
        if (processed >= limits.node_cap) {
            capped = true;
            break;
        }

        SearchNode node = std::move(stack.back());
        stack.pop_back();
        if (mode == FeasibilityMode::MaxFeasibleCount &&
            (int)std::ceil(node.parent_bound - kFracTol) >= incumbent)
            continue;
        if (mode == FeasibilityMode::ProveFeasible && node.parent_bound > kFracTol) continue;
        ++processed;

        RelaxationOutcome relax = master.solve_relaxation(node.constraints);
        result.lp_solves += relax.lp_solves;
        result.trace.push_back({node.depth, relax.objective, node.created_by});

        if (mode == FeasibilityMode::ProveFeasible && relax.objective > kFracTol) {
            min_pruned_lp = std::min(min_pruned_lp, relax.objective);
            continue;
        }
        if (mode == FeasibilityMode::MaxFeasibleCount &&
            (int)std::ceil(relax.objective - kFracTol) >= incumbent) {
            min_pruned_lp = std::min(min_pruned_lp, relax.objective);
            continue;
        }

        auto branch = find_branch(relax, *pool);
        if (!branch) {
            // Integral solution.
            const int value = (int)std::lround(relax.objective);
            if (value < incumbent) {
                incumbent = value;
                incumbent_dummies.clear();
                for (int v = 0; v < sub_count; ++v)
                    if (relax.dummy_values[v] > 0.5) incumbent_dummies.push_back(v);
            }
            if (mode == FeasibilityMode::ProveFeasible && incumbent == 0) break;
            continue;
        }

        // Periodic integer restoration over the pooled columns.
        if ((processed - 1) % std::max(1, limits.restoration_cadence) == 0) {
            lp::BinaryLimits bl;
            bl.max_nodes = limits.restoration_node_cap;
            bl.time_limit_seconds = limits.restoration_time_limit_seconds;
            std::vector<std::vector<SelectedColumn>> restored_sel;
            const int restored = master.restore_integrality(node.constraints, bl, &restored_sel);
            if (restored >= 0) {
                if (restored < incumbent) {
                    incumbent = restored;
                    incumbent_dummies.clear();
                    for (int v = 0; v < sub_count; ++v)
                        for (const auto& sel : restored_sel[v])
                            if (sel.pool_index < 0) incumbent_dummies.push_back(v);
                }
                if (mode == FeasibilityMode::ProveFeasible && incumbent == 0) break;
                if (mode == FeasibilityMode::MaxFeasibleCount &&
                    (int)std::ceil(relax.objective - kFracTol) >= incumbent)
                    continue;
            }
        }

        auto [vehicle, enforce_bc] = *branch;
        tsn::BranchConstraint forbid_bc = enforce_bc;
        forbid_bc.enforce = false;

        SearchNode forbid_child;
        forbid_child.constraints = node.constraints;
        forbid_child.constraints.push_back({vehicle, forbid_bc});
        forbid_child.parent_bound = relax.objective;
        forbid_child.depth = node.depth + 1;
        forbid_child.created_by = "v" + std::to_string(vehicle) + " " + forbid_bc.describe();

        SearchNode enforce_child;
        enforce_child.constraints = std::move(node.constraints);
        enforce_child.constraints.push_back({vehicle, enforce_bc});
        enforce_child.parent_bound = relax.objective;
        enforce_child.depth = node.depth + 1;
        enforce_child.created_by = "v" + std::to_string(vehicle) + " " + enforce_bc.describe();

        stack.push_back(std::move(forbid_child));
        stack.push_back(std::move(enforce_child));  // depth-first, enforce side first
    }

    result.nodes = processed;
    const bool exhausted = stack.empty() && !capped && !proven_pass && !proven_fail;
    if (mode == FeasibilityMode::ProveFeasible) {
        result.feasible = incumbent == 0;
        result.proven = result.feasible || exhausted || proven_fail;
        if (!result.proven)
            throw std::runtime_error(
                "feasibility proof exceeded the node cap; raise SearchLimits::node_cap");
        result.max_feasible_count = result.feasible ? num_vehicles : sub_count - incumbent;
        result.min_infeasible_bound = result.feasible ? 0 : 1;
        return result;
    }

    // MaxFeasibleCount: the incumbent dummy count is achievable, so the
    // reported feasible count is a safe lower bound even when capped.
    result.max_feasible_count = sub_count - incumbent;
    result.feasible = base_infeasible == 0 && incumbent == 0;
    for (int v : incumbent_dummies) result.infeasible_vehicles.push_back(sub_index[v]);
    std::sort(result.infeasible_vehicles.begin(), result.infeasible_vehicles.end());
    result.proven = exhausted;
    if (exhausted) {
        result.min_infeasible_bound = base_infeasible + incumbent;
    } else {
        const double lb = open_lb();
        int searched_lb = incumbent;
        if (std::isfinite(lb)) searched_lb = std::min(searched_lb, (int)std::ceil(lb - kFracTol));
        result.min_infeasible_bound = base_infeasible + std::max(0, searched_lb);
    }
    return result;
}

}  // namespace chargeplan::bnp
