#include "chargeplan/robust/framework.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "chargeplan/core/parallel.hpp"

namespace chargeplan::robust {

namespace {

using Clock = std::chrono::steady_clock;

class PhaseTimer {
public:
    PhaseTimer(SolveOutcome& out, std::string phase)
        : out_(out), phase_(std::move(phase)), start_(Clock::now()) {}
    ~PhaseTimer() {
        out_.phase_seconds.push_back(
            {phase_, std::chrono::duration<double>(Clock::now() - start_).count()});
    }

private:
    SolveOutcome& out_;
    std::string phase_;
    Clock::time_point start_;
};

uint64_t fnv64(const void* data, size_t len, uint64_t seed) {
    const unsigned char* p = (const unsigned char*)data;
    uint64_t h = seed ^ 14695981039346656037ull;
    for (size_t i = 0; i < len; ++i) h = (h ^ p[i]) * 1099511628211ull;
    return h;
}

}  // namespace

std::string mode_name(Mode mode, double alpha, SeedStrategy seed) {
    const int pct = (int)std::lround(alpha * 100.0);
    switch (mode) {
        case Mode::Deterministic: return "DET";
        case Mode::FSA: return "FSA";
        case Mode::ASA: return std::to_string(pct) + "-SA";
        case Mode::AVA:
            return std::to_string(pct) + "-VA-" +
                   (seed == SeedStrategy::LowestCost ? "L" : "M");
        case Mode::ISA: return seed == SeedStrategy::LowestCost ? "ISA-L" : "ISA-M";
    }
    return "?";
}

int alpha_budget(double alpha, int n) {
    return (int)std::floor((1.0 - alpha) * n + 1e-9);
}

FeasibilityReport evaluate_feasibility(const Instance& inst,
                                       const std::vector<Scenario>& scenarios,
                                       const StationConfiguration& config,
                                       const bnp::SearchLimits& limits,
                                       std::map<std::string, bnp::ScenarioCache>* caches) {
    FeasibilityReport report;
    report.per_scenario.resize(scenarios.size());

    bnp::SearchLimits exact = limits;
    exact.early_exit_threshold = -1;

    std::map<std::string, bnp::ScenarioCache> local;
    auto& cache_map = caches ? *caches : local;
    for (const Scenario& z : scenarios) cache_map[z.id];  // materialize before fan-out

    parallel_for((int)scenarios.size(), [&](int i) {
        bnp::FeasibilityResult res = bnp::check_feasibility(
            inst, scenarios[i], config, bnp::FeasibilityMode::MaxFeasibleCount, exact,
            &cache_map[scenarios[i].id]);
        ScenarioFeasibility& sf = report.per_scenario[i];
        sf.scenario_id = scenarios[i].id;
        sf.total_vehicles = res.total_vehicles;
        sf.feasible_vehicles = res.max_feasible_count;
        sf.exact = res.proven;
    });

    double mean = 0.0, worst = 1.0, full = 0.0;
    for (const auto& sf : report.per_scenario) {
        mean += sf.ratio();
        worst = std::min(worst, sf.ratio());
        full += sf.feasible_vehicles == sf.total_vehicles ? 1.0 : 0.0;
    }
    const double n = report.per_scenario.empty() ? 1.0 : (double)report.per_scenario.size();
    report.mean_vehicle_feasibility = mean / n;
    report.min_vehicle_feasibility = report.per_scenario.empty() ? 1.0 : worst;
    report.scenario_feasibility = full / n;
    return report;
}

bool passes_mode_predicate(Mode mode, double alpha, const FeasibilityReport& report) {
    constexpr double tol = 1e-12;
    switch (mode) {
        case Mode::FSA: return report.scenario_feasibility >= 1.0 - tol;
        case Mode::ASA: return report.scenario_feasibility >= alpha - tol;
        case Mode::AVA: return report.min_vehicle_feasibility >= alpha - tol;
        case Mode::Deterministic:
        case Mode::ISA:
            for (const auto& sf : report.per_scenario)
                if (sf.feasible_vehicles == sf.total_vehicles) return true;
            return report.per_scenario.empty();
    }
    return false;
}

RobustSolver::RobustSolver(const Instance& inst, const RobustConfig& cfg)
    : inst_(inst), cfg_(cfg), rng_(cfg.run_seed) {}

void RobustSolver::check_deadline() const {
    if (has_deadline_ && Clock::now() > deadline_)
        throw TimeLimitError("time limit exceeded before a solution was accepted");
}

bnp::ScenarioCache& RobustSolver::cache_for(const Scenario& scenario) {
    return caches_[scenario.id];
}

uint64_t RobustSolver::vehicle_rank(const std::string& scenario_id,
                                    const std::string& vehicle_id) const {
    uint64_t h = fnv64(scenario_id.data(), scenario_id.size(), cfg_.run_seed);
    return fnv64(vehicle_id.data(), vehicle_id.size(), h);
}

bool RobustSolver::scenario_feasible(const Scenario& scenario,
                                     const StationConfiguration& config) {
    return bnp::check_feasibility(inst_, scenario, config, bnp::FeasibilityMode::ProveFeasible,
                                  cfg_.limits, &cache_for(scenario))
        .feasible;
}

RobustSolver::Sweep RobustSolver::sweep_full_feasibility(const std::vector<const Scenario*>& set,
                                                         const StationConfiguration& config,
                                                         int stop_after) {
    check_deadline();
    Sweep sweep;
    const int n = (int)set.size();
    const int chunk = std::max(1, worker_count());
    for (const Scenario* z : set) caches_[z->id];  // materialize before fan-out
    int idx = 0;
    while (idx < n && (int)sweep.infeasible.size() < stop_after) {
        const int hi = std::min(n, idx + chunk);
        std::vector<char> ok(hi - idx, 1);
        parallel_for(hi - idx, [&](int k) {
            ok[k] = bnp::check_feasibility(inst_, *set[idx + k], config,
                                           bnp::FeasibilityMode::ProveFeasible, cfg_.limits,
                                           &caches_[set[idx + k]->id])
                        .feasible
                        ? 1
                        : 0;
        });
        for (int k = 0; k < hi - idx && (int)sweep.infeasible.size() < stop_after; ++k) {
            ++sweep.serial_evaluations;
            if (!ok[k]) sweep.infeasible.push_back(idx + k);
        }
        idx = hi;
    }
    return sweep;
}

ccp::AcceptanceOracle RobustSolver::all_feasible_oracle(std::vector<const Scenario*> set) {
    return [this, set = std::move(set)](const StationConfiguration& config,
                                        ccp::OracleStats& stats) {
        Sweep sweep = sweep_full_feasibility(set, config, 1);
        stats.scenario_evaluations += sweep.serial_evaluations;
        return sweep.infeasible.empty();
    };
}

ccp::AcceptanceOracle RobustSolver::scenario_budget_oracle(int budget) {
    std::vector<const Scenario*> set;
    for (const Scenario& z : inst_.scenarios) set.push_back(&z);
    return [this, set = std::move(set), budget](const StationConfiguration& config,
                                                ccp::OracleStats& stats) {
        Sweep sweep = sweep_full_feasibility(set, config, budget + 1);
        stats.scenario_evaluations += sweep.serial_evaluations;
        return (int)sweep.infeasible.size() <= budget;
    };
}

SolveOutcome RobustSolver::solve_deterministic(int scenario_index) {
    SolveOutcome out;
    out.run_name = "DET-" + inst_.scenarios[scenario_index].id;
    out.seed_scenario = scenario_index;
    ccp::CutPool pool;
    {
        PhaseTimer timer(out, "cutting-plane");
        ccp::CuttingPlaneOutcome cp = ccp::cutting_plane_solve(
            inst_, all_feasible_oracle({&inst_.scenarios[scenario_index]}), pool, rng_,
            cfg_.strengthen);
        out.config = std::move(cp.config);
        out.cutting_plane_iterations = cp.iterations;
        out.ccp_trace = std::move(cp.trace);
    }
    out.cuts = std::move(pool);
    out.cost = out.config.total_cost;
    return out;
}

SolveOutcome RobustSolver::solve_fsa() {
    SolveOutcome out;
    out.run_name = mode_name(Mode::FSA, 1.0, cfg_.seed_strategy);
    std::vector<const Scenario*> all;
    for (const Scenario& z : inst_.scenarios) all.push_back(&z);
    ccp::CutPool pool;
    {
        PhaseTimer timer(out, "cutting-plane");
        ccp::CuttingPlaneOutcome cp =
            ccp::cutting_plane_solve(inst_, all_feasible_oracle(all), pool, rng_, cfg_.strengthen);
        out.config = std::move(cp.config);
        out.cutting_plane_iterations = cp.iterations;
        out.ccp_trace = std::move(cp.trace);
    }
    out.cuts = std::move(pool);
    out.cost = out.config.total_cost;
    {
        PhaseTimer timer(out, "evaluate");
        out.optimization_report =
            evaluate_feasibility(inst_, inst_.scenarios, out.config, cfg_.limits, &caches_);
    }
    return out;
}

SolveOutcome RobustSolver::solve_asa() {
    SolveOutcome out;
    out.run_name = mode_name(Mode::ASA, cfg_.alpha, cfg_.seed_strategy);
    const int budget = alpha_budget(cfg_.alpha, (int)inst_.scenarios.size());
    ccp::CutPool pool;
    {
        PhaseTimer timer(out, "cutting-plane");
        ccp::CuttingPlaneOutcome cp = ccp::cutting_plane_solve(
            inst_, scenario_budget_oracle(budget), pool, rng_, cfg_.strengthen);
        out.config = std::move(cp.config);
        out.cutting_plane_iterations = cp.iterations;
        out.ccp_trace = std::move(cp.trace);
    }
    out.cuts = std::move(pool);
    out.cost = out.config.total_cost;
    {
        PhaseTimer timer(out, "evaluate");
        out.optimization_report =
            evaluate_feasibility(inst_, inst_.scenarios, out.config, cfg_.limits, &caches_);
    }
    return out;
}

std::vector<ScenarioCost> RobustSolver::rank_scenarios(std::vector<SolveOutcome>& outcomes) {
    std::vector<ScenarioCost> ranking;
    for (int i = 0; i < (int)outcomes.size(); ++i) ranking.push_back({i, outcomes[i].cost});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const ScenarioCost& a, const ScenarioCost& b) {
                         if (a.cost != b.cost) return a.cost < b.cost;
                         return a.scenario_index < b.scenario_index;
                     });
    return ranking;
}

SolveOutcome RobustSolver::solve_isa() {
    SolveOutcome out;
    out.run_name = mode_name(Mode::ISA, cfg_.alpha, cfg_.seed_strategy);
    std::vector<SolveOutcome> per_scenario;
    {
        PhaseTimer timer(out, "seed-ranking");
        for (int i = 0; i < (int)inst_.scenarios.size(); ++i)
            per_scenario.push_back(solve_deterministic(i));
    }
    std::vector<ScenarioCost> ranking = rank_scenarios(per_scenario);
    const int pick = cfg_.seed_strategy == SeedStrategy::LowestCost
                         ? 0
                         : ((int)ranking.size() - 1) / 2;  // lower median
    const int chosen = ranking[pick].scenario_index;
    SolveOutcome& base = per_scenario[chosen];
    out.config = std::move(base.config);
    out.cost = out.config.total_cost;
    out.cuts = std::move(base.cuts);
    out.ccp_trace = std::move(base.ccp_trace);
    out.cutting_plane_iterations = base.cutting_plane_iterations;
    out.seed_scenario = chosen;
    out.scenario_costs = std::move(ranking);
    {
        PhaseTimer timer(out, "evaluate");
        out.optimization_report =
            evaluate_feasibility(inst_, inst_.scenarios, out.config, cfg_.limits, &caches_);
    }
    return out;
}

SolveOutcome RobustSolver::solve_ava() {
    SolveOutcome out;
    out.run_name = mode_name(Mode::AVA, cfg_.alpha, cfg_.seed_strategy);

    // Seed scenario from the deterministic per-scenario ranking; the seed's
    // cut pool warm-starts the adversarial loop.
    std::vector<SolveOutcome> per_scenario;
    {
        PhaseTimer timer(out, "seed-ranking");
        for (int i = 0; i < (int)inst_.scenarios.size(); ++i)
            per_scenario.push_back(solve_deterministic(i));
    }
    std::vector<ScenarioCost> ranking = rank_scenarios(per_scenario);
    const int pick = cfg_.seed_strategy == SeedStrategy::LowestCost
                         ? 0
                         : ((int)ranking.size() - 1) / 2;
    const int seed = ranking[pick].scenario_index;
    out.seed_scenario = seed;
    out.scenario_costs = std::move(ranking);
    ccp::CutPool pool = per_scenario[seed].cuts;

    std::vector<Scenario> omega{inst_.scenarios[seed]};
    std::vector<int> phi;  // original scenario indices under the relaxed requirement
    for (int i = 0; i < (int)inst_.scenarios.size(); ++i)
        if (i != seed) phi.push_back(i);

    std::map<int, std::set<std::string>> promoted;          // z* -> promoted vehicle ids
    std::map<int, std::set<std::set<std::string>>> added;   // z* -> partial compositions

    StationConfiguration config;
    {
        PhaseTimer timer(out, "adversarial");
        while (true) {
            check_deadline();
            std::vector<const Scenario*> omega_ptrs;
            for (const Scenario& z : omega) omega_ptrs.push_back(&z);
            ccp::CuttingPlaneOutcome cp = ccp::cutting_plane_solve(
                inst_, all_feasible_oracle(omega_ptrs), pool, rng_, cfg_.strengthen);
            config = std::move(cp.config);
            out.cutting_plane_iterations += cp.iterations;
            for (auto& t : cp.trace) out.ccp_trace.push_back(std::move(t));

            // Screen the relaxed set against the per-scenario vehicle budget.
            std::vector<char> violates(phi.size(), 0);
            for (int zi : phi) caches_[inst_.scenarios[zi].id];
            parallel_for((int)phi.size(), [&](int k) {
                const Scenario& z = inst_.scenarios[phi[k]];
                bnp::SearchLimits sweep_limits = cfg_.limits;
                sweep_limits.early_exit_threshold = alpha_budget(cfg_.alpha, (int)z.vehicles.size());
                bnp::FeasibilityResult res =
                    bnp::check_feasibility(inst_, z, config, bnp::FeasibilityMode::MaxFeasibleCount,
                                           sweep_limits, &caches_[z.id]);
                violates[k] =
                    res.infeasible_count() > alpha_budget(cfg_.alpha, (int)z.vehicles.size()) ? 1 : 0;
            });

            // Exact counts for the violators pick the smallest violation.
            int star = -1, star_violation = 0;
            bnp::FeasibilityResult star_result;
            for (int k = 0; k < (int)phi.size(); ++k) {
                if (!violates[k]) continue;
                const Scenario& z = inst_.scenarios[phi[k]];
                bnp::SearchLimits exact = cfg_.limits;
                exact.early_exit_threshold = -1;
                bnp::FeasibilityResult res = bnp::check_feasibility(
                    inst_, z, config, bnp::FeasibilityMode::MaxFeasibleCount, exact,
                    &caches_[z.id]);
                const int budget = alpha_budget(cfg_.alpha, (int)z.vehicles.size());
                const int violation = res.infeasible_count() - budget;
                if (violation <= 0) continue;  // the exact pass met the budget after all
                if (star < 0 || violation < star_violation) {
                    star = phi[k];
                    star_violation = violation;
                    star_result = std::move(res);
                }
            }
            if (star < 0) break;  // every relaxed scenario within its budget

            // Partial scenario: exactly the budget-exceeding count of
            // infeasible vehicles, ranked by the seeded shuffle, fresh
            // vehicles first.
            const Scenario& zstar = inst_.scenarios[star];
            auto& zpromoted = promoted[star];
            std::vector<std::pair<std::pair<int, uint64_t>, std::string>> ordered;
            for (int v : star_result.infeasible_vehicles) {
                const std::string& vid = zstar.vehicles[v].id;
                ordered.push_back(
                    {{zpromoted.count(vid) ? 1 : 0, vehicle_rank(zstar.id, vid)}, vid});
            }
            std::sort(ordered.begin(), ordered.end());
            std::set<std::string> chosen;
            for (int i = 0; i < star_violation && i < (int)ordered.size(); ++i)
                chosen.insert(ordered[i].second);

            // No-progress escalation: grow the cumulative partial, then fall
            // back to promoting the scenario wholesale.
            bool is_new = false;
            for (const std::string& vid : chosen) is_new |= !zpromoted.count(vid);
            if (!is_new) {
                std::set<std::string> merged = zpromoted;
                for (const std::string& vid : chosen) merged.insert(vid);
                if (!added[star].count(merged)) {
                    chosen = std::move(merged);
                } else {
                    chosen.clear();
                    for (const Vehicle& v : zstar.vehicles) chosen.insert(v.id);
                }
            }

            Scenario partial;
            partial.id = zstar.id + "+a" + std::to_string(out.adversarial_iterations + 1);
            partial.weight = zstar.weight;
            for (const Vehicle& v : zstar.vehicles)
                if (chosen.count(v.id)) partial.vehicles.push_back(v);
            omega.push_back(std::move(partial));
            for (const std::string& vid : chosen) zpromoted.insert(vid);
            added[star].insert(chosen);
            ++out.adversarial_iterations;
        }
    }

    out.config = std::move(config);
    out.cost = out.config.total_cost;
    out.cuts = std::move(pool);
    {
        PhaseTimer timer(out, "evaluate");
        out.optimization_report =
            evaluate_feasibility(inst_, inst_.scenarios, out.config, cfg_.limits, &caches_);
    }
    return out;
}

SolveOutcome RobustSolver::solve() {
    if (cfg_.time_limit_seconds >= 0.0) {
        has_deadline_ = true;
        deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(cfg_.time_limit_seconds));
    }
    switch (cfg_.mode) {
        case Mode::Deterministic: {
            SolveOutcome out = solve_deterministic(cfg_.scenario_index);
            out.optimization_report = evaluate_feasibility(
                inst_, inst_.scenarios, out.config, cfg_.limits, &caches_);
            return out;
        }
        case Mode::FSA: return solve_fsa();
        case Mode::ASA: return solve_asa();
        case Mode::AVA: return solve_ava();
        case Mode::ISA: return solve_isa();
    }
    throw std::logic_error("unknown mode");
}

}  // namespace chargeplan::robust
