#include "chargeplan/ccp/cutting_plane.hpp"

#include <algorithm>
#include <set>

#include "chargeplan/lp/linear_program.hpp"

namespace chargeplan::ccp {

bool CoverCut::is_superset_of(const CoverCut& other) const {
    if (other.stations.size() > stations.size()) return false;
    return std::includes(stations.begin(), stations.end(), other.stations.begin(),
                         other.stations.end());
}

bool CutPool::add(CoverCut cut) {
    std::sort(cut.stations.begin(), cut.stations.end());
    cut.stations.erase(std::unique(cut.stations.begin(), cut.stations.end()),
                       cut.stations.end());
    for (const CoverCut& existing : cuts_)
        if (cut.is_superset_of(existing)) return false;  // dominated (or duplicate)
    std::erase_if(cuts_, [&](const CoverCut& existing) { return existing.is_superset_of(cut); });
    cuts_.push_back(std::move(cut));
    return true;
}

nlohmann::json CutPool::to_json(const Instance& inst) const {
    nlohmann::json doc;
    doc["format"] = "chargeplan-cuts";
    doc["version"] = 1;
    doc["covers"] = nlohmann::json::array();
    for (const CoverCut& c : cuts_) {
        nlohmann::json ids = nlohmann::json::array();
        for (int s : c.stations) ids.push_back(inst.stations[s].id);
        doc["covers"].push_back(std::move(ids));
    }
    return doc;
}

CutPool CutPool::from_json(const nlohmann::json& doc, const Instance& inst) {
    CutPool pool;
    for (const auto& jcover : doc.at("covers")) {
        CoverCut c;
        for (const auto& jid : jcover) {
            const int s = inst.find_station(jid.get<std::string>());
            if (s < 0)
                throw std::runtime_error("cut pool references unknown station '" +
                                         jid.get<std::string>() + "'");
            c.stations.push_back(s);
        }
        pool.add(std::move(c));
    }
    return pool;
}

StationConfiguration solve_ccp(const Instance& inst, const CutPool& pool) {
    const int n = (int)inst.stations.size();
    lp::LinearProgram program;
    for (int s = 0; s < n; ++s) program.add_variable(inst.stations[s].cost, 0.0, 1.0);
    for (const CoverCut& cut : pool.cuts()) {
        std::vector<std::pair<int, double>> coeffs;
        for (int s : cut.stations) coeffs.push_back({s, 1.0});
        program.add_row(lp::Sense::GreaterEqual, 1.0, std::move(coeffs));
    }
    lp::BinarySolution sol = lp::solve_binary(program);
    if (sol.status != lp::BinaryStatus::Optimal)
        throw std::runtime_error("first-stage program did not solve to optimality");
    std::vector<int> open;
    for (int s = 0; s < n; ++s)
        if (sol.values[s]) open.push_back(s);
    return StationConfiguration::from_open_set(inst, open);
}

std::vector<CoverCut> strengthen_cover(const CoverCut& cover, const CoverOracle& closing_infeasible,
                                       long budget_evaluations, std::mt19937_64& rng,
                                       const StrengthenOptions& opts) {
    std::vector<CoverCut> found{cover};
    std::set<std::vector<int>> seen{cover.stations};
    OracleStats used;

    auto draw_subset = [&rng](const std::vector<int>& from) {
        const int n = (int)from.size();
        const int lo = (n + 1) / 2;
        const int hi = n - 1;
        std::uniform_int_distribution<int> size_dist(lo, hi);
        const int k = size_dist(rng);
        std::vector<int> pool = from;
        for (int i = 0; i < k; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    };

    // Repeat draws cost no oracle work, so a separate draw cap keeps the
    // randomized descent from spinning once the subset space saturates.
    long draws = 0;
    const long draw_cap = 64 + 32 * budget_evaluations;
    while (used.scenario_evaluations < budget_evaluations && draws < draw_cap &&
           cover.stations.size() >= 2) {
        std::vector<int> current = cover.stations;
        while (current.size() >= 2 && used.scenario_evaluations < budget_evaluations &&
               draws < draw_cap) {
            bool descended = false;
            for (int attempt = 0; attempt <= opts.feasible_retries; ++attempt) {
                if (used.scenario_evaluations >= budget_evaluations || draws >= draw_cap) break;
                ++draws;
                std::vector<int> candidate = draw_subset(current);
                if (seen.count(candidate)) continue;  // no oracle cost for repeats
                seen.insert(candidate);
                if (closing_infeasible(candidate, used)) {
                    found.push_back(CoverCut{candidate});
                    current = std::move(candidate);
                    descended = true;
                    break;
                }
            }
            if (!descended) break;  // restart a fresh descent from the input cover
        }
    }

    // Keep only non-dominated covers.
    std::vector<CoverCut> pruned;
    for (const CoverCut& c : found) {
        bool dominated = false;
        for (const CoverCut& other : found) {
            if (&c == &other) continue;
            if (c.is_superset_of(other) && !(other.is_superset_of(c))) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            bool dup = false;
            for (const CoverCut& kept : pruned) dup |= kept.stations == c.stations;
            if (!dup) pruned.push_back(c);
        }
    }
    return pruned;
}

CuttingPlaneOutcome cutting_plane_solve(const Instance& inst, const AcceptanceOracle& accept,
                                        CutPool& pool, std::mt19937_64& rng,
                                        const StrengthenOptions& opts) {
    CuttingPlaneOutcome out;
    long last_iteration_evaluations = opts.min_budget_evaluations;

    while (true) {
        StationConfiguration config = solve_ccp(inst, pool);
        ++out.iterations;
        IterationTrace trace;
        trace.ccp_cost = config.total_cost;
        trace.incumbent_open = config.open_indices();

        OracleStats stats;
        const bool ok = accept(config, stats);
        trace.accepted = ok;
        if (ok) {
            out.trace.push_back(std::move(trace));
            out.config = std::move(config);
            return out;
        }

        CoverCut base;
        for (int s = 0; s < (int)inst.stations.size(); ++s)
            if (!config.opened[s]) base.stations.push_back(s);
        if (base.stations.empty()) {
            out.trace.push_back(std::move(trace));
            throw PreconditionInfeasible(
                "operationally infeasible even with every station open");
        }

        CoverOracle cover_oracle = [&](const std::vector<int>& closed, OracleStats& s2) {
            StationConfiguration candidate = StationConfiguration::all_open(inst);
            for (int s : closed) {
                candidate.opened[s] = false;
                candidate.total_cost -= inst.stations[s].cost;
            }
            return !accept(candidate, s2);
        };

        const long budget = std::max(opts.min_budget_evaluations, last_iteration_evaluations);
        std::vector<CoverCut> covers = strengthen_cover(base, cover_oracle, budget, rng, opts);
        for (CoverCut& c : covers)
            if (pool.add(c)) trace.added_cuts.push_back(c);
        last_iteration_evaluations = stats.scenario_evaluations;
        out.trace.push_back(std::move(trace));
    }
}

}  // namespace chargeplan::ccp
