// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Heavier fixtures than the unit tests; everything seeded.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chargeplan/bnp/search.hpp"
#include "chargeplan/ccp/cutting_plane.hpp"
#include "chargeplan/core/charging.hpp"
#include "chargeplan/core/instance_io.hpp"
#include "chargeplan/core/parallel.hpp"
#include "chargeplan/gen/generator.hpp"
#include "chargeplan/pricing/labeling.hpp"
#include "chargeplan/robust/framework.hpp"
#include "chargeplan/robust/report.hpp"
#include "oracles.hpp"

using namespace chargeplan;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

robust::RobustConfig run_config(robust::Mode mode, double alpha,
                                robust::SeedStrategy seed = robust::SeedStrategy::LowestCost) {
    robust::RobustConfig rc;
    rc.mode = mode;
    rc.alpha = alpha;
    rc.seed_strategy = seed;
    rc.run_seed = 20240817;
    return rc;
}

// Deterministic family of small instances whose all-open configuration is
// verified feasible by the assignment oracle.
std::vector<Instance> oracle_toys(int count, int n_scenarios, uint64_t salt) {
    std::vector<Instance> out;
    uint64_t seed = salt;
    while ((int)out.size() < count) {
        ++seed;
        oracles::ToyParams params;
        params.seed = seed;
        params.n_stations = 4 + (int)(seed % 3);        // 4..6
        params.n_vehicles = 3 + (int)((seed / 3) % 3);  // 3..5
        params.n_scenarios = n_scenarios;
        params.max_gaps = 2;
        params.charge_points = 1 + (int)(seed % 2);
        params.charge_need = 1.0;
        Instance inst = oracles::make_toy_instance(params);
        bool all_open_ok = true;
        for (const Scenario& z : inst.scenarios) {
            auto filtered = oracles::enumerate_configurations(inst, z);
            bool found = false;
            for (const auto& open : filtered.feasible)
                found = found || (int)open.size() == (int)inst.stations.size();
            all_open_ok = all_open_ok && found;
        }
        if (all_open_ok) out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------- C1 + C2

struct DeterministicRun {
    Instance inst;
    double solver_cost = 0.0;
    double oracle_cost = 0.0;
    std::vector<std::vector<int>> oracle_feasible;
    ccp::CutPool cuts;
    std::vector<ccp::IterationTrace> trace;
};

std::vector<DeterministicRun> g_det_runs;

bool criterion_oracle_optimality(std::string& detail) {
    const double t0 = now_seconds();
    g_det_runs.clear();
    int matched = 0;
    uint64_t seed = 9000;
    while ((int)g_det_runs.size() < 50) {
        ++seed;
        oracles::ToyParams params;
        params.seed = seed;
        params.n_stations = 4 + (int)(seed % 4);        // 4..7 stations
        params.n_vehicles = 3 + (int)((seed / 2) % 4);  // 3..6 vehicles
        params.n_scenarios = 1;
        params.max_gaps = 2;
        params.charge_points = 1 + (int)(seed % 2);
        params.charge_need = 1.05;
        DeterministicRun run;
        run.inst = oracles::make_toy_instance(params);

        oracles::ConfigEnumeration oracle =
            oracles::enumerate_configurations(run.inst, run.inst.scenarios[0]);
        bool all_open_ok = false;
        for (const auto& open : oracle.feasible)
            all_open_ok = all_open_ok || (int)open.size() == (int)run.inst.stations.size();
        if (!all_open_ok) continue;  // precondition of the deterministic solve

        auto cfg = run_config(robust::Mode::Deterministic, 1.0);
        cfg.scenario_index = 0;
        robust::RobustSolver solver(run.inst, cfg);
        robust::SolveOutcome out = solver.solve();

        run.solver_cost = out.cost;
        run.oracle_cost = oracle.best_cost;
        run.oracle_feasible = oracle.feasible;
        run.cuts = out.cuts;
        run.trace = out.ccp_trace;
        if (std::fabs(run.solver_cost - run.oracle_cost) < 1e-9) ++matched;
        g_det_runs.push_back(std::move(run));
    }
    const double elapsed = now_seconds() - t0;
    std::ostringstream os;
    os << matched << "/50 instances match exhaustive enumeration, " << (int)elapsed << " s";
    detail = os.str();
    return matched == 50 && elapsed < 600.0;
}

bool criterion_cut_soundness(std::string& detail) {
    if (g_det_runs.empty()) {
        detail = "no deterministic runs recorded";
        return false;
    }
    long cuts_checked = 0, iterations_checked = 0;
    for (const DeterministicRun& run : g_det_runs) {
        // No cut excludes an oracle-verified feasible configuration.
        for (const auto& open_set : run.oracle_feasible) {
            std::set<int> open(open_set.begin(), open_set.end());
            for (const ccp::CoverCut& cut : run.cuts.cuts()) {
                bool satisfied = false;
                for (int s : cut.stations) satisfied = satisfied || open.count(s);
                if (!satisfied) {
                    detail = "a cut excludes a feasible configuration";
                    return false;
                }
                ++cuts_checked;
            }
        }
        // Every rejected incumbent violates at least one cut added in its
        // own iteration.
        for (const ccp::IterationTrace& it : run.trace) {
            if (it.accepted) continue;
            ++iterations_checked;
            if (it.added_cuts.empty()) {
                detail = "rejected incumbent produced no cut";
                return false;
            }
            std::set<int> open(it.incumbent_open.begin(), it.incumbent_open.end());
            bool violated = false;
            for (const ccp::CoverCut& cut : it.added_cuts) {
                bool any_open = false;
                for (int s : cut.stations) any_open = any_open || open.count(s);
                violated = violated || !any_open;
            }
            if (!violated) {
                detail = "iteration incumbent does not violate its fresh cuts";
                return false;
            }
        }
    }
    std::ostringstream os;
    os << cuts_checked << " cut/configuration pairs, " << iterations_checked
       << " rejected iterations, zero violations";
    detail = os.str();
    return true;
}

// --------------------------------------------------------------------- C3

bool criterion_pricing_correctness(std::string& detail) {
    std::mt19937_64 rng(31415);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int networks = 0;
    while (networks < 200) {
        oracles::ToyParams params;
        params.seed = 500000 + networks;
        params.n_stations = networks % 5 == 0 ? 2 : 3;
        params.max_gaps = networks % 5 == 0 ? 4 : 2 + (networks % 2);
        params.n_vehicles = 1;
        params.charge_need = 0.9 + 0.3 * unit(rng);
        Instance inst = oracles::make_toy_instance(params);
        const Vehicle& v = inst.scenarios[0].vehicles[0];
        auto all = StationConfiguration::all_open(inst);

        tsn::DualPrices duals((int)inst.stations.size(), inst.horizon.periods);
        for (int s = 0; s < (int)inst.stations.size(); ++s)
            for (int t = 0; t < inst.horizon.periods; ++t)
                if (unit(rng) < 0.5) duals.set(s, t, unit(rng) * 2.0);
        const double rho = unit(rng) * 3.0;

        tsn::ExpandedNetwork net = tsn::build_network(inst, v, all, duals);
        pricing::PricingResult got = pricing::price_vehicle(net, inst, v, rho, -1);
        auto paths = oracles::enumerate_paths(net, inst, v);
        auto expect = oracles::pareto_filter(paths);

        if (got.feasible != !expect.empty() || got.end_labels.size() != expect.size()) {
            detail = "end-label set mismatch at network " + std::to_string(networks);
            return false;
        }
        for (size_t i = 0; i < expect.size(); ++i) {
            if (got.end_labels[i].cost != expect[i].cost ||
                std::fabs(got.end_labels[i].soc - expect[i].soc) > 1e-9) {
                detail = "end-label values mismatch at network " + std::to_string(networks);
                return false;
            }
        }
        std::vector<double> expect_rc;
        for (const auto& p : expect) {
            const double rc = -rho + p.cost;
            if (rc < -1e-6) expect_rc.push_back(rc);
        }
        std::sort(expect_rc.begin(), expect_rc.end());
        if (got.routes.size() != expect_rc.size()) {
            detail = "route count mismatch at network " + std::to_string(networks);
            return false;
        }
        for (size_t i = 0; i < got.routes.size(); ++i) {
            if (got.routes[i].reduced_cost != expect_rc[i]) {
                detail = "route reduced cost mismatch at network " + std::to_string(networks);
                return false;
            }
        }
        ++networks;
    }
    detail = "200 networks, end labels and priced routes identical";
    return true;
}

// --------------------------------------------------------------------- C4

bool criterion_charging_consistency(std::string& detail) {
    TechParams tech;
    tech.q_max_kwh = 40.0;
    tech.charge_power_kw = 50.0;
    tech.cc_cv_knee = 0.8;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double soc = tech.q_max_kwh * i / 100.0;
        for (int periods : {1, 2, 4}) {
            double q = soc;
            for (int p = 0; p < periods; ++p) q += charge_amount(q, tech, 1, 10);
            const double chained = q - soc;
            const double integrated = oracles::integrate_charge(soc, tech, periods, 10);
            worst = std::max(worst, std::fabs(chained - integrated));
        }
    }
    std::ostringstream os;
    os << "max deviation " << worst << " kWh over 100 start SOCs (limit "
       << 0.001 * tech.q_max_kwh << ")";
    detail = os.str();
    return worst < 0.001 * tech.q_max_kwh;
}

// ---------------------------------------------------------------- C5 + C6

std::vector<Instance> g_robust_toys;

bool criterion_mode_ordering(std::string& detail) {
    g_robust_toys = oracle_toys(20, 3, 770000);
    int ordered = 0, predicate_ok = 0;
    for (Instance& inst : g_robust_toys) {
        auto solve_mode = [&](robust::Mode mode, double alpha) {
            robust::RobustSolver solver(inst, run_config(mode, alpha));
            return solver.solve();
        };
        robust::SolveOutcome isa_l = solve_mode(robust::Mode::ISA, 1.0);
        robust::SolveOutcome ava95 = solve_mode(robust::Mode::AVA, 0.95);
        robust::SolveOutcome ava99 = solve_mode(robust::Mode::AVA, 0.99);
        robust::SolveOutcome fsa = solve_mode(robust::Mode::FSA, 1.0);
        robust::SolveOutcome asa50 = solve_mode(robust::Mode::ASA, 0.5);
        robust::SolveOutcome asa75 = solve_mode(robust::Mode::ASA, 0.75);

        const bool order = isa_l.cost <= ava95.cost + 1e-9 &&
                           ava95.cost <= ava99.cost + 1e-9 &&
                           ava99.cost <= fsa.cost + 1e-9 &&
                           asa50.cost <= asa75.cost + 1e-9 && asa75.cost <= fsa.cost + 1e-9;
        ordered += order ? 1 : 0;

        bool predicates = true;
        predicates &= robust::passes_mode_predicate(robust::Mode::ISA, 1.0,
                                                    isa_l.optimization_report);
        predicates &= robust::passes_mode_predicate(robust::Mode::AVA, 0.95,
                                                    ava95.optimization_report);
        predicates &= robust::passes_mode_predicate(robust::Mode::AVA, 0.99,
                                                    ava99.optimization_report);
        predicates &=
            robust::passes_mode_predicate(robust::Mode::FSA, 1.0, fsa.optimization_report);
        predicates &= robust::passes_mode_predicate(robust::Mode::ASA, 0.5,
                                                    asa50.optimization_report);
        predicates &= robust::passes_mode_predicate(robust::Mode::ASA, 0.75,
                                                    asa75.optimization_report);
        predicate_ok += predicates ? 1 : 0;
    }
    std::ostringstream os;
    os << ordered << "/20 toys ordered, " << predicate_ok << "/20 predicate re-checks";
    detail = os.str();
    return ordered == 20 && predicate_ok == 20;
}

bool criterion_alpha_guarantee(std::string& detail) {
    if (g_robust_toys.empty()) g_robust_toys = oracle_toys(20, 3, 770000);
    int runs = 0, held = 0;
    for (size_t i = 0; i < g_robust_toys.size(); i += 3) {
        Instance& inst = g_robust_toys[i];
        for (double alpha : {0.90, 0.95, 0.99}) {
            robust::RobustSolver solver(inst, run_config(robust::Mode::AVA, alpha));
            robust::SolveOutcome out = solver.solve();
            ++runs;
            if (out.optimization_report.min_vehicle_feasibility >= alpha - 1e-12) ++held;
        }
    }
    std::ostringstream os;
    os << held << "/" << runs << " aVA runs meet their alpha on the optimization set";
    detail = os.str();
    return runs > 0 && held == runs;
}

// --------------------------------------------------------------------- C7

bool criterion_validation_protocol(std::string& detail) {
    const double t0 = now_seconds();
    gen::GeneratorConfig cfg;
    cfg.rng_seed = 606;
    cfg.n_vehicles = 100;
    cfg.n_stations = 15;
    cfg.n_raw_sites = 215;
    cfg.n_scenarios = 8;

    Instance inst = gen::generate_instance(cfg, 0).instance;
    robust::RobustConfig rc = run_config(robust::Mode::AVA, 0.95);
    robust::RobustSolver solver(inst, rc);
    robust::SolveOutcome out = solver.solve();

    double min_vmin = 1.0;
    for (int variant = 1; variant <= 6; ++variant) {
        Instance oos = gen::generate_instance(cfg, variant).instance;
        robust::FeasibilityReport report = robust::evaluate_feasibility(
            oos, oos.scenarios,
            StationConfiguration::from_open_set(oos, out.config.open_indices()));
        min_vmin = std::min(min_vmin, report.min_vehicle_feasibility);
    }
    const double elapsed = now_seconds() - t0;
    std::ostringstream os;
    os << out.run_name << " cost " << out.cost << ", optimization V_min "
       << out.optimization_report.min_vehicle_feasibility << ", out-of-sample worst V_min "
       << min_vmin << ", " << (int)elapsed << " s";
    detail = os.str();
    return min_vmin >= 0.93 && out.optimization_report.min_vehicle_feasibility >= 0.95 &&
           elapsed < 1800.0;
}

// --------------------------------------------------------------------- C8

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

double regression_slope(const std::vector<std::pair<double, double>>& points) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = (double)points.size();
    for (auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool criterion_scaling_sanity(std::string& detail) {
    auto timed_det_solves = [&](int vehicles, int stations, uint64_t seed) {
        gen::GeneratorConfig cfg;
        cfg.rng_seed = seed;
        cfg.n_vehicles = vehicles;
        cfg.n_stations = stations;
        cfg.n_raw_sites = 60;
        cfg.n_scenarios = 3;
        Instance inst = gen::generate_instance(cfg).instance;
        std::vector<double> times;
        for (int z = 0; z < 3; ++z) {
            auto rc = run_config(robust::Mode::Deterministic, 1.0);
            rc.scenario_index = z;
            robust::RobustSolver solver(inst, rc);
            const double t0 = now_seconds();
            solver.solve();
            times.push_back(std::max(1e-4, now_seconds() - t0));
        }
        return median_of(times);
    };

    const std::vector<int> station_grid{5, 8, 11, 14};
    const std::vector<int> vehicle_grid{10, 18, 26, 34};
    std::vector<std::pair<double, double>> station_points, vehicle_points;
    std::vector<double> station_medians;
    for (int s : station_grid) {
        const double t = timed_det_solves(24, s, 8800 + s);
        station_medians.push_back(t);
        station_points.push_back({std::log((double)s / station_grid[0]), std::log(t)});
    }
    for (int v : vehicle_grid) {
        const double t = timed_det_solves(v, 8, 9900 + v);
        vehicle_points.push_back({std::log((double)v / vehicle_grid[0]), std::log(t)});
    }
    const double station_slope = regression_slope(station_points);
    const double vehicle_slope = regression_slope(vehicle_points);
    bool increasing = true;
    for (size_t i = 1; i < station_medians.size(); ++i)
        increasing = increasing && station_medians[i] > station_medians[i - 1];

    std::ostringstream os;
    os << "station slope " << station_slope << " vs vehicle slope " << vehicle_slope
       << ", station medians";
    for (double t : station_medians) os << " " << t;
    detail = os.str();
    return station_slope > vehicle_slope && increasing;
}

// --------------------------------------------------------------------- C9

bool criterion_solver_kernel(std::string& detail) {
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);

    int lp_checked = 0;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        // Mostly small programs; the larger ones lean on equality rows so
        // the vertex enumeration stays cheap.
        const bool big = trial % 10 == 0;
        const int n = big ? 8 + (int)(unit(rng) * 3) : 2 + (int)(unit(rng) * 5);
        const int m = big ? 8 + (int)(unit(rng) * 3) : 1 + (int)(unit(rng) * 5);
        lp::LinearProgram prog;
        for (int j = 0; j < n; ++j) prog.add_variable(coef(rng), 0.0, 1.0 + 9.0 * unit(rng));
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> coeffs;
            for (int j = 0; j < n; ++j)
                if (unit(rng) < 0.7) coeffs.push_back({j, coef(rng)});
            if (coeffs.empty()) coeffs.push_back({0, 1.0});
            lp::Sense sense;
            if (big) {
                sense = i < m / 2 ? lp::Sense::Equal
                                  : (unit(rng) < 0.5 ? lp::Sense::LessEqual
                                                     : lp::Sense::GreaterEqual);
            } else {
                const double pick = unit(rng);
                sense = pick < 0.45  ? lp::Sense::LessEqual
                        : pick < 0.9 ? lp::Sense::GreaterEqual
                                     : lp::Sense::Equal;
            }
            prog.add_row(sense, coef(rng), std::move(coeffs));
        }
        oracles::LpOracleResult expect = oracles::enumerate_lp(prog);
        lp::LpSolution sol = lp::solve_lp(prog);
        if (!expect.feasible) {
            if (sol.status != lp::LpStatus::Infeasible) {
                detail = "feasibility disagreement on LP " + std::to_string(trial);
                return false;
            }
            continue;
        }
        if (sol.status != lp::LpStatus::Optimal) {
            detail = "LP " + std::to_string(trial) + " not solved to optimality";
            return false;
        }
        const double gap = std::fabs(sol.objective - expect.objective) /
                           (1.0 + std::fabs(expect.objective));
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-6) {
            detail = "objective mismatch on LP " + std::to_string(trial);
            return false;
        }
        // Strong duality residual from the returned duals.
        std::vector<double> rc(prog.objective);
        for (int i = 0; i < prog.num_rows(); ++i)
            for (auto& [j, a] : prog.rows[i].coeffs) rc[j] -= sol.duals[i] * a;
        double dual_obj = 0.0;
        for (int i = 0; i < prog.num_rows(); ++i) dual_obj += sol.duals[i] * prog.rows[i].rhs;
        for (int j = 0; j < n; ++j) {
            if (rc[j] > 0.0) dual_obj += rc[j] * prog.lower[j];
            else dual_obj += rc[j] * prog.upper[j];
        }
        if (std::fabs(dual_obj - sol.objective) > 1e-6 * (1.0 + std::fabs(sol.objective))) {
            detail = "strong duality residual too large on LP " + std::to_string(trial);
            return false;
        }
        ++lp_checked;
    }

    int bin_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 4 + (int)(unit(rng) * 12);  // up to 15 variables
        lp::LinearProgram prog;
        for (int j = 0; j < n; ++j) prog.add_variable(coef(rng), 0.0, 1.0);
        const int m = 1 + (int)(unit(rng) * 6);
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> coeffs;
            for (int j = 0; j < n; ++j)
                if (unit(rng) < 0.5) coeffs.push_back({j, std::round(coef(rng))});
            if (coeffs.empty()) coeffs.push_back({0, 1.0});
            const double pick = unit(rng);
            lp::Sense sense = pick < 0.6   ? lp::Sense::LessEqual
                              : pick < 0.9 ? lp::Sense::GreaterEqual
                                           : lp::Sense::Equal;
            prog.add_row(sense, std::round(coef(rng)), std::move(coeffs));
        }
        oracles::BinaryOracleResult expect = oracles::enumerate_binary(prog);
        lp::BinarySolution sol = lp::solve_binary(prog);
        if (!expect.feasible) {
            if (sol.status != lp::BinaryStatus::Infeasible) {
                detail = "binary feasibility disagreement on instance " + std::to_string(trial);
                return false;
            }
            continue;
        }
        if (sol.status != lp::BinaryStatus::Optimal ||
            std::fabs(sol.objective - expect.objective) > 1e-9) {
            detail = "binary optimum mismatch on instance " + std::to_string(trial);
            return false;
        }
        ++bin_checked;
    }
    std::ostringstream os;
    os << lp_checked << " feasible LPs (worst relative gap " << worst_gap << "), " << bin_checked
       << " feasible binary programs";
    detail = os.str();
    return true;
}

// -------------------------------------------------------------------- C10

bool run_command(const std::string& cmd) { return std::system(cmd.c_str()) == 0; }

bool criterion_determinism(std::string& detail) {
#ifndef CHARGEPLAN_CLI_PATH
    detail = "CLI path not configured";
    return false;
#else
    const std::string cli = CHARGEPLAN_CLI_PATH;
    fs::path base = fs::temp_directory_path() / "chargeplan_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    gen::GeneratorConfig cfg;
    cfg.rng_seed = 99;
    cfg.n_vehicles = 8;
    cfg.n_stations = 5;
    cfg.n_raw_sites = 40;
    cfg.n_scenarios = 3;
    write_text_file((base / "gen.json").string(), cfg.to_json().dump(2) + "\n");

    for (const std::string run : {"a", "b"}) {
        fs::path dir = base / run;
        fs::create_directories(dir);
        std::ostringstream gen_cmd;
        gen_cmd << cli << " generate --config " << (base / "gen.json") << " --out "
                << (dir / "instance.json") << " --out-of-sample 1 > /dev/null";
        if (!run_command(gen_cmd.str())) {
            detail = "generate command failed";
            return false;
        }
        std::ostringstream solve_cmd;
        solve_cmd << cli << " solve --instance " << (dir / "instance.json")
                  << " --mode ava --alpha 0.9 --seed-strategy l --seed 5 --out-dir " << dir
                  << " > /dev/null";
        if (!run_command(solve_cmd.str())) {
            detail = "solve command failed";
            return false;
        }
        std::ostringstream val_cmd;
        val_cmd << cli << " validate --solution " << (dir / "90-VA-L.solution.json")
                << " --sets " << (dir / "instance.json") << " " << (dir / "instance-oos1.json")
                << " --out " << (dir / "validation.json") << " > /dev/null";
        // Validation may exit 5 when a set misses alpha; both runs must agree.
        std::system(val_cmd.str().c_str());
    }

    for (const std::string file :
         {"instance.json", "instance.json.provenance.json", "instance-oos1.json",
          "90-VA-L.solution.json", "90-VA-L.report.json", "90-VA-L.cuts.json",
          "validation.json"}) {
        const std::string a = read_text_file((base / "a" / file).string());
        const std::string b = read_text_file((base / "b" / file).string());
        if (a != b) {
            detail = "artifact differs between reruns: " + file;
            return false;
        }
    }
    detail = "generate/solve/validate artifacts byte-identical across reruns";
    return true;
#endif
}

}  // namespace

int main() {
    set_worker_count(hardware_worker_default());
    std::vector<Criterion> criteria{
        {"C1 oracle-optimality", criterion_oracle_optimality},
        {"C2 cut-soundness", criterion_cut_soundness},
        {"C3 pricing-correctness", criterion_pricing_correctness},
        {"C4 charging-ref-consistency", criterion_charging_consistency},
        {"C5 robust-mode-ordering", criterion_mode_ordering},
        {"C6 alpha-guarantee", criterion_alpha_guarantee},
        {"C7 validation-protocol", criterion_validation_protocol},
        {"C8 scaling-sanity", criterion_scaling_sanity},
        {"C9 solver-kernel", criterion_solver_kernel},
        {"C10 determinism", criterion_determinism},
    };

    int failures = 0;
    for (auto& c : criteria) {
        const double t0 = now_seconds();
        std::string detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = now_seconds() - t0;
        std::printf("[%s] %s (%.1f s) %s\n", c.name.c_str(), pass ? "PASS" : "FAIL", secs,
                    detail.c_str());
        std::fflush(stdout);
        failures += pass ? 0 : 1;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
