#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "chargeplan/core/charging.hpp"
#include "chargeplan/pricing/labeling.hpp"

namespace oracles {

double integrate_charge(double soc_kwh, const TechParams& tech, int duration_periods,
                        int period_minutes) {
    // Local re-statement of the CC-CV power curve, integrated with 1 s steps.
    const double q_max = tech.q_max_kwh;
    const double knee = tech.cc_cv_knee * q_max;
    auto power = [&](double q) {
        if (q >= q_max) return 0.0;
        if (q < knee || tech.cc_cv_knee >= 1.0) return tech.charge_power_kw;
        return tech.charge_power_kw * (q_max - q) / (q_max - knee);
    };
    double q = std::clamp(soc_kwh, 0.0, q_max);
    const double start = q;
    const long steps = (long)duration_periods * period_minutes * 60;
    const double dt_hours = 1.0 / 3600.0;
    for (long i = 0; i < steps; ++i) q = std::min(q_max, q + power(q) * dt_hours);
    return q - start;
}

namespace {

// Gaussian elimination with partial pivoting; false when singular.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
    const int n = (int)b.size();
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        double best = 1e-9;
        for (int r = col; r < n; ++r)
            if (std::fabs(a[r][col]) > best) {
                best = std::fabs(a[r][col]);
                piv = r;
            }
        if (piv < 0) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double f = a[r][col] / a[col][col];
            for (int k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

}  // namespace

LpOracleResult enumerate_lp(const lp::LinearProgram& lp) {
    const int n = lp.num_vars();
    for (int j = 0; j < n; ++j)
        if (!std::isfinite(lp.upper[j]))
            throw std::invalid_argument("lp oracle needs boxed variables");

    // Constraint list: rows, then x_j >= lb_j, then x_j <= ub_j. A vertex
    // activates n independent constraints including every equality row.
    struct Constraint {
        std::vector<double> a;
        double rhs;
        lp::Sense sense;
    };
    std::vector<Constraint> cons;
    for (const auto& row : lp.rows) {
        Constraint c{std::vector<double>(n, 0.0), row.rhs, row.sense};
        for (auto& [j, v] : row.coeffs) c.a[j] += v;
        cons.push_back(std::move(c));
    }
    for (int j = 0; j < n; ++j) {
        Constraint c{std::vector<double>(n, 0.0), lp.lower[j], lp::Sense::GreaterEqual};
        c.a[j] = 1.0;
        cons.push_back(std::move(c));
    }
    for (int j = 0; j < n; ++j) {
        Constraint c{std::vector<double>(n, 0.0), lp.upper[j], lp::Sense::LessEqual};
        c.a[j] = 1.0;
        cons.push_back(std::move(c));
    }

    std::vector<int> mandatory;
    std::vector<int> optional;
    for (int i = 0; i < (int)cons.size(); ++i) {
        if (cons[i].sense == lp::Sense::Equal) mandatory.push_back(i);
        else optional.push_back(i);
    }
    if ((int)mandatory.size() > n) return {};

    LpOracleResult result;
    result.bounded = true;
    double best = std::numeric_limits<double>::infinity();

    const int need = n - (int)mandatory.size();
    std::vector<int> pick(need, 0);
    std::function<void(int, int)> recurse = [&](int start, int depth) {
        if (depth == need) {
            std::vector<std::vector<double>> A;
            std::vector<double> b;
            for (int i : mandatory) {
                A.push_back(cons[i].a);
                b.push_back(cons[i].rhs);
            }
            for (int k = 0; k < need; ++k) {
                A.push_back(cons[pick[k]].a);
                b.push_back(cons[pick[k]].rhs);
            }
            std::vector<double> x;
            if (!solve_linear(A, b, x)) return;
            for (const Constraint& c : cons) {
                double lhs = 0.0;
                for (int j = 0; j < n; ++j) lhs += c.a[j] * x[j];
                const double tol = 1e-7 * (1.0 + std::fabs(c.rhs));
                switch (c.sense) {
                    case lp::Sense::LessEqual:
                        if (lhs > c.rhs + tol) return;
                        break;
                    case lp::Sense::GreaterEqual:
                        if (lhs < c.rhs - tol) return;
                        break;
                    case lp::Sense::Equal:
                        if (std::fabs(lhs - c.rhs) > tol) return;
                        break;
                }
            }
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
            result.feasible = true;
            best = std::min(best, obj);
            return;
        }
        for (int i = start; i < (int)optional.size(); ++i) {
            pick[depth] = optional[i];
            recurse(i + 1, depth + 1);
        }
    };
    recurse(0, 0);
    result.objective = result.feasible ? best : 0.0;
    return result;
}

BinaryOracleResult enumerate_binary(const lp::LinearProgram& lp) {
    const int n = lp.num_vars();
    if (n > 24) throw std::invalid_argument("binary oracle limited to 24 variables");
    BinaryOracleResult result;
    double best = std::numeric_limits<double>::infinity();
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool ok = true;
        for (int j = 0; j < n && ok; ++j) {
            const int v = (mask >> j) & 1u;
            if (v < lp.lower[j] - 1e-9) ok = false;
            if (std::isfinite(lp.upper[j]) && v > lp.upper[j] + 1e-9) ok = false;
        }
        for (const auto& row : lp.rows) {
            if (!ok) break;
            double lhs = 0.0;
            for (auto& [j, a] : row.coeffs) lhs += a * ((mask >> j) & 1u);
            switch (row.sense) {
                case lp::Sense::LessEqual: ok = lhs <= row.rhs + 1e-9; break;
                case lp::Sense::GreaterEqual: ok = lhs >= row.rhs - 1e-9; break;
                case lp::Sense::Equal: ok = std::fabs(lhs - row.rhs) <= 1e-9; break;
            }
        }
        if (!ok) continue;
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += lp.objective[j] * ((mask >> j) & 1u);
        if (!result.feasible || obj < best - 1e-12) {
            result.feasible = true;
            best = obj;
            result.values.assign(n, 0);
            for (int j = 0; j < n; ++j) result.values[j] = (mask >> j) & 1u;
        }
    }
    result.objective = result.feasible ? best : 0.0;
    return result;
}

std::vector<OraclePath> enumerate_paths(const tsn::ExpandedNetwork& net, const Instance& inst,
                                        const Vehicle& vehicle) {
    std::vector<OraclePath> out;
    if (net.source < 0) return out;
    std::vector<int> path{net.source};

    std::function<void(int, double, double)> dfs = [&](int v, double cost, double soc) {
        if (out.size() > 2000000) throw std::runtime_error("oracle path explosion");
        if (v == net.sink) {
            if (soc >= vehicle.q_end_kwh - 1e-9) {
                OraclePath p;
                p.vertices = path;
                p.cost = cost;
                p.soc = soc;
                for (int u : path) {
                    const tsn::Vertex& vx = net.vertices[u];
                    if (vx.charges) p.footprint.push_back({vx.station, vx.period});
                }
                out.push_back(std::move(p));
            }
            return;
        }
        for (int ai = net.first_arc[v]; ai < net.first_arc[v + 1]; ++ai) {
            const tsn::Arc& arc = net.arcs[ai];
            const tsn::Vertex& tail = net.vertices[v];
            double next_soc = soc;
            double next_cost = cost + tail.price;
            if (tail.charges)
                next_soc = std::min(
                    inst.tech.q_max_kwh,
                    next_soc + charge_amount(next_soc, inst.tech, 1, inst.horizon.period_minutes));
            next_soc -= arc.range_cost;
            if (next_soc < inst.tech.q_min_kwh - 1e-9) continue;
            path.push_back(arc.to);
            dfs(arc.to, next_cost, next_soc);
            path.pop_back();
        }
    };
    dfs(net.source, 0.0, vehicle.q_begin_kwh);
    return out;
}

std::vector<OraclePath> pareto_filter(std::vector<OraclePath> paths) {
    std::stable_sort(paths.begin(), paths.end(), [](const OraclePath& a, const OraclePath& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.soc > b.soc;
    });
    std::vector<OraclePath> kept;
    double best_soc = -std::numeric_limits<double>::infinity();
    for (auto& p : paths) {
        if (p.soc > best_soc) {
            best_soc = p.soc;
            kept.push_back(std::move(p));
        }
    }
    return kept;
}

bool oracle_vehicle_feasible(const Instance& inst, const Vehicle& vehicle,
                             const StationConfiguration& config) {
    tsn::DualPrices zero;
    tsn::ExpandedNetwork net = tsn::build_network(inst, vehicle, config, zero);
    return !enumerate_paths(net, inst, vehicle).empty();
}

bool oracle_max_soc_feasible(const Instance& inst, const Vehicle& vehicle,
                             const StationConfiguration& config) {
    tsn::DualPrices zero;
    tsn::ExpandedNetwork net = tsn::build_network(inst, vehicle, config, zero);
    if (net.source < 0) return false;
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> best(net.vertices.size(), ninf);
    best[net.source] = vehicle.q_begin_kwh;
    for (int v = 0; v < (int)net.vertices.size(); ++v) {
        if (best[v] == ninf) continue;
        double departing = best[v];
        if (net.vertices[v].charges)
            departing = std::min(
                inst.tech.q_max_kwh,
                departing + charge_amount(departing, inst.tech, 1, inst.horizon.period_minutes));
        for (int ai = net.first_arc[v]; ai < net.first_arc[v + 1]; ++ai) {
            const double arrived = departing - net.arcs[ai].range_cost;
            if (arrived < inst.tech.q_min_kwh - 1e-9) continue;
            best[net.arcs[ai].to] = std::max(best[net.arcs[ai].to], arrived);
        }
    }
    return best[net.sink] >= vehicle.q_end_kwh - 1e-9;
}

std::vector<OraclePath> all_open_routes(const Instance& inst, const Vehicle& vehicle) {
    tsn::DualPrices zero;
    StationConfiguration all_open = StationConfiguration::all_open(inst);
    tsn::ExpandedNetwork net = tsn::build_network(inst, vehicle, all_open, zero);
    return enumerate_paths(net, inst, vehicle);
}

namespace {

bool fits(const std::map<std::pair<int, int>, int>& usage, const OraclePath& route,
          const Instance& inst) {
    for (const auto& st : route.footprint) {
        auto it = usage.find(st);
        const int used = it == usage.end() ? 0 : it->second;
        if (used + 1 > inst.stations[st.first].charge_points) return false;
    }
    return true;
}

void apply(std::map<std::pair<int, int>, int>& usage, const OraclePath& route, int delta) {
    for (const auto& st : route.footprint) usage[st] += delta;
}

}  // namespace

bool assignment_exists(const Instance& inst,
                       const std::vector<std::vector<const OraclePath*>>& routes_per_vehicle) {
    std::map<std::pair<int, int>, int> usage;
    std::function<bool(int)> rec = [&](int v) {
        if (v == (int)routes_per_vehicle.size()) return true;
        for (const OraclePath* r : routes_per_vehicle[v]) {
            if (!fits(usage, *r, inst)) continue;
            apply(usage, *r, 1);
            if (rec(v + 1)) return true;
            apply(usage, *r, -1);
        }
        return false;
    };
    return rec(0);
}

int max_assignment(const Instance& inst,
                   const std::vector<std::vector<const OraclePath*>>& routes_per_vehicle) {
    const int n = (int)routes_per_vehicle.size();
    std::map<std::pair<int, int>, int> usage;
    int best = 0;
    std::function<void(int, int)> rec = [&](int v, int count) {
        best = std::max(best, count);
        if (v == n || count + (n - v) <= best) return;
        for (const OraclePath* r : routes_per_vehicle[v]) {
            if (!fits(usage, *r, inst)) continue;
            apply(usage, *r, 1);
            rec(v + 1, count + 1);
            apply(usage, *r, -1);
        }
        rec(v + 1, count);  // vehicle dropped
    };
    rec(0, 0);
    return best;
}

namespace {

std::vector<std::vector<const OraclePath*>> filter_routes(
    const std::vector<std::vector<OraclePath>>& all_routes, const std::vector<char>& open) {
    std::vector<std::vector<const OraclePath*>> filtered(all_routes.size());
    for (size_t v = 0; v < all_routes.size(); ++v) {
        for (const OraclePath& r : all_routes[v]) {
            bool ok = true;
            for (const auto& st : r.footprint) ok = ok && open[st.first];
            if (ok) filtered[v].push_back(&r);
        }
    }
    return filtered;
}

}  // namespace

ConfigEnumeration enumerate_configurations(const Instance& inst, const Scenario& scenario) {
    const int n = (int)inst.stations.size();
    std::vector<std::vector<OraclePath>> routes;
    for (const Vehicle& v : scenario.vehicles) routes.push_back(all_open_routes(inst, v));

    ConfigEnumeration out;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<char> open(n, 0);
        std::vector<int> open_list;
        double cost = 0.0;
        for (int s = 0; s < n; ++s) {
            if ((mask >> s) & 1u) {
                open[s] = 1;
                open_list.push_back(s);
                cost += inst.stations[s].cost;
            }
        }
        auto filtered = filter_routes(routes, open);
        bool any_empty = false;
        for (const auto& f : filtered) any_empty = any_empty || f.empty();
        if (any_empty || !assignment_exists(inst, filtered)) continue;
        out.feasible.push_back(open_list);
        if (out.best_cost < 0.0 || cost < out.best_cost - 1e-9) {
            out.best_cost = cost;
            out.best_open = open_list;
        }
    }
    return out;
}

ConfigEnumeration enumerate_configurations_all(const Instance& inst) {
    const int n = (int)inst.stations.size();
    std::vector<std::vector<std::vector<OraclePath>>> routes(inst.scenarios.size());
    for (size_t z = 0; z < inst.scenarios.size(); ++z)
        for (const Vehicle& v : inst.scenarios[z].vehicles)
            routes[z].push_back(all_open_routes(inst, v));

    ConfigEnumeration out;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<char> open(n, 0);
        std::vector<int> open_list;
        double cost = 0.0;
        for (int s = 0; s < n; ++s) {
            if ((mask >> s) & 1u) {
                open[s] = 1;
                open_list.push_back(s);
                cost += inst.stations[s].cost;
            }
        }
        bool all_ok = true;
        for (size_t z = 0; z < inst.scenarios.size() && all_ok; ++z) {
            auto filtered = filter_routes(routes[z], open);
            for (const auto& f : filtered) all_ok = all_ok && !f.empty();
            all_ok = all_ok && assignment_exists(inst, filtered);
        }
        if (!all_ok) continue;
        out.feasible.push_back(open_list);
        if (out.best_cost < 0.0 || cost < out.best_cost - 1e-9) {
            out.best_cost = cost;
            out.best_open = open_list;
        }
    }
    return out;
}

int oracle_max_feasible(const Instance& inst, const Scenario& scenario,
                        const StationConfiguration& config) {
    std::vector<std::vector<OraclePath>> routes;
    for (const Vehicle& v : scenario.vehicles) routes.push_back(all_open_routes(inst, v));
    std::vector<char> open(inst.stations.size(), 0);
    for (int s = 0; s < (int)inst.stations.size(); ++s) open[s] = config.is_open(s) ? 1 : 0;
    return max_assignment(inst, filter_routes(routes, open));
}

Instance make_toy_instance(const ToyParams& params) {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Instance inst;
    inst.horizon = {48, 10};  // 8 hours
    inst.tech.q_max_kwh = 12.0;
    inst.tech.q_min_kwh = 0.0;
    inst.tech.charge_power_kw = 30.0;
    inst.tech.consumption_kwh_per_km = 0.2;
    inst.tech.cc_cv_knee = 0.8;

    for (int s = 0; s < params.n_stations; ++s) {
        Station st;
        st.id = "s" + std::to_string(s + 1);
        st.location = {unit(rng) * 10.0 - 5.0, unit(rng) * 10.0 - 5.0};
        st.cost = 5.0 + std::floor(unit(rng) * 45.0);
        st.charge_points = params.charge_points;
        inst.stations.push_back(std::move(st));
    }
    inst.rebuild_station_index();
    StationConfiguration all_open = StationConfiguration::all_open(inst);

    for (int z = 0; z < params.n_scenarios; ++z) {
        Scenario scenario;
        scenario.id = "z" + std::to_string(z + 1);
        scenario.weight = 1.0 / params.n_scenarios;
        for (int v = 0; v < params.n_vehicles; ++v) {
            Vehicle vehicle;
            vehicle.id = scenario.id + "-v" + std::to_string(v + 1);
            for (int attempt = 0; attempt < 60; ++attempt) {
                vehicle.trips.clear();
                vehicle.gaps.clear();
                vehicle.q_begin_kwh = 6.0;
                vehicle.q_end_kwh = 6.0;
                const double scale = params.charge_need * (1.0 - 0.1 * (attempt / 10));
                const int trips = 2 + (int)(unit(rng) * params.max_gaps);
                int now = (int)(unit(rng) * 6) * 10;
                for (int t = 0; t < trips; ++t) {
                    Trip trip;
                    trip.pickup = {unit(rng) * 8.0 - 4.0, unit(rng) * 8.0 - 4.0};
                    trip.dropoff = {unit(rng) * 8.0 - 4.0, unit(rng) * 8.0 - 4.0};
                    trip.start_minute = now;
                    trip.end_minute = now + 20 + (int)(unit(rng) * 21);
                    trip.energy_kwh = (1.5 + unit(rng) * 2.0) * scale;
                    trip.distance_km = trip.energy_kwh / inst.tech.consumption_kwh_per_km;
                    now = trip.end_minute + 25 + (int)(unit(rng) * 31);
                    vehicle.trips.push_back(std::move(trip));
                }
                for (int g = 0; g + 1 < trips; ++g) {
                    IdleGap gap;
                    gap.after_trip = g;
                    gap.direct_minutes = 5 + (int)(unit(rng) * 6);
                    gap.direct_energy_kwh = (0.05 + unit(rng) * 0.25) * scale;
                    gap.direct_distance_km = gap.direct_energy_kwh / inst.tech.consumption_kwh_per_km;
                    for (int s = 0; s < params.n_stations; ++s) {
                        GapStationAccess a;
                        a.station = s;
                        a.travel_in_minutes = (int)(unit(rng) * 19.0);
                        a.travel_out_minutes = (int)(unit(rng) * 19.0);
                        a.energy_in_kwh = (0.1 + unit(rng) * 0.5) * scale;
                        a.energy_out_kwh = (0.1 + unit(rng) * 0.5) * scale;
                        a.distance_in_km = a.energy_in_kwh / inst.tech.consumption_kwh_per_km;
                        a.distance_out_km = a.energy_out_kwh / inst.tech.consumption_kwh_per_km;
                        const int lo = inst.horizon.ceil_period(vehicle.trips[g].end_minute) +
                                       inst.horizon.ceil_period(a.travel_in_minutes);
                        const int hi =
                            inst.horizon.floor_period(vehicle.trips[g + 1].start_minute) -
                            inst.horizon.ceil_period(a.travel_out_minutes) - 1;
                        if (lo <= hi) gap.stations.push_back(a);
                    }
                    vehicle.gaps.push_back(std::move(gap));
                }
                if (pricing::vehicle_feasible(inst, vehicle, all_open)) break;
            }
            // Last resort: relax the end requirement so the fixture keeps
            // its all-open feasibility guarantee.
            if (!pricing::vehicle_feasible(inst, vehicle, all_open)) vehicle.q_end_kwh = 0.5;
            scenario.vehicles.push_back(std::move(vehicle));
        }
        inst.scenarios.push_back(std::move(scenario));
    }
    return inst;
}

}  // namespace oracles
