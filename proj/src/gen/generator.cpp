#include "chargeplan/gen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "chargeplan/pricing/labeling.hpp"

namespace chargeplan::gen {

namespace {

constexpr uint64_t kSiteSalt = 0x9e3779b97f4a7c15ull;
constexpr uint64_t kKmeansSalt = 0xbf58476d1ce4e5b9ull;
constexpr uint64_t kDemandSalt = 0x94d049bb133111ebull;
constexpr int kStartBinMinutes = 240;  // 4-hour strata
constexpr int kDayGroups = 7;
constexpr int kMinShiftMinutes = 300;

Point random_point_in_disc(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * M_PI * unit(rng);
    return {r * std::cos(theta), r * std::sin(theta)};
}

int travel_minutes(double road_km, double speed_kmh) {
    return (int)std::ceil(road_km / speed_kmh * 60.0 - 1e-9);
}

}  // namespace

double station_cost(double normalized_distance) {
    if (normalized_distance < 0.0 || normalized_distance > 1.0)
        throw std::invalid_argument("normalized distance must lie in [0, 1]");
    return 30.0 * std::exp(-10.0 * normalized_distance) - 10.0 * normalized_distance + 20.0;
}

std::vector<Station> select_station_sites(const std::vector<Point>& raw_sites, int k,
                                          double city_radius_km, int charge_points,
                                          std::mt19937_64& rng) {
    const int n = (int)raw_sites.size();
    if (k > n) throw std::invalid_argument("requested more stations than raw sites");
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // k-means++ seeding.
    std::vector<Point> centroids;
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    centroids.push_back(raw_sites[(size_t)(unit(rng) * n) % n]);
    while ((int)centroids.size() < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = euclidean_km(raw_sites[i], centroids.back());
            d2[i] = std::min(d2[i], d * d);
            total += d2[i];
        }
        double pick = unit(rng) * total;
        int chosen = n - 1;
        for (int i = 0; i < n; ++i) {
            pick -= d2[i];
            if (pick <= 0.0) {
                chosen = i;
                break;
            }
        }
        centroids.push_back(raw_sites[chosen]);
    }

    // Lloyd iterations.
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 60; ++iter) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = euclidean_km(raw_sites[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                moved = true;
            }
        }
        for (int c = 0; c < k; ++c) {
            double sx = 0.0, sy = 0.0;
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                sx += raw_sites[i].x_km;
                sy += raw_sites[i].y_km;
                ++count;
            }
            if (count > 0) centroids[c] = {sx / count, sy / count};
        }
        if (!moved) break;
    }

    // Each centroid takes the nearest unused raw site.
    std::vector<char> used(n, 0);
    std::vector<Station> stations;
    for (int c = 0; c < k; ++c) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double d = euclidean_km(raw_sites[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        used[best] = 1;
        Station s;
        s.location = raw_sites[best];
        const double dist = std::min(1.0, euclidean_km(s.location, {0.0, 0.0}) / city_radius_km);
        s.cost = station_cost(dist);
        s.charge_points = charge_points;
        stations.push_back(std::move(s));
    }
    // Stable ids by site position, west to east.
    std::sort(stations.begin(), stations.end(), [](const Station& a, const Station& b) {
        if (a.location.x_km != b.location.x_km) return a.location.x_km < b.location.x_km;
        return a.location.y_km < b.location.y_km;
    });
    for (int i = 0; i < (int)stations.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "s%02d", i + 1);
        stations[i].id = buf;
    }
    return stations;
}

ShiftStats pool_statistics(const std::vector<PoolShift>& pool) {
    ShiftStats stats;
    if (pool.empty()) return stats;
    std::vector<double> hours;
    double trips = 0.0, km = 0.0;
    for (const PoolShift& p : pool) {
        hours.push_back(p.duration_minutes / 60.0);
        trips += p.trip_count;
        km += p.distance_km;
    }
    std::sort(hours.begin(), hours.end());
    stats.median_shift_hours = hours[(hours.size() - 1) / 2];
    stats.mean_trips_per_shift = trips / pool.size();
    stats.mean_distance_km = km / pool.size();
    return stats;
}

std::vector<int> sample_scenario_shifts(const std::vector<PoolShift>& pool, int n_vehicles,
                                        std::mt19937_64& rng) {
    const int num_strata = 24 * 60 / kStartBinMinutes;
    std::vector<std::vector<int>> strata(num_strata);
    for (int i = 0; i < (int)pool.size(); ++i) {
        if (pool[i].duration_minutes < kMinShiftMinutes) continue;  // sub-5h shifts excluded
        strata[pool[i].start_minute / kStartBinMinutes].push_back(i);
    }
    int usable = 0;
    for (const auto& s : strata) usable += (int)s.size();
    if (usable == 0) throw std::runtime_error("shift pool is empty after the 5-hour filter");

    // Proportional quotas with largest-remainder rounding.
    std::vector<int> quota(num_strata, 0);
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (int b = 0; b < num_strata; ++b) {
        const double share = (double)strata[b].size() / usable * n_vehicles;
        quota[b] = (int)std::floor(share);
        assigned += quota[b];
        remainders.push_back({-(share - quota[b]), b});
    }
    std::sort(remainders.begin(), remainders.end());
    for (int i = 0; assigned < n_vehicles; ++i) {
        quota[remainders[i % num_strata].second] += 1;
        ++assigned;
    }

    std::vector<int> picked;
    for (int b = 0; b < num_strata; ++b) {
        if (quota[b] == 0) continue;
        if ((int)strata[b].size() < quota[b])
            throw std::runtime_error("stratum " + std::to_string(b) +
                                     " cannot fill its proportional quota");
        std::vector<int> candidates = strata[b];
        for (int i = 0; i < quota[b]; ++i) {
            std::uniform_int_distribution<int> pick(i, (int)candidates.size() - 1);
            std::swap(candidates[i], candidates[pick(rng)]);
            picked.push_back(candidates[i]);
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

namespace {

struct CityModel {
    const GeneratorConfig& cfg;
    std::vector<Station> stations;

    double road_km(const Point& a, const Point& b) const {
        return euclidean_km(a, b) * cfg.detour_factor;
    }
    int minutes(const Point& a, const Point& b) const {
        return travel_minutes(road_km(a, b), cfg.speed_kmh);
    }
    double energy(const Point& a, const Point& b) const {
        return road_km(a, b) * cfg.tech.consumption_kwh_per_km;
    }
};

// Builds the trip sequence of one shift. Trips stay inside the shift span;
// the next pickup is always reachable within the drawn idle gap.
std::vector<Trip> build_trips(const CityModel& city, int start_minute, int duration_minutes,
                              std::mt19937_64& rng) {
    const GeneratorConfig& cfg = city.cfg;
    std::lognormal_distribution<double> trip_km(cfg.trip_km_log_mean, cfg.trip_km_log_std);
    std::lognormal_distribution<double> gap_minutes(cfg.gap_minutes_log_mean,
                                                    cfg.gap_minutes_log_std);
    std::lognormal_distribution<double> break_minutes(cfg.long_break_log_mean,
                                                      cfg.long_break_log_std);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Trip> trips;
    const int shift_end = start_minute + duration_minutes;
    int now = start_minute;
    Point at = random_point_in_disc(rng, cfg.city_radius_km);
    while (true) {
        const double dist = std::clamp(trip_km(rng), 1.0, 4.0 * cfg.city_radius_km);
        const int drive = travel_minutes(dist, cfg.speed_kmh);
        if (now + drive > shift_end) break;
        // Drop-off at the drawn road distance, kept inside the city disc.
        Point dest;
        bool placed = false;
        for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
            const double theta = 2.0 * M_PI * unit(rng);
            const double euclid = dist / cfg.detour_factor;
            dest = {at.x_km + euclid * std::cos(theta), at.y_km + euclid * std::sin(theta)};
            placed = std::hypot(dest.x_km, dest.y_km) <= cfg.city_radius_km;
        }
        if (!placed) dest = random_point_in_disc(rng, cfg.city_radius_km);

        Trip t;
        t.pickup = at;
        t.dropoff = dest;
        t.start_minute = now;
        t.end_minute = now + drive;
        t.distance_km = city.road_km(at, dest);
        t.energy_kwh = city.energy(at, dest);
        trips.push_back(t);

        const bool long_break = unit(rng) < cfg.long_break_prob;
        const int idle =
            std::max(2, (int)std::lround(long_break ? break_minutes(rng) : gap_minutes(rng)));
        int next_start = t.end_minute + idle;
        if (next_start + 10 > shift_end) break;
        // Next pickup within the idle span; drivers usually head for the
        // nearest stand and get their next customer around it.
        Point next;
        bool ok = false;
        if (unit(rng) < cfg.rank_return_prob && !city.stations.empty()) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int s = 0; s < (int)city.stations.size(); ++s) {
                const double d = euclidean_km(t.dropoff, city.stations[s].location);
                if (d < best_d && city.minutes(t.dropoff, city.stations[s].location) + 2 <= idle) {
                    best_d = d;
                    best = s;
                }
            }
            if (best >= 0) {
                const double theta = 2.0 * M_PI * unit(rng);
                const double r = 0.6 * unit(rng);
                next = {city.stations[best].location.x_km + r * std::cos(theta),
                        city.stations[best].location.y_km + r * std::sin(theta)};
                ok = city.minutes(t.dropoff, next) <= idle;
            }
        }
        for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
            next = random_point_in_disc(rng, cfg.city_radius_km);
            ok = city.minutes(t.dropoff, next) <= idle;
        }
        if (!ok) next = t.dropoff;
        at = next;
        now = next_start;
    }
    return trips;
}

void attach_gaps(const CityModel& city, Vehicle& v, const Horizon& horizon) {
    v.gaps.clear();
    for (int c = 0; c + 1 < (int)v.trips.size(); ++c) {
        const Trip& cur = v.trips[c];
        const Trip& nxt = v.trips[c + 1];
        IdleGap gap;
        gap.after_trip = c;
        gap.direct_distance_km = city.road_km(cur.dropoff, nxt.pickup);
        gap.direct_minutes = city.minutes(cur.dropoff, nxt.pickup);
        gap.direct_energy_kwh = city.energy(cur.dropoff, nxt.pickup);
        const int depart = horizon.ceil_period(cur.end_minute);
        const int arrive_by = horizon.floor_period(nxt.start_minute);
        for (int s = 0; s < (int)city.stations.size(); ++s) {
            GapStationAccess a;
            a.station = s;
            a.distance_in_km = city.road_km(cur.dropoff, city.stations[s].location);
            a.distance_out_km = city.road_km(city.stations[s].location, nxt.pickup);
            a.travel_in_minutes = city.minutes(cur.dropoff, city.stations[s].location);
            a.travel_out_minutes = city.minutes(city.stations[s].location, nxt.pickup);
            a.energy_in_kwh = a.distance_in_km * city.cfg.tech.consumption_kwh_per_km;
            a.energy_out_kwh = a.distance_out_km * city.cfg.tech.consumption_kwh_per_km;
            // Keep only stations whose charging window is non-empty.
            const int lo = depart + horizon.ceil_period(a.travel_in_minutes);
            const int hi = arrive_by - horizon.ceil_period(a.travel_out_minutes) - 1;
            if (lo <= hi) gap.stations.push_back(a);
        }
        v.gaps.push_back(std::move(gap));
    }
}

// Splits a shift crossing midnight into same-day parts, which maps the
// charging demand into the day under consideration.
std::vector<Vehicle> to_day_vehicles(const CityModel& city, const std::vector<Trip>& trips,
                                     const Horizon& horizon, const TechParams& tech,
                                     const std::string& base_id) {
    const int day_minutes = horizon.total_minutes();
    std::vector<std::vector<Trip>> parts(2);
    for (const Trip& t : trips) {
        if (t.end_minute <= day_minutes) {
            parts[0].push_back(t);
        } else if (t.start_minute >= day_minutes) {
            Trip shifted = t;
            shifted.start_minute -= day_minutes;
            shifted.end_minute -= day_minutes;
            parts[1].push_back(shifted);
        }
        // Trips straddling the boundary are dropped with the handover.
    }
    std::vector<Vehicle> out;
    for (int p = 0; p < 2; ++p) {
        if (parts[p].empty()) continue;
        Vehicle v;
        v.id = base_id + (p == 1 ? "b" : "");
        v.trips = parts[p];
        v.q_begin_kwh = 0.5 * tech.q_max_kwh;
        v.q_end_kwh = std::max(0.0, (0.5 - tech.depot_charge_fraction) * tech.q_max_kwh);
        attach_gaps(city, v, horizon);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& doc) {
    GeneratorConfig cfg;
    if (doc.value("format", "chargeplan-generator-config") != "chargeplan-generator-config")
        throw std::runtime_error("not a chargeplan-generator-config document");
    cfg.rng_seed = doc.value("rng_seed", cfg.rng_seed);
    cfg.n_vehicles = doc.value("n_vehicles", cfg.n_vehicles);
    cfg.n_stations = doc.value("n_stations", cfg.n_stations);
    cfg.n_raw_sites = doc.value("n_raw_sites", cfg.n_raw_sites);
    cfg.n_scenarios = doc.value("n_scenarios", cfg.n_scenarios);
    cfg.city_radius_km = doc.value("city_radius_km", cfg.city_radius_km);
    cfg.speed_kmh = doc.value("speed_kmh", cfg.speed_kmh);
    cfg.detour_factor = doc.value("detour_factor", cfg.detour_factor);
    cfg.shift_hours_mean = doc.value("shift_hours_mean", cfg.shift_hours_mean);
    cfg.shift_hours_std = doc.value("shift_hours_std", cfg.shift_hours_std);
    cfg.shift_hours_min = doc.value("shift_hours_min", cfg.shift_hours_min);
    cfg.shift_hours_max = doc.value("shift_hours_max", cfg.shift_hours_max);
    cfg.trip_km_log_mean = doc.value("trip_km_log_mean", cfg.trip_km_log_mean);
    cfg.trip_km_log_std = doc.value("trip_km_log_std", cfg.trip_km_log_std);
    cfg.gap_minutes_log_mean = doc.value("gap_minutes_log_mean", cfg.gap_minutes_log_mean);
    cfg.gap_minutes_log_std = doc.value("gap_minutes_log_std", cfg.gap_minutes_log_std);
    cfg.long_break_prob = doc.value("long_break_prob", cfg.long_break_prob);
    cfg.long_break_log_mean = doc.value("long_break_log_mean", cfg.long_break_log_mean);
    cfg.long_break_log_std = doc.value("long_break_log_std", cfg.long_break_log_std);
    cfg.rank_return_prob = doc.value("rank_return_prob", cfg.rank_return_prob);
    cfg.charge_points = doc.value("charge_points", cfg.charge_points);
    if (doc.contains("horizon")) {
        cfg.horizon.periods = doc["horizon"].value("periods", cfg.horizon.periods);
        cfg.horizon.period_minutes =
            doc["horizon"].value("period_minutes", cfg.horizon.period_minutes);
    }
    if (doc.contains("tech")) {
        const auto& t = doc["tech"];
        cfg.tech.q_max_kwh = t.value("q_max_kwh", cfg.tech.q_max_kwh);
        cfg.tech.q_min_kwh = t.value("q_min_kwh", cfg.tech.q_min_kwh);
        cfg.tech.charge_power_kw = t.value("charge_power_kw", cfg.tech.charge_power_kw);
        cfg.tech.consumption_kwh_per_km =
            t.value("consumption_kwh_per_km", cfg.tech.consumption_kwh_per_km);
        cfg.tech.cc_cv_knee = t.value("cc_cv_knee", cfg.tech.cc_cv_knee);
        cfg.tech.depot_charge_fraction =
            t.value("depot_charge_fraction", cfg.tech.depot_charge_fraction);
    }
    return cfg;
}

nlohmann::json GeneratorConfig::to_json() const {
    nlohmann::json doc;
    doc["format"] = "chargeplan-generator-config";
    doc["rng_seed"] = rng_seed;
    doc["n_vehicles"] = n_vehicles;
    doc["n_stations"] = n_stations;
    doc["n_raw_sites"] = n_raw_sites;
    doc["n_scenarios"] = n_scenarios;
    doc["city_radius_km"] = city_radius_km;
    doc["speed_kmh"] = speed_kmh;
    doc["detour_factor"] = detour_factor;
    doc["shift_hours_mean"] = shift_hours_mean;
    doc["shift_hours_std"] = shift_hours_std;
    doc["shift_hours_min"] = shift_hours_min;
    doc["shift_hours_max"] = shift_hours_max;
    doc["trip_km_log_mean"] = trip_km_log_mean;
    doc["trip_km_log_std"] = trip_km_log_std;
    doc["gap_minutes_log_mean"] = gap_minutes_log_mean;
    doc["gap_minutes_log_std"] = gap_minutes_log_std;
    doc["long_break_prob"] = long_break_prob;
    doc["long_break_log_mean"] = long_break_log_mean;
    doc["long_break_log_std"] = long_break_log_std;
    doc["rank_return_prob"] = rank_return_prob;
    doc["charge_points"] = charge_points;
    doc["horizon"] = {{"periods", horizon.periods}, {"period_minutes", horizon.period_minutes}};
    doc["tech"] = {{"q_max_kwh", tech.q_max_kwh},
                   {"q_min_kwh", tech.q_min_kwh},
                   {"charge_power_kw", tech.charge_power_kw},
                   {"consumption_kwh_per_km", tech.consumption_kwh_per_km},
                   {"cc_cv_knee", tech.cc_cv_knee},
                   {"depot_charge_fraction", tech.depot_charge_fraction}};
    return doc;
}

GenerationResult generate_instance(const GeneratorConfig& config, int demand_variant) {
    GenerationResult result;
    Instance& inst = result.instance;
    inst.horizon = config.horizon;
    inst.tech = config.tech;

    // Stations depend only on the base seed so demand variants share them.
    std::mt19937_64 site_rng(config.rng_seed ^ kSiteSalt);
    std::vector<Point> raw_sites;
    for (int i = 0; i < config.n_raw_sites; ++i)
        raw_sites.push_back(random_point_in_disc(site_rng, config.city_radius_km));
    std::mt19937_64 kmeans_rng(config.rng_seed ^ kKmeansSalt);
    inst.stations = select_station_sites(raw_sites, config.n_stations, config.city_radius_km,
                                         config.charge_points, kmeans_rng);
    inst.rebuild_station_index();

    CityModel city{config, inst.stations};
    StationConfiguration all_open = StationConfiguration::all_open(inst);

    // Shift start profile over the 4-hour strata of a day.
    const double bin_weights[6] = {0.06, 0.08, 0.24, 0.20, 0.24, 0.18};

    const uint64_t demand_seed =
        config.rng_seed ^ kDemandSalt ^ (0x51ed270b7a03bull * (uint64_t)(demand_variant + 1));

    // A pool of shifts per day group, every member individually feasible
    // with all stations open.
    std::vector<std::vector<PoolShift>> day_pools(kDayGroups);
    for (int day = 0; day < kDayGroups; ++day) {
        std::mt19937_64 rng(demand_seed ^ (0x2545f4914f6cdd1dull * (uint64_t)(day + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> shift_hours(config.shift_hours_mean,
                                                     config.shift_hours_std);
        const int pool_target = 3 * config.n_vehicles;
        int serial = 0;
        while ((int)day_pools[day].size() < pool_target) {
            // Stratified start minute.
            double pick = unit(rng);
            int bin = 0;
            for (; bin < 5; ++bin) {
                if (pick < bin_weights[bin]) break;
                pick -= bin_weights[bin];
            }
            const int start =
                bin * kStartBinMinutes + (int)(unit(rng) * (kStartBinMinutes - 1));
            const int duration = (int)std::lround(
                std::clamp(shift_hours(rng), config.shift_hours_min, config.shift_hours_max) *
                60.0);

            std::vector<Trip> trips = build_trips(city, start, duration, rng);
            char buf[16];
            std::snprintf(buf, sizeof buf, "d%dv%03d", day, serial++);
            std::vector<Vehicle> parts =
                to_day_vehicles(city, trips, inst.horizon, config.tech, buf);

            bool all_feasible = !parts.empty();
            for (const Vehicle& v : parts)
                all_feasible = all_feasible && pricing::vehicle_feasible(inst, v, all_open);
            if (!all_feasible) {
                if (!parts.empty()) result.replaced_vehicles.push_back(parts[0].id);
                continue;  // resample a replacement shift
            }
            PoolShift shift;
            shift.day_group = day;
            shift.start_minute = start % inst.horizon.total_minutes();
            shift.duration_minutes = duration;
            shift.stratum = shift.start_minute / kStartBinMinutes;
            for (Vehicle& v : parts) {
                shift.trip_count += (int)v.trips.size();
                for (const Trip& t : v.trips) shift.distance_km += t.distance_km;
                shift.parts.push_back(std::move(v));
            }
            day_pools[day].push_back(std::move(shift));
        }
    }

    // Scenarios: proportional stratified samples, four per day group by
    // default (28 scenarios for a 7-day week).
    for (int z = 0; z < config.n_scenarios; ++z) {
        const int day = z % kDayGroups;
        std::mt19937_64 rng(demand_seed ^ (0x9e6c63d0876a9a2full * (uint64_t)(z + 1)));
        std::vector<int> picked = sample_scenario_shifts(day_pools[day], config.n_vehicles, rng);

        Scenario scenario;
        char zbuf[16];
        std::snprintf(zbuf, sizeof zbuf, "z%02d", z + 1);
        scenario.id = zbuf;
        scenario.weight = 1.0 / config.n_scenarios;
        std::vector<PoolShift> sampled;
        int serial = 0;
        for (int idx : picked) {
            const PoolShift& shift = day_pools[day][idx];
            ++serial;
            for (size_t part = 0; part < shift.parts.size(); ++part) {
                Vehicle v = shift.parts[part];
                char vbuf[32];
                std::snprintf(vbuf, sizeof vbuf, "%s-v%03d%s", zbuf, serial,
                              part > 0 ? "b" : "");
                v.id = vbuf;
                scenario.vehicles.push_back(std::move(v));
            }
            sampled.push_back(shift);
        }
        result.scenario_stats.push_back(pool_statistics(sampled));
        inst.scenarios.push_back(std::move(scenario));
    }
    return result;
}

std::pair<Instance, std::vector<std::string>> derive_parameter_instance(const Instance& master,
                                                                        const TechParams& tech) {
    Instance derived;
    derived.horizon = master.horizon;
    derived.tech = tech;
    derived.stations = master.stations;
    derived.rebuild_station_index();

    const double rate = tech.consumption_kwh_per_km;
    StationConfiguration all_open = StationConfiguration::all_open(derived);
    std::vector<std::string> removed;

    for (const Scenario& z : master.scenarios) {
        Scenario out_z;
        out_z.id = z.id;
        out_z.weight = z.weight;
        for (const Vehicle& v : z.vehicles) {
            Vehicle nv = v;
            nv.q_begin_kwh = 0.5 * tech.q_max_kwh;
            nv.q_end_kwh = std::max(0.0, (0.5 - tech.depot_charge_fraction) * tech.q_max_kwh);
            for (Trip& t : nv.trips) t.energy_kwh = t.distance_km * rate;
            for (IdleGap& g : nv.gaps) {
                g.direct_energy_kwh = g.direct_distance_km * rate;
                for (GapStationAccess& a : g.stations) {
                    a.energy_in_kwh = a.distance_in_km * rate;
                    a.energy_out_kwh = a.distance_out_km * rate;
                }
            }
            if (pricing::vehicle_feasible(derived, nv, all_open)) {
                out_z.vehicles.push_back(std::move(nv));
            } else {
                removed.push_back(z.id + "/" + v.id);
            }
        }
        derived.scenarios.push_back(std::move(out_z));
    }
    return {std::move(derived), std::move(removed)};
}

}  // namespace chargeplan::gen
