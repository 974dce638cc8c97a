#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "chargeplan/core/types.hpp"

namespace chargeplan::gen {

struct GeneratorConfig {
    uint64_t rng_seed = 1;
    int n_vehicles = 20;
    int n_stations = 8;
    int n_raw_sites = 215;
    int n_scenarios = 28;
    double city_radius_km = 12.0;
    double speed_kmh = 25.0;
    double detour_factor = 1.2;
    double shift_hours_mean = 8.0;
    double shift_hours_std = 0.75;
    double shift_hours_min = 5.0;
    double shift_hours_max = 8.9;
    double trip_km_log_mean = 2.1;    // lognormal, mean ~9.5 km
    double trip_km_log_std = 0.55;
    double gap_minutes_log_mean = 1.9;   // lognormal idle between customers, mean ~8 min
    double gap_minutes_log_std = 0.55;
    double long_break_prob = 0.35;       // rank waits and meal breaks
    double long_break_log_mean = 3.8;    // mean ~47 min
    double long_break_log_std = 0.3;
    double rank_return_prob = 0.55;      // idle spent at the nearest candidate stand
    int charge_points = 4;
    Horizon horizon;
    TechParams tech;

    static GeneratorConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

// Station installation cost by normalized distance to the city center.
double station_cost(double normalized_distance);

// k-means over candidate sites; every cluster centroid maps to its nearest
// still-unused raw site. Deterministic under the rng state.
std::vector<Station> select_station_sites(const std::vector<Point>& raw_sites, int k,
                                          double city_radius_km, int charge_points,
                                          std::mt19937_64& rng);

// One sampled taxi shift. Shifts crossing midnight are mapped into the day
// as two vehicle parts; the shift stays one sampling unit.
struct PoolShift {
    std::vector<Vehicle> parts;
    int day_group = 0;
    int start_minute = 0;
    int duration_minutes = 0;
    int stratum = 0;  // 4-hour start-time bin
    int trip_count = 0;
    double distance_km = 0.0;
};

struct ShiftStats {
    double median_shift_hours = 0.0;
    double mean_trips_per_shift = 0.0;
    double mean_distance_km = 0.0;
};

ShiftStats pool_statistics(const std::vector<PoolShift>& pool);

// Proportional stratified sampling of one 24-hour scenario from a day
// group's pool. Shifts below five hours are excluded before stratification.
// Throws when a stratum holds a non-zero quota but no shifts.
std::vector<int> sample_scenario_shifts(const std::vector<PoolShift>& pool, int n_vehicles,
                                        std::mt19937_64& rng);

struct GenerationResult {
    Instance instance;
    std::vector<std::string> replaced_vehicles;  // resampled during feasibility repair
    std::vector<ShiftStats> scenario_stats;
};

// Deterministic synthetic instance. Stations depend only on the config seed;
// demand additionally depends on `demand_variant`, so variant 0 is the
// optimization set and variants 1..k give out-of-sample sets over the same
// station universe.
GenerationResult generate_instance(const GeneratorConfig& config, int demand_variant = 0);

// Applies a technology change to a master instance: energies are recomputed
// from stored distances, SOC boundary conditions follow the new battery and
// the depot-charge credit, and vehicles that are no longer individually
// feasible (all stations open, uncapacitated) are removed.
std::pair<Instance, std::vector<std::string>> derive_parameter_instance(const Instance& master,
                                                                        const TechParams& tech);

}  // namespace chargeplan::gen
