#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace chargeplan {

// Planar position in km, city center at the origin.
struct Point {
    double x_km = 0.0;
    double y_km = 0.0;
};

double euclidean_km(const Point& a, const Point& b);

struct TechParams {
    double q_max_kwh = 40.0;
    double q_min_kwh = 0.0;
    double charge_power_kw = 50.0;
    double consumption_kwh_per_km = 0.16;
    double cc_cv_knee = 0.8;             // fraction of q_max where the power taper starts
    double depot_charge_fraction = 0.0;  // fraction of q_max credited against the end-of-shift SOC
};

struct Station {
    std::string id;
    Point location;
    double cost = 0.0;
    int charge_points = 1;
};

struct Trip {
    Point pickup;
    Point dropoff;
    int start_minute = 0;
    int end_minute = 0;
    double distance_km = 0.0;
    double energy_kwh = 0.0;
};

// Precomputed detour data for one station reachable within an idle gap.
struct GapStationAccess {
    int station = -1;  // index into Instance::stations
    int travel_in_minutes = 0;
    int travel_out_minutes = 0;
    double distance_in_km = 0.0;
    double distance_out_km = 0.0;
    double energy_in_kwh = 0.0;
    double energy_out_kwh = 0.0;
};

// Idle gap between trip `after_trip` and the next trip.
struct IdleGap {
    int after_trip = 0;
    int direct_minutes = 0;
    double direct_distance_km = 0.0;
    double direct_energy_kwh = 0.0;
    std::vector<GapStationAccess> stations;
};

struct Vehicle {
    std::string id;
    double q_begin_kwh = 0.0;
    double q_end_kwh = 0.0;
    std::vector<Trip> trips;
    std::vector<IdleGap> gaps;  // one per consecutive trip pair, in trip order
};

struct Scenario {
    std::string id;
    double weight = 1.0;
    std::vector<Vehicle> vehicles;
};

struct Horizon {
    int periods = 144;
    int period_minutes = 10;

    int total_minutes() const { return periods * period_minutes; }
    // Conservative rounding: starts truncate, ends and travel times round up.
    int floor_period(int minute) const { return minute / period_minutes; }
    int ceil_period(int minute) const { return (minute + period_minutes - 1) / period_minutes; }
};

struct Instance {
    Horizon horizon;
    TechParams tech;
    std::vector<Station> stations;
    std::vector<Scenario> scenarios;

    std::unordered_map<std::string, int> station_index;

    int find_station(const std::string& id) const;
    void rebuild_station_index();
};

// First-stage decision: which stations are open.
struct StationConfiguration {
    std::vector<bool> opened;  // by station index
    double total_cost = 0.0;

    static StationConfiguration all_open(const Instance& inst);
    static StationConfiguration all_closed(const Instance& inst);
    static StationConfiguration from_open_set(const Instance& inst, const std::vector<int>& open);
    std::vector<int> open_indices() const;
    int open_count() const;
    bool is_open(int station) const { return station >= 0 && station < (int)opened.size() && opened[station]; }
};

double configuration_cost(const StationConfiguration& config, const Instance& instance);

}  // namespace chargeplan
