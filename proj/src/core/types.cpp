#include "chargeplan/core/types.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chargeplan {

double euclidean_km(const Point& a, const Point& b) {
    return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

int Instance::find_station(const std::string& id) const {
    auto it = station_index.find(id);
    return it == station_index.end() ? -1 : it->second;
}

void Instance::rebuild_station_index() {
    station_index.clear();
    for (int i = 0; i < (int)stations.size(); ++i) station_index[stations[i].id] = i;
}

StationConfiguration StationConfiguration::all_open(const Instance& inst) {
    StationConfiguration c;
    c.opened.assign(inst.stations.size(), true);
    c.total_cost = 0.0;
    for (const auto& s : inst.stations) c.total_cost += s.cost;
    return c;
}

StationConfiguration StationConfiguration::all_closed(const Instance& inst) {
    StationConfiguration c;
    c.opened.assign(inst.stations.size(), false);
    c.total_cost = 0.0;
    return c;
}

StationConfiguration StationConfiguration::from_open_set(const Instance& inst,
                                                         const std::vector<int>& open) {
    StationConfiguration c = all_closed(inst);
    for (int s : open) {
        if (s < 0 || s >= (int)inst.stations.size())
            throw std::out_of_range("unknown station index " + std::to_string(s));
        if (!c.opened[s]) {
            c.opened[s] = true;
            c.total_cost += inst.stations[s].cost;
        }
    }
    return c;
}

std::vector<int> StationConfiguration::open_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < (int)opened.size(); ++i)
        if (opened[i]) idx.push_back(i);
    return idx;
}

int StationConfiguration::open_count() const {
    int n = 0;
    for (bool b : opened) n += b ? 1 : 0;
    return n;
}

double configuration_cost(const StationConfiguration& config, const Instance& instance) {
    if (config.opened.size() != instance.stations.size())
        throw std::invalid_argument("configuration does not match instance station universe");
    double total = 0.0;
    for (size_t i = 0; i < config.opened.size(); ++i)
        if (config.opened[i]) total += instance.stations[i].cost;
    return total;
}

}  // namespace chargeplan
