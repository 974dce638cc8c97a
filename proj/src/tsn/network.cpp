#include "chargeplan/tsn/network.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace chargeplan::tsn {

std::string BranchConstraint::describe() const {
    std::ostringstream os;
    os << (enforce ? "enforce" : "forbid") << " gap=" << gap << " station=" << station;
    if (period >= 0) os << " period=" << period;
    return os.str();
}

namespace {

struct GapFilter {
    int enforced_station = -1;
    std::set<int> forbidden_stations;
    // Tightest enforced period range per station: entry must happen at or
    // before the range start and departure at or after its end, so the visit
    // covers every enforced period.
    std::map<int, std::pair<int, int>> enforced_period;
    std::set<std::pair<int, int>> forbidden_vertices;  // (station, period)
};

struct StationWindow {
    const GapStationAccess* access = nullptr;
    int lo = 0, hi = -1;  // feasible charging periods [lo, hi]
};

}  // namespace

ExpandedNetwork build_network(const Instance& inst, const Vehicle& vehicle,
                              const StationConfiguration& config, const DualPrices& duals,
                              const std::vector<BranchConstraint>& branching) {
    const Horizon& h = inst.horizon;
    const int num_trips = (int)vehicle.trips.size();
    const int num_gaps = num_trips > 0 ? num_trips - 1 : 0;

    std::vector<GapFilter> filters(num_gaps);
    for (const BranchConstraint& bc : branching) {
        if (bc.gap < 0 || bc.gap >= num_gaps) continue;
        GapFilter& f = filters[bc.gap];
        if (bc.enforce) {
            f.enforced_station = bc.station;
            if (bc.period >= 0) {
                auto it = f.enforced_period.find(bc.station);
                if (it == f.enforced_period.end())
                    f.enforced_period[bc.station] = {bc.period, bc.period};
                else {
                    it->second.first = std::min(it->second.first, bc.period);
                    it->second.second = std::max(it->second.second, bc.period);
                }
            }
        } else {
            if (bc.period >= 0) f.forbidden_vertices.insert({bc.station, bc.period});
            else f.forbidden_stations.insert(bc.station);
        }
    }

    ExpandedNetwork net;
    std::vector<int> trip_start(num_trips, -1), trip_end(num_trips, -1);
    std::vector<std::vector<StationWindow>> gap_windows(num_gaps);
    // (period, station) -> vertex id, per gap; period-major order keeps the
    // overall vertex list topological.
    std::vector<std::map<std::pair<int, int>, int>> gap_vertices(num_gaps);

    for (int c = 0; c < num_trips; ++c) {
        const Trip& trip = vehicle.trips[c];
        Vertex vs;
        vs.kind = VertexKind::TripStart;
        vs.trip = c;
        vs.period = h.floor_period(trip.start_minute);
        trip_start[c] = (int)net.vertices.size();
        net.vertices.push_back(vs);

        Vertex ve;
        ve.kind = VertexKind::TripEnd;
        ve.trip = c;
        ve.period = h.ceil_period(trip.end_minute);
        trip_end[c] = (int)net.vertices.size();
        net.vertices.push_back(ve);

        if (c + 1 >= num_trips) continue;
        const IdleGap& gap = vehicle.gaps[c];
        const GapFilter& filter = filters[c];
        const int depart = ve.period;
        const int arrive_by = h.floor_period(vehicle.trips[c + 1].start_minute);

        for (const GapStationAccess& a : gap.stations) {
            if (!config.is_open(a.station)) continue;
            if (filter.enforced_station >= 0 && a.station != filter.enforced_station) continue;
            if (filter.forbidden_stations.count(a.station)) continue;
            const int lo = depart + h.ceil_period(a.travel_in_minutes);
            const int hi = arrive_by - h.ceil_period(a.travel_out_minutes) - 1;
            if (lo > hi) continue;
            gap_windows[c].push_back({&a, lo, hi});
        }
        for (const StationWindow& w : gap_windows[c])
            for (int t = w.lo; t <= w.hi; ++t)
                if (!filter.forbidden_vertices.count({w.access->station, t}))
                    gap_vertices[c][{t, w.access->station}] = -1;
        for (auto& [key, id] : gap_vertices[c]) {
            Vertex vc;
            vc.kind = VertexKind::Charge;
            vc.gap = c;
            vc.station = key.second;
            vc.period = key.first;
            vc.charges = true;
            vc.price = duals.at(key.second, key.first);
            id = (int)net.vertices.size();
            net.vertices.push_back(vc);
            ++net.num_charge_vertices;
        }
    }

    std::vector<std::vector<Arc>> out_arcs(net.vertices.size());
    auto add_arc = [&](int from, int to, ArcKind kind, double range) {
        out_arcs[from].push_back(Arc{from, to, kind, range});
    };

    for (int c = 0; c < num_trips; ++c) {
        add_arc(trip_start[c], trip_end[c], ArcKind::Trip, vehicle.trips[c].energy_kwh);
        ++net.num_trip_arcs;
        if (c + 1 >= num_trips) continue;

        const GapFilter& filter = filters[c];
        const auto& verts = gap_vertices[c];
        for (const StationWindow& w : gap_windows[c]) {
            const int s = w.access->station;
            int entry_cap = w.hi, exit_floor = w.lo;
            if (auto it = filter.enforced_period.find(s); it != filter.enforced_period.end()) {
                entry_cap = std::min(entry_cap, it->second.first);
                exit_floor = std::max(exit_floor, it->second.second);
            }
            for (int t = w.lo; t <= w.hi; ++t) {
                auto it = verts.find({t, s});
                if (it == verts.end()) continue;
                const int v = it->second;
                if (t <= entry_cap)
                    add_arc(trip_end[c], v, ArcKind::ToCharger, w.access->energy_in_kwh);
                if (t >= exit_floor)
                    add_arc(v, trip_start[c + 1], ArcKind::FromCharger, w.access->energy_out_kwh);
                if (auto next = verts.find({t + 1, s}); next != verts.end()) {
                    add_arc(v, next->second, ArcKind::Holdover, 0.0);
                    ++net.num_holdover_arcs;
                }
            }
        }
        if (filter.enforced_station < 0) {
            add_arc(trip_end[c], trip_start[c + 1], ArcKind::DirectTransfer,
                    vehicle.gaps[c].direct_energy_kwh);
            ++net.num_transfer_arcs;
        }
    }

    net.source = num_trips > 0 ? trip_start[0] : -1;
    net.sink = num_trips > 0 ? trip_end[num_trips - 1] : -1;

    net.first_arc.assign(net.vertices.size() + 1, 0);
    for (size_t v = 0; v < out_arcs.size(); ++v)
        net.first_arc[v + 1] = net.first_arc[v] + (int)out_arcs[v].size();
    net.arcs.reserve(net.first_arc.back());
    for (auto& list : out_arcs)
        for (Arc& a : list) net.arcs.push_back(a);
    return net;
}

std::string ExpandedNetwork::to_dot() const {
    std::ostringstream os;
    os << "digraph expanded {\n  rankdir=LR;\n";
    for (size_t v = 0; v < vertices.size(); ++v) {
        const Vertex& vx = vertices[v];
        os << "  n" << v << " [label=\"";
        switch (vx.kind) {
            case VertexKind::TripStart: os << "start," << vx.trip; break;
            case VertexKind::TripEnd: os << "end," << vx.trip; break;
            case VertexKind::Charge: os << "charge,s" << vx.station; break;
        }
        os << ",t" << vx.period << "\"];\n";
    }
    for (const Arc& a : arcs)
        os << "  n" << a.from << " -> n" << a.to << " [label=\"" << a.range_cost << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace chargeplan::tsn
