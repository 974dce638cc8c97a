#include "chargeplan/pricing/labeling.hpp"

#include <algorithm>

#include "chargeplan/core/charging.hpp"

namespace chargeplan::pricing {

namespace {
constexpr double kNegativeRcTol = 1e-6;
constexpr double kSocSlack = 1e-9;
}  // namespace

std::optional<Label> extend(const Label& label, const tsn::Arc& arc,
                            const tsn::ExpandedNetwork& net, const TechParams& tech,
                            int period_minutes) {
    const tsn::Vertex& tail = net.vertices[arc.from];
    Label next;
    next.vertex = arc.to;
    next.cost = label.cost + tail.price;
    double soc = label.soc;
    if (tail.charges)
        soc = std::min(tech.q_max_kwh, soc + charge_amount(soc, tech, 1, period_minutes));
    next.soc = soc - arc.range_cost;
    if (next.soc < tech.q_min_kwh - kSocSlack) return std::nullopt;
    return next;
}

uint64_t Route::key() const {
    uint64_t hash = 1469598103934665603ull;
    for (auto& [s, t] : footprint) {
        hash = (hash ^ (uint64_t)(s * 1315423911 + t)) * 1099511628211ull;
    }
    return hash;
}

bool Route::same_visits(const Route& other) const {
    if (visits.size() != other.visits.size()) return false;
    for (size_t i = 0; i < visits.size(); ++i) {
        const ChargeVisit& a = visits[i];
        const ChargeVisit& b = other.visits[i];
        if (a.gap != b.gap || a.station != b.station || a.enter_period != b.enter_period ||
            a.exit_period != b.exit_period)
            return false;
    }
    return true;
}

namespace {

// Pareto frontier per vertex: arena indices ordered by cost ascending, SOC
// strictly descending. Insertion keeps the antichain; equal labels keep the
// first one seen.
class Frontier {
public:
    bool insert(std::vector<Label>& arena, Label candidate, int& out_index) {
        size_t lo = 0, hi = entries_.size();
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (arena[entries_[mid]].cost <= candidate.cost) lo = mid + 1;
            else hi = mid;
        }
        // entries_[lo-1] has the largest cost <= candidate's.
        if (lo > 0 && arena[entries_[lo - 1]].soc >= candidate.soc)
            return false;  // dominated (covers exact duplicates)
        size_t erase_from = lo;
        if (lo > 0 && arena[entries_[lo - 1]].cost == candidate.cost) --erase_from;
        size_t erase_to = erase_from;
        while (erase_to < entries_.size() && arena[entries_[erase_to]].soc <= candidate.soc)
            ++erase_to;
        out_index = (int)arena.size();
        arena.push_back(candidate);
        entries_.erase(entries_.begin() + erase_from, entries_.begin() + erase_to);
        entries_.insert(entries_.begin() + erase_from, out_index);
        return true;
    }

    const std::vector<int>& entries() const { return entries_; }

private:
    std::vector<int> entries_;
};

Route backtrack(const std::vector<Label>& arena, int end_index,
                const tsn::ExpandedNetwork& net) {
    std::vector<int> vertex_seq;
    for (int at = end_index; at >= 0; at = arena[at].pred) vertex_seq.push_back(arena[at].vertex);
    std::reverse(vertex_seq.begin(), vertex_seq.end());

    Route route;
    route.price_sum = arena[end_index].cost;
    route.end_soc = arena[end_index].soc;
    for (int v : vertex_seq) {
        const tsn::Vertex& vx = net.vertices[v];
        if (!vx.charges) continue;
        route.footprint.push_back({vx.station, vx.period});
        if (!route.visits.empty() && route.visits.back().gap == vx.gap &&
            route.visits.back().station == vx.station &&
            route.visits.back().exit_period + 1 == vx.period) {
            route.visits.back().exit_period = vx.period;
        } else {
            route.visits.push_back({vx.gap, vx.station, vx.period, vx.period});
        }
    }
    return route;
}

}  // namespace

PricingResult price_vehicle(const tsn::ExpandedNetwork& net, const Instance& inst,
                            const Vehicle& vehicle, double rho, int column_cap) {
    PricingResult result;
    if (net.source < 0) return result;

    std::vector<Label> arena;
    std::vector<Frontier> frontiers(net.vertices.size());

    Label start;
    start.cost = 0.0;
    start.soc = vehicle.q_begin_kwh;
    start.vertex = net.source;
    start.pred = -1;
    int idx;
    frontiers[net.source].insert(arena, start, idx);

    // Vertices are stored topologically, so one sweep settles every label.
    for (int v = 0; v < (int)net.vertices.size(); ++v) {
        // Frontier entries may grow only for downstream vertices, never for v.
        const std::vector<int> labels = frontiers[v].entries();
        for (int li : labels) {
            const Label label = arena[li];
            for (int ai = net.first_arc[v]; ai < net.first_arc[v + 1]; ++ai) {
                auto next = extend(label, net.arcs[ai], net, inst.tech,
                                   inst.horizon.period_minutes);
                if (!next) continue;
                next->pred = li;
                int ignored;
                frontiers[next->vertex].insert(arena, *next, ignored);
            }
        }
    }

    // Feasible end labels also satisfy the end-of-shift SOC requirement.
    std::vector<int> end_indices;
    for (int li : frontiers[net.sink].entries()) {
        if (arena[li].soc >= vehicle.q_end_kwh - kSocSlack) {
            end_indices.push_back(li);
            result.end_labels.push_back(arena[li]);
        }
    }
    result.feasible = !end_indices.empty();

    std::vector<std::pair<double, int>> priced;  // (reduced cost, arena index)
    for (int li : end_indices) {
        const double rc = -rho + arena[li].cost;
        if (rc < -kNegativeRcTol) priced.push_back({rc, li});
    }
    std::stable_sort(priced.begin(), priced.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (column_cap >= 0 && (int)priced.size() > column_cap) priced.resize(column_cap);
    for (auto& [rc, li] : priced) {
        Route route = backtrack(arena, li, net);
        route.reduced_cost = rc;
        result.routes.push_back(std::move(route));
    }
    return result;
}

bool vehicle_feasible(const Instance& inst, const Vehicle& vehicle,
                      const StationConfiguration& config) {
    tsn::DualPrices zero;
    tsn::ExpandedNetwork net = tsn::build_network(inst, vehicle, config, zero);
    return price_vehicle(net, inst, vehicle, 0.0, 0).feasible;
}

}  // namespace chargeplan::pricing
