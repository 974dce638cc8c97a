#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chargeplan/core/types.hpp"
#include "chargeplan/tsn/network.hpp"

namespace chargeplan::pricing {

// Partial path state: accumulated charge price and SOC at the vertex. The
// SOC is the pre-charge value when the vertex is a charging vertex; the
// charged amount materializes on extension along an outgoing arc.
struct Label {
    double cost = 0.0;  // C_i, sum of charge prices of visited charging vertices
    double soc = 0.0;   // R_i in kWh
    int vertex = -1;
    int pred = -1;  // arena index of the predecessor label
};

// Weak dominance at a shared vertex: cheaper and at least as charged.
inline bool dominates(const Label& a, const Label& b) {
    return a.cost <= b.cost && a.soc >= b.soc;
}

// Resource extension along one arc. The tail vertex's charge flag decides
// whether one period of charging is credited before the range cost is paid.
// Returns nothing when the extension falls below the SOC floor.
std::optional<Label> extend(const Label& label, const tsn::Arc& arc,
                            const tsn::ExpandedNetwork& net, const TechParams& tech,
                            int period_minutes);

// One contiguous charging visit inside a gap.
struct ChargeVisit {
    int gap = -1;
    int station = -1;
    int enter_period = -1;
    int exit_period = -1;  // inclusive
};

struct Route {
    std::vector<ChargeVisit> visits;                 // chronological
    std::vector<std::pair<int, int>> footprint;      // (station, period) occupancy
    double price_sum = 0.0;                          // C at creation
    double reduced_cost = 0.0;                       // -rho + C at creation
    double end_soc = 0.0;

    uint64_t key() const;  // footprint hash for pool dedup
    bool same_visits(const Route& other) const;
};

struct PricingResult {
    bool feasible = false;              // some end label meets the end-SOC requirement
    std::vector<Route> routes;          // reduced cost < -1e-6, best first, capped
    std::vector<Label> end_labels;      // non-dominated feasible end labels
};

// Label-setting pass over the network. Routes are returned only when their
// reduced cost -rho + C_end is strictly negative.
PricingResult price_vehicle(const tsn::ExpandedNetwork& net, const Instance& inst,
                            const Vehicle& vehicle, double rho, int column_cap = 10);

// Single-vehicle operational feasibility: uncapacitated, zero prices, only
// the stations opened in `config` reachable.
bool vehicle_feasible(const Instance& inst, const Vehicle& vehicle,
                      const StationConfiguration& config);

}  // namespace chargeplan::pricing
