#pragma once

#include <string>
#include <vector>

#include "chargeplan/core/types.hpp"

namespace chargeplan::tsn {

enum class VertexKind { TripStart, TripEnd, Charge };
enum class ArcKind { Trip, DirectTransfer, ToCharger, FromCharger, Holdover };

struct Vertex {
    VertexKind kind = VertexKind::TripStart;
    int trip = -1;      // trip index for TripStart/TripEnd
    int gap = -1;       // gap index for Charge
    int station = -1;   // station index for Charge
    int period = -1;
    bool charges = false;  // z_i
    double price = 0.0;    // pi_i, dual-derived charge price, >= 0
};

struct Arc {
    int from = -1;
    int to = -1;
    ArcKind kind = ArcKind::Trip;
    double range_cost = 0.0;  // kWh
};

// Charge price table pi(s, t) derived from the capacity duals. Capacity rows
// are <= rows of a minimization, so lambda_st <= 0 at the optimum and the
// stored price is -lambda_st >= 0.
class DualPrices {
public:
    DualPrices() = default;
    DualPrices(int stations, int periods) : periods_(periods), table_((size_t)stations * periods, 0.0) {}

    void set(int station, int period, double price) { table_[(size_t)station * periods_ + period] = price; }
    double at(int station, int period) const {
        if (table_.empty()) return 0.0;
        return table_[(size_t)station * periods_ + period];
    }
    bool empty() const { return table_.empty(); }

private:
    int periods_ = 0;
    std::vector<double> table_;
};

// Branching constraint realized through arc deletion. period < 0 targets the
// station for the whole gap; otherwise the single charging vertex (station,
// period).
struct BranchConstraint {
    int gap = -1;
    int station = -1;
    int period = -1;
    bool enforce = false;

    std::string describe() const;
};

struct ExpandedNetwork {
    std::vector<Vertex> vertices;  // topological order
    std::vector<Arc> arcs;         // grouped by tail vertex
    std::vector<int> first_arc;    // CSR offsets, size vertices+1
    int source = -1;
    int sink = -1;
    int num_trip_arcs = 0;
    int num_transfer_arcs = 0;
    int num_holdover_arcs = 0;
    int num_charge_vertices = 0;

    // Graphviz dump for visual inspection; nodes labeled (kind, station, period).
    std::string to_dot() const;
};

// Builds the per-vehicle time-expanded DAG. Only opened stations produce
// charging vertices; a charging start period t is kept iff it leaves at
// least one full period before the departure deadline of the next trip.
ExpandedNetwork build_network(const Instance& inst, const Vehicle& vehicle,
                              const StationConfiguration& config, const DualPrices& duals,
                              const std::vector<BranchConstraint>& branching = {});

}  // namespace chargeplan::tsn
