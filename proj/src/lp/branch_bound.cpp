#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chargeplan/lp/linear_program.hpp"

namespace chargeplan::lp {

namespace {

constexpr double kIntTol = 1e-6;

using Clock = std::chrono::steady_clock;

struct Node {
    std::vector<signed char> fixed;  // -1 free, else 0/1
    double parent_bound;
};

// x_j <= 1 is implied when the variable sits with a positive coefficient in
// an equality row of rhs <= 1 whose coefficients are all non-negative.
std::vector<char> implied_upper_bounds(const LinearProgram& lp) {
    std::vector<char> implied(lp.num_vars(), 0);
    for (const Row& r : lp.rows) {
        if (r.sense != Sense::Equal || r.rhs > 1.0 + 1e-12) continue;
        bool all_nonneg = true;
        for (auto& [j, a] : r.coeffs) all_nonneg &= a >= 0.0;
        if (!all_nonneg) continue;
        for (auto& [j, a] : r.coeffs)
            if (a >= 1.0 - 1e-12) implied[j] = 1;
    }
    return implied;
}

}  // namespace

namespace detail {

BinarySolution embedded_solve_binary(const LinearProgram& lp, const BinaryLimits& limits) {
    const int n = lp.num_vars();
    for (int j = 0; j < n; ++j) {
        const bool ok_bounds = (lp.lower[j] == 0.0 || lp.lower[j] == 1.0) &&
                               (lp.upper[j] == 1.0 || lp.upper[j] == 0.0 ||
                                !std::isfinite(lp.upper[j]));
        if (!ok_bounds) throw std::invalid_argument("solve_binary requires binary variables");
    }

    BinarySolution out;
    const auto t_start = Clock::now();
    const std::vector<char> implied = implied_upper_bounds(lp);

    Node root;
    root.fixed.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (lp.lower[j] == 1.0) root.fixed[j] = 1;
        else if (std::isfinite(lp.upper[j]) && lp.upper[j] == 0.0) root.fixed[j] = 0;
    }
    root.parent_bound = -kInfinity;

    std::vector<Node> stack{std::move(root)};
    double incumbent = kInfinity;
    std::vector<char> incumbent_values;
    double open_bound_floor = kInfinity;  // min bound among nodes cut off by limits
    bool limit_hit = false;

    while (!stack.empty()) {
        if (limits.max_nodes >= 0 && out.nodes >= limits.max_nodes) limit_hit = true;
        if (limits.time_limit_seconds >= 0.0 &&
            std::chrono::duration<double>(Clock::now() - t_start).count() >
                limits.time_limit_seconds)
            limit_hit = true;
        if (limit_hit) {
            for (const Node& nd : stack) open_bound_floor = std::min(open_bound_floor, nd.parent_bound);
            break;
        }

        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.parent_bound >= incumbent - 1e-9) continue;
        ++out.nodes;

        // LP relaxation over the free variables with fixings substituted.
        LinearProgram relax;
        std::vector<int> free_of;  // relax var -> original var
        std::vector<int> relax_of(n, -1);
        for (int j = 0; j < n; ++j) {
            if (node.fixed[j] >= 0) continue;
            relax_of[j] = relax.add_variable(lp.objective[j], 0.0,
                                             implied[j] ? kInfinity : 1.0);
            free_of.push_back(j);
        }
        double fixed_cost = 0.0;
        for (int j = 0; j < n; ++j)
            if (node.fixed[j] == 1) fixed_cost += lp.objective[j];

        bool row_infeasible = false;
        for (const Row& r : lp.rows) {
            double rhs = r.rhs;
            std::vector<std::pair<int, double>> coeffs;
            for (auto& [j, a] : r.coeffs) {
                if (node.fixed[j] >= 0) rhs -= a * node.fixed[j];
                else coeffs.push_back({relax_of[j], a});
            }
            if (coeffs.empty()) {
                const double v = 0.0;
                bool ok = true;
                switch (r.sense) {
                    case Sense::LessEqual: ok = v <= rhs + 1e-9; break;
                    case Sense::GreaterEqual: ok = v >= rhs - 1e-9; break;
                    case Sense::Equal: ok = std::fabs(v - rhs) <= 1e-9; break;
                }
                if (!ok) {
                    row_infeasible = true;
                    break;
                }
                continue;
            }
            relax.add_row(r.sense, rhs, std::move(coeffs));
        }
        if (row_infeasible) continue;

        double bound;
        std::vector<double> x;
        if (free_of.empty()) {
            bound = fixed_cost;
        } else {
            LpSolution sol = solve_lp(relax);
            if (sol.status == LpStatus::Infeasible) continue;
            if (sol.status != LpStatus::Optimal)
                throw std::runtime_error("binary relaxation did not solve to optimality");
            bound = sol.objective + fixed_cost;
            x = std::move(sol.primal);
        }
        if (bound >= incumbent - 1e-9) continue;

        int branch_var = -1;
        double most_frac = kIntTol;
        for (size_t k = 0; k < free_of.size(); ++k) {
            const double frac = std::fabs(x[k] - std::round(x[k]));
            if (frac > most_frac) {
                most_frac = frac;
                branch_var = (int)k;
            }
        }
        if (branch_var < 0) {
            // Integral: new incumbent.
            incumbent = bound;
            incumbent_values.assign(n, 0);
            for (int j = 0; j < n; ++j)
                if (node.fixed[j] == 1) incumbent_values[j] = 1;
            for (size_t k = 0; k < free_of.size(); ++k)
                incumbent_values[free_of[k]] = x[k] > 0.5 ? 1 : 0;
            continue;
        }

        const int j = free_of[branch_var];
        const int near = x[branch_var] > 0.5 ? 1 : 0;
        Node far_child{node.fixed, bound};
        far_child.fixed[j] = (signed char)(1 - near);
        Node near_child{std::move(node.fixed), bound};
        near_child.fixed[j] = (signed char)near;
        stack.push_back(std::move(far_child));
        stack.push_back(std::move(near_child));  // explored first
    }

    if (incumbent < kInfinity) {
        out.objective = incumbent;
        out.values = std::move(incumbent_values);
        if (limit_hit && open_bound_floor < incumbent - 1e-9) {
            out.status = BinaryStatus::LimitFeasible;
            out.bound = open_bound_floor;
        } else {
            out.status = BinaryStatus::Optimal;
            out.bound = incumbent;
        }
    } else if (limit_hit) {
        out.status = BinaryStatus::LimitNoIncumbent;
        out.bound = open_bound_floor == kInfinity ? 0.0 : open_bound_floor;
    } else {
        out.status = BinaryStatus::Infeasible;
    }
    return out;
}

}  // namespace detail

}  // namespace chargeplan::lp
