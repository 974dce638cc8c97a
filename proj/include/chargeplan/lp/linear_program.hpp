#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace chargeplan::lp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kFeasibilityTol = 1e-7;
constexpr double kReducedCostTol = 1e-6;

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

struct LinearProgram {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Row> rows;

    int num_vars() const { return (int)objective.size(); }
    int num_rows() const { return (int)rows.size(); }

    int add_variable(double obj, double lb = 0.0, double ub = kInfinity) {
        objective.push_back(obj);
        lower.push_back(lb);
        upper.push_back(ub);
        return num_vars() - 1;
    }

    int add_row(Sense sense, double rhs, std::vector<std::pair<int, double>> coeffs) {
        rows.push_back(Row{std::move(coeffs), sense, rhs});
        return num_rows() - 1;
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

// Basis entry usable as a warm start across re-solves. Entries stay valid
// when variables or rows are appended to the program.
struct BasisEntry {
    bool is_logical = false;  // slack/surplus of `index`-th row instead of a variable
    int index = 0;
};

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    double objective = 0.0;
    std::vector<double> primal;
    std::vector<double> duals;  // one per row; <= rows yield non-positive duals
    std::vector<BasisEntry> basis;
    int iterations = 0;
};

struct BinaryLimits {
    long max_nodes = -1;           // negative: unlimited
    double time_limit_seconds = -1.0;
};

enum class BinaryStatus { Optimal, LimitFeasible, Infeasible, LimitNoIncumbent };

struct BinarySolution {
    BinaryStatus status = BinaryStatus::Infeasible;
    double objective = 0.0;  // incumbent value when one exists
    double bound = 0.0;      // proven lower bound on the optimum
    std::vector<char> values;
    long nodes = 0;
};

// Solver entry points. Both calls are stateless per problem; distinct
// problems may be solved concurrently. They dispatch through the active
// backend, so an external solver can replace the embedded kernel without
// touching call sites.
LpSolution solve_lp(const LinearProgram& lp, const std::vector<BasisEntry>* warm_start = nullptr);
BinarySolution solve_binary(const LinearProgram& lp, const BinaryLimits& limits = {});

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual LpSolution solve_lp(const LinearProgram& lp,
                                const std::vector<BasisEntry>* warm_start) = 0;
    virtual BinarySolution solve_binary(const LinearProgram& lp, const BinaryLimits& limits) = 0;
};

SolverBackend& embedded_backend();
SolverBackend& active_backend();
// Installs a replacement backend; nullptr restores the embedded kernel.
// Not meant to be swapped while solves are in flight.
void set_solver_backend(SolverBackend* backend);

// Debug dump in the standard LP text format.
void write_lp_format(const LinearProgram& lp, std::ostream& os, bool binary_vars = false);
std::string to_lp_format(const LinearProgram& lp, bool binary_vars = false);

}  // namespace chargeplan::lp
