#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chargeplan/lp/linear_program.hpp"

namespace chargeplan::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kRefactorInterval = 128;

// Revised primal simplex over the standard form min c'x, Ax = b, x >= 0.
// Variables are shifted by their lower bounds; finite upper bounds become
// explicit rows. The basis inverse is kept dense, which is adequate for the
// row counts the master problems produce.
class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

    LpSolution run(const std::vector<BasisEntry>* warm_start) {
        LpSolution out;
        bool warm_ok = warm_start && try_warm_basis(*warm_start);
        for (int attempt = 0; attempt < 3; ++attempt) {
            bool force_bland = attempt > 0;
            if (!warm_ok || attempt > 0) install_crash_basis();
            SolveOutcome outcome = solve_two_phase(force_bland);
            if (outcome == SolveOutcome::NumericalTrouble) {
                warm_ok = false;
                continue;  // bounded Bland's-rule restarts
            }
            fill_solution(out, outcome);
            if (out.status == LpStatus::Optimal && !passes_postchecks(out)) {
                warm_ok = false;
                continue;
            }
            return out;
        }
        out.status = LpStatus::IterationLimit;
        return out;
    }

private:
    enum class SolveOutcome { Optimal, Infeasible, Unbounded, IterationLimit, NumericalTrouble };

    const LinearProgram& lp_;

    int m_ = 0;               // standard-form rows
    int n_struct_ = 0;        // structural variables
    int n_total_ = 0;         // structurals + logicals + artificials
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> cost_;         // phase-2 costs
    std::vector<double> b_;            // standard-form rhs (non-negative)
    std::vector<double> row_sign_;     // +1/-1 vs the original row
    std::vector<int> logical_of_row_;  // slack/surplus column per row, -1 if none
    std::vector<int> artificial_of_row_;
    std::vector<char> is_artificial_;
    int num_user_rows_ = 0;

    std::vector<int> basis_;
    std::vector<char> in_basis_;
    std::vector<double> binv_;  // m x m row-major
    std::vector<double> xb_;
    int iterations_ = 0;

    double& binv(int i, int k) { return binv_[(size_t)i * m_ + k]; }
    double binv_at(int i, int k) const { return binv_[(size_t)i * m_ + k]; }

    void build() {
        const int n = lp_.num_vars();
        n_struct_ = n;
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(lp_.lower[j]))
                throw std::invalid_argument("variables require finite lower bounds");
        }
        // User rows first, then upper-bound rows.
        std::vector<Row> all_rows = lp_.rows;
        num_user_rows_ = (int)all_rows.size();
        for (int j = 0; j < n; ++j) {
            if (std::isfinite(lp_.upper[j])) {
                Row r;
                r.coeffs = {{j, 1.0}};
                r.sense = Sense::LessEqual;
                r.rhs = lp_.upper[j];
                all_rows.push_back(std::move(r));
            }
        }
        m_ = (int)all_rows.size();

        cols_.assign(n, {});
        cost_.assign(n, 0.0);
        for (int j = 0; j < n; ++j) cost_[j] = lp_.objective[j];
        b_.assign(m_, 0.0);
        row_sign_.assign(m_, 1.0);
        logical_of_row_.assign(m_, -1);
        artificial_of_row_.assign(m_, -1);

        std::vector<Sense> sense(m_);
        for (int i = 0; i < m_; ++i) {
            double rhs = all_rows[i].rhs;
            for (auto& [j, a] : all_rows[i].coeffs) rhs -= a * lp_.lower[j];
            double sgn = 1.0;
            Sense s = all_rows[i].sense;
            if (rhs < 0.0) {
                sgn = -1.0;
                rhs = -rhs;
                if (s == Sense::LessEqual) s = Sense::GreaterEqual;
                else if (s == Sense::GreaterEqual) s = Sense::LessEqual;
            }
            row_sign_[i] = sgn;
            b_[i] = rhs;
            sense[i] = s;
            for (auto& [j, a] : all_rows[i].coeffs)
                if (a != 0.0) cols_[j].push_back({i, sgn * a});
        }

        for (int i = 0; i < m_; ++i) {
            if (sense[i] == Sense::Equal) continue;
            logical_of_row_[i] = (int)cols_.size();
            cols_.push_back({{i, sense[i] == Sense::LessEqual ? 1.0 : -1.0}});
            cost_.push_back(0.0);
        }
        for (int i = 0; i < m_; ++i) {
            if (sense[i] == Sense::LessEqual) continue;
            artificial_of_row_[i] = (int)cols_.size();
            cols_.push_back({{i, 1.0}});
            cost_.push_back(0.0);
        }
        n_total_ = (int)cols_.size();
        is_artificial_.assign(n_total_, 0);
        for (int i = 0; i < m_; ++i)
            if (artificial_of_row_[i] >= 0) is_artificial_[artificial_of_row_[i]] = 1;
    }

    void install_crash_basis() {
        basis_.assign(m_, -1);
        for (int i = 0; i < m_; ++i)
            basis_[i] = artificial_of_row_[i] >= 0 ? artificial_of_row_[i] : logical_of_row_[i];
        in_basis_.assign(n_total_, 0);
        for (int j : basis_) in_basis_[j] = 1;
        binv_.assign((size_t)m_ * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv(i, i) = 1.0;
        recompute_xb();
    }

    bool try_warm_basis(const std::vector<BasisEntry>& warm) {
        if ((int)warm.size() != m_) return false;
        std::vector<int> cand(m_, -1);
        std::vector<char> used(n_total_, 0);
        for (int i = 0; i < m_; ++i) {
            int col;
            if (warm[i].is_logical) {
                if (warm[i].index < 0 || warm[i].index >= m_) return false;
                col = logical_of_row_[warm[i].index];
            } else {
                if (warm[i].index < 0 || warm[i].index >= n_struct_) return false;
                col = warm[i].index;
            }
            if (col < 0 || used[col]) return false;
            used[col] = 1;
            cand[i] = col;
        }
        if (!factorize(cand)) return false;
        recompute_xb();
        for (double v : xb_)
            if (v < -kFeasibilityTol) return false;  // stale basis: fall back to phase 1
        return true;
    }

    bool factorize(const std::vector<int>& candidate) {
        // Gauss-Jordan inversion of the candidate basis matrix.
        std::vector<double> mat((size_t)m_ * m_, 0.0);
        std::vector<double> inv((size_t)m_ * m_, 0.0);
        for (int c = 0; c < m_; ++c)
            for (auto& [i, a] : cols_[candidate[c]]) mat[(size_t)i * m_ + c] = a;
        for (int i = 0; i < m_; ++i) inv[(size_t)i * m_ + i] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = -1;
            double best = 1e-10;
            for (int r = col; r < m_; ++r) {
                double v = std::fabs(mat[(size_t)r * m_ + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (piv < 0) return false;
            if (piv != col) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(mat[(size_t)piv * m_ + k], mat[(size_t)col * m_ + k]);
                    std::swap(inv[(size_t)piv * m_ + k], inv[(size_t)col * m_ + k]);
                }
            }
            const double d = mat[(size_t)col * m_ + col];
            for (int k = 0; k < m_; ++k) {
                mat[(size_t)col * m_ + k] /= d;
                inv[(size_t)col * m_ + k] /= d;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = mat[(size_t)r * m_ + col];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    mat[(size_t)r * m_ + k] -= f * mat[(size_t)col * m_ + k];
                    inv[(size_t)r * m_ + k] -= f * inv[(size_t)col * m_ + k];
                }
            }
        }
        // The permutation applied to `mat` rows is shared by `inv`, so `inv`
        // now holds B^-1 with basis order `candidate`.
        basis_ = candidate;
        in_basis_.assign(n_total_, 0);
        for (int j : basis_) in_basis_[j] = 1;
        binv_ = std::move(inv);
        return true;
    }

    void recompute_xb() {
        xb_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double v = 0.0;
            for (int k = 0; k < m_; ++k) v += binv_at(i, k) * b_[k];
            xb_[i] = v;
        }
    }

    std::vector<double> dual_prices(const std::vector<double>& costs) const {
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const double cb = costs[basis_[i]];
            if (cb == 0.0) continue;
            for (int k = 0; k < m_; ++k) y[k] += cb * binv_at(i, k);
        }
        return y;
    }

    double phase_objective(const std::vector<double>& costs) const {
        double v = 0.0;
        for (int i = 0; i < m_; ++i) v += costs[basis_[i]] * xb_[i];
        return v;
    }

    SolveOutcome iterate(const std::vector<double>& costs, bool force_bland) {
        const long iteration_cap = 2000 + 200L * (m_ + n_total_);
        int stall = 0;
        double last_obj = phase_objective(costs);
        int since_refactor = 0;
        while (true) {
            if (++iterations_ > iteration_cap) return SolveOutcome::IterationLimit;
            const bool bland = force_bland || stall > 2 * m_ + 50;
            const std::vector<double> y = dual_prices(costs);
            int enter = -1;
            double best = -kReducedCostTol;
            for (int j = 0; j < n_total_; ++j) {
                if (in_basis_[j] || is_artificial_[j]) continue;
                double d = costs[j];
                for (auto& [i, a] : cols_[j]) d -= y[i] * a;
                if (d < -kReducedCostTol) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (d < best) {
                        best = d;
                        enter = j;
                    }
                }
            }
            if (enter < 0) return SolveOutcome::Optimal;

            std::vector<double> w(m_, 0.0);
            for (auto& [k, a] : cols_[enter])
                for (int i = 0; i < m_; ++i) w[i] += binv_at(i, k) * a;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m_; ++i) {
                if (w[i] <= kPivotTol) continue;
                const double ratio = std::max(0.0, xb_[i]) / w[i];
                bool better = leave < 0 || ratio < best_ratio - 1e-12;
                if (!better && leave >= 0 && std::fabs(ratio - best_ratio) <= 1e-12) {
                    // Tie break: kick artificials first, then lowest column id.
                    const bool cand_art = is_artificial_[basis_[i]];
                    const bool cur_art = is_artificial_[basis_[leave]];
                    if (cand_art && !cur_art) better = true;
                    else if (cand_art == cur_art && basis_[i] < basis_[leave]) better = true;
                }
                if (better) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return SolveOutcome::Unbounded;

            const double piv = w[leave];
            for (int k = 0; k < m_; ++k) binv(leave, k) /= piv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave || w[i] == 0.0) continue;
                const double f = w[i];
                for (int k = 0; k < m_; ++k) binv(i, k) -= f * binv_at(leave, k);
            }
            in_basis_[basis_[leave]] = 0;
            basis_[leave] = enter;
            in_basis_[enter] = 1;

            if (++since_refactor >= kRefactorInterval) {
                since_refactor = 0;
                if (!factorize(basis_)) return SolveOutcome::NumericalTrouble;
            }
            recompute_xb();

            const double obj = phase_objective(costs);
            if (obj < last_obj - 1e-12) {
                stall = 0;
                last_obj = obj;
            } else {
                ++stall;
            }
        }
    }

    void pivot_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (!is_artificial_[basis_[i]]) continue;
            for (int j = 0; j < n_total_; ++j) {
                if (in_basis_[j] || is_artificial_[j]) continue;
                double wij = 0.0;
                for (auto& [k, a] : cols_[j]) wij += binv_at(i, k) * a;
                if (std::fabs(wij) < 1e-7) continue;
                std::vector<double> w(m_, 0.0);
                for (auto& [k, a] : cols_[j])
                    for (int r = 0; r < m_; ++r) w[r] += binv_at(r, k) * a;
                for (int k = 0; k < m_; ++k) binv(i, k) /= wij;
                for (int r = 0; r < m_; ++r) {
                    if (r == i || w[r] == 0.0) continue;
                    for (int k = 0; k < m_; ++k) binv(r, k) -= w[r] * binv_at(i, k);
                }
                in_basis_[basis_[i]] = 0;
                basis_[i] = j;
                in_basis_[j] = 1;
                break;
            }
            // A row whose artificial cannot leave is redundant; the artificial
            // stays basic at zero and never re-enters.
        }
        recompute_xb();
    }

    SolveOutcome solve_two_phase(bool force_bland) {
        bool has_art = false;
        for (int j : basis_) has_art |= (bool)is_artificial_[j];
        if (has_art) {
            std::vector<double> phase1(n_total_, 0.0);
            for (int j = 0; j < n_total_; ++j)
                if (is_artificial_[j]) phase1[j] = 1.0;
            SolveOutcome r = iterate(phase1, force_bland);
            if (r == SolveOutcome::Unbounded) return SolveOutcome::NumericalTrouble;
            if (r != SolveOutcome::Optimal) return r;
            double btotal = 0.0;
            for (double v : b_) btotal += std::fabs(v);
            if (phase_objective(phase1) > kFeasibilityTol * (1.0 + btotal))
                return SolveOutcome::Infeasible;
            pivot_out_artificials();
        }
        return iterate(cost_, force_bland);
    }

    void fill_solution(LpSolution& out, SolveOutcome outcome) {
        out.iterations = iterations_;
        switch (outcome) {
            case SolveOutcome::Optimal: out.status = LpStatus::Optimal; break;
            case SolveOutcome::Infeasible: out.status = LpStatus::Infeasible; break;
            case SolveOutcome::Unbounded: out.status = LpStatus::Unbounded; break;
            default: out.status = LpStatus::IterationLimit; break;
        }
        if (out.status == LpStatus::Infeasible) {
            // Phase-1 prices serve as the infeasibility certificate.
            std::vector<double> phase1(n_total_, 0.0);
            for (int j = 0; j < n_total_; ++j)
                if (is_artificial_[j]) phase1[j] = 1.0;
            std::vector<double> y = dual_prices(phase1);
            out.duals.assign(num_user_rows_, 0.0);
            for (int i = 0; i < num_user_rows_; ++i) out.duals[i] = row_sign_[i] * y[i];
            return;
        }
        if (out.status != LpStatus::Optimal) return;

        out.primal.assign(n_struct_, 0.0);
        for (int j = 0; j < n_struct_; ++j) out.primal[j] = lp_.lower[j];
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_struct_) out.primal[basis_[i]] += std::max(0.0, xb_[i]);
        out.objective = 0.0;
        for (int j = 0; j < n_struct_; ++j) out.objective += lp_.objective[j] * out.primal[j];

        const std::vector<double> y = dual_prices(cost_);
        out.duals.assign(num_user_rows_, 0.0);
        for (int i = 0; i < num_user_rows_; ++i) out.duals[i] = row_sign_[i] * y[i];

        out.basis.clear();
        out.basis.reserve(m_);
        for (int i = 0; i < m_; ++i) {
            BasisEntry e;
            const int j = basis_[i];
            if (j < n_struct_) {
                e.is_logical = false;
                e.index = j;
            } else {
                e.is_logical = true;
                e.index = row_of_logical(j);
            }
            out.basis.push_back(e);
        }
    }

    int row_of_logical(int col) const {
        for (int i = 0; i < m_; ++i)
            if (logical_of_row_[i] == col || artificial_of_row_[i] == col) return i;
        return 0;
    }

    // Validates the optimal solution: primal feasibility within 1e-7 per
    // unit of rhs, strong duality within 1e-6 relative, complementary
    // slackness within 1e-6.
    bool passes_postchecks(const LpSolution& out) const {
        for (int i = 0; i < num_user_rows_; ++i) {
            double lhs = 0.0;
            for (auto& [j, a] : lp_.rows[i].coeffs) lhs += a * out.primal[j];
            const double scale = 1.0 + std::fabs(lp_.rows[i].rhs);
            double viol = 0.0;
            switch (lp_.rows[i].sense) {
                case Sense::LessEqual: viol = lhs - lp_.rows[i].rhs; break;
                case Sense::GreaterEqual: viol = lp_.rows[i].rhs - lhs; break;
                case Sense::Equal: viol = std::fabs(lhs - lp_.rows[i].rhs); break;
            }
            if (viol > 100 * kFeasibilityTol * scale) return false;
        }

        // Reduced costs in the original space use only the user-row duals;
        // bound-row duals are folded into negative reduced costs.
        std::vector<double> rc(lp_.objective);
        for (int i = 0; i < num_user_rows_; ++i) {
            if (out.duals[i] == 0.0) continue;
            for (auto& [j, a] : lp_.rows[i].coeffs) rc[j] -= out.duals[i] * a;
        }
        double dual_obj = 0.0;
        for (int i = 0; i < num_user_rows_; ++i) dual_obj += out.duals[i] * lp_.rows[i].rhs;
        for (int j = 0; j < n_struct_; ++j) {
            if (rc[j] > 0.0) dual_obj += rc[j] * lp_.lower[j];
            else if (rc[j] < 0.0) {
                if (!std::isfinite(lp_.upper[j])) {
                    if (rc[j] < -1e-5) return false;  // dual infeasible
                    continue;
                }
                dual_obj += rc[j] * lp_.upper[j];
            }
        }
        if (std::fabs(dual_obj - out.objective) > 1e-6 * (1.0 + std::fabs(out.objective)))
            return false;

        // Complementary slackness on the user rows.
        for (int i = 0; i < num_user_rows_; ++i) {
            if (lp_.rows[i].sense == Sense::Equal) continue;
            double lhs = 0.0;
            for (auto& [j, a] : lp_.rows[i].coeffs) lhs += a * out.primal[j];
            const double slack = lp_.rows[i].rhs - lhs;
            if (std::fabs(out.duals[i] * slack) > 1e-6 * (1.0 + std::fabs(lp_.rows[i].rhs)))
                return false;
        }
        return true;
    }
};

}  // namespace

namespace detail {
BinarySolution embedded_solve_binary(const LinearProgram& lp, const BinaryLimits& limits);
}

namespace {

class EmbeddedBackend : public SolverBackend {
public:
    LpSolution solve_lp(const LinearProgram& lp,
                        const std::vector<BasisEntry>* warm_start) override {
        Simplex s(lp);
        return s.run(warm_start);
    }
    BinarySolution solve_binary(const LinearProgram& lp, const BinaryLimits& limits) override {
        return detail::embedded_solve_binary(lp, limits);
    }
};

SolverBackend* g_active_backend = nullptr;

}  // namespace

SolverBackend& embedded_backend() {
    static EmbeddedBackend backend;
    return backend;
}

SolverBackend& active_backend() {
    return g_active_backend ? *g_active_backend : embedded_backend();
}

void set_solver_backend(SolverBackend* backend) { g_active_backend = backend; }

LpSolution solve_lp(const LinearProgram& lp, const std::vector<BasisEntry>* warm_start) {
    return active_backend().solve_lp(lp, warm_start);
}

BinarySolution solve_binary(const LinearProgram& lp, const BinaryLimits& limits) {
    return active_backend().solve_binary(lp, limits);
}

}  // namespace chargeplan::lp
