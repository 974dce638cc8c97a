#include <cmath>
#include <sstream>

#include "chargeplan/lp/linear_program.hpp"

namespace chargeplan::lp {

namespace {

void write_expr(std::ostream& os, const std::vector<std::pair<int, double>>& coeffs) {
    bool first = true;
    for (auto& [j, a] : coeffs) {
        if (a == 0.0) continue;
        if (first) {
            if (a < 0.0) os << "- ";
            first = false;
        } else {
            os << (a < 0.0 ? " - " : " + ");
        }
        const double mag = std::fabs(a);
        if (mag != 1.0) os << mag << " ";
        os << "x" << j;
    }
    if (first) os << "0 x0";
}

}  // namespace

void write_lp_format(const LinearProgram& lp, std::ostream& os, bool binary_vars) {
    os << "Minimize\n obj: ";
    std::vector<std::pair<int, double>> obj;
    for (int j = 0; j < lp.num_vars(); ++j)
        if (lp.objective[j] != 0.0) obj.push_back({j, lp.objective[j]});
    write_expr(os, obj);
    os << "\nSubject To\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        os << " c" << i << ": ";
        write_expr(os, lp.rows[i].coeffs);
        switch (lp.rows[i].sense) {
            case Sense::LessEqual: os << " <= "; break;
            case Sense::Equal: os << " = "; break;
            case Sense::GreaterEqual: os << " >= "; break;
        }
        os << lp.rows[i].rhs << "\n";
    }
    if (binary_vars) {
        os << "Binary\n";
        for (int j = 0; j < lp.num_vars(); ++j) os << " x" << j << "\n";
    } else {
        os << "Bounds\n";
        for (int j = 0; j < lp.num_vars(); ++j) {
            os << " " << lp.lower[j] << " <= x" << j;
            if (std::isfinite(lp.upper[j])) os << " <= " << lp.upper[j];
            os << "\n";
        }
    }
    os << "End\n";
}

std::string to_lp_format(const LinearProgram& lp, bool binary_vars) {
    std::ostringstream os;
    write_lp_format(lp, os, binary_vars);
    return os.str();
}

}  // namespace chargeplan::lp
