#include "chargeplan/core/charging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chargeplan {

double charge_power_at(double soc_kwh, const TechParams& tech) {
    const double q_max = tech.q_max_kwh;
    const double knee_kwh = tech.cc_cv_knee * q_max;
    if (soc_kwh >= q_max) return 0.0;
    if (soc_kwh < knee_kwh || tech.cc_cv_knee >= 1.0) return tech.charge_power_kw;
    return tech.charge_power_kw * (q_max - soc_kwh) / (q_max - knee_kwh);
}

double charge_amount(double soc_kwh, const TechParams& tech, int duration_periods,
                     int period_minutes) {
    if (duration_periods < 1) throw std::invalid_argument("charge duration must be >= 1 period");
    const double q_max = tech.q_max_kwh;
    const double power = tech.charge_power_kw;
    double q = std::clamp(soc_kwh, 0.0, q_max);
    const double start = q;
    double hours = duration_periods * period_minutes / 60.0;

    const double knee_kwh = tech.cc_cv_knee * q_max;
    if (q < knee_kwh) {
        const double to_knee_h = (knee_kwh - q) / power;
        if (hours <= to_knee_h) return q + power * hours - start;
        q = knee_kwh;
        hours -= to_knee_h;
    }
    if (tech.cc_cv_knee >= 1.0) {
        // No taper segment: constant power until full.
        q = std::min(q_max, q + power * hours);
        return q - start;
    }
    // Taper segment: dq/dt = power * (q_max - q) / (q_max - knee), an
    // exponential approach to q_max.
    const double tau = (q_max - knee_kwh) / power;
    q = q_max - (q_max - q) * std::exp(-hours / tau);
    return std::min(q, q_max) - start;
}

}  // namespace chargeplan
