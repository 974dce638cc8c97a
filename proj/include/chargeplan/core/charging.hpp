#pragma once

#include "chargeplan/core/types.hpp"

namespace chargeplan {

// CC-CV charging curve: constant power up to the knee SOC, then the power
// tapers linearly to zero at full capacity. Instantaneous power in kW at a
// given SOC.
double charge_power_at(double soc_kwh, const TechParams& tech);

// Energy gained when charging for `duration` whole periods starting from
// `soc_kwh`. Exact integral of the CC-CV curve; never overfills the battery.
double charge_amount(double soc_kwh, const TechParams& tech, int duration_periods,
                     int period_minutes);

}  // namespace chargeplan
