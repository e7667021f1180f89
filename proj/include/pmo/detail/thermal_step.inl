#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pmo/errors.hpp"

namespace pmo {

template <class PowerFn>
std::pair<double, double> adaptive_thermal_substep(double temperature, double h_limit,
                                                   const DeviceParams& p,
                                                   const IntegratorSettings& s,
                                                   PowerFn&& power) {
    const double rate = temperature_derivative(temperature, power(temperature, 0.0), p);
    double h = std::min(h_limit, s.max_substep);
    if (rate != 0.0) h = std::min(h, s.max_temperature_step / std::abs(rate));
    h = std::max(h, std::min(s.min_substep, h_limit));

    // The first-stage estimate can be optimistic while dT/dt is still growing.
    for (;;) {
        const double next = thermal_rk4(temperature, h, p, power);
        if (!std::isfinite(next)) {
            throw IntegrationError("thermal substep produced a non-finite temperature");
        }
        if (std::abs(next - temperature) <= 1.5 * s.max_temperature_step) return {next, h};
        if (h <= s.min_substep) {
            throw IntegrationError("thermal substep underflow at T=" + std::to_string(temperature) +
                                   " K (substep floor " + std::to_string(s.min_substep) + " s)");
        }
        h = std::max(0.5 * h, s.min_substep);
    }
}

}  // namespace pmo
