#pragma once

#include "pmo/device_model.hpp"

namespace pmo {

/// Source -> switch -> control resistor -> RRAM -> sense resistor.
struct SeriesNetwork {
    double r_s = 50.0;           // sense resistor; V_A is the drop across it
    double r_c_active = 0.0;     // control resistor when it is not shorted
    bool r_c_is_short = true;
    bool switch_closed = true;

    [[nodiscard]] double series_resistance() const {
        return r_s + (r_c_is_short ? 0.0 : r_c_active);
    }
    void validate() const;
};

struct OperatingPoint {
    double v_device = 0.0;
    double current = 0.0;
    double v_a = 0.0;
};

/// Splits v_in between the RRAM and the linear resistors at temperature t.
/// The residual |v_in - i R - v_device| is driven below 1e-9 * max(1 V, v_in).
[[nodiscard]] OperatingPoint solve_operating_point(double v_in, double t, const SeriesNetwork& net,
                                                   const DeviceParams& p);

/// Residual tolerance used by solve_operating_point.
[[nodiscard]] inline double operating_point_tolerance(double v_in) {
    return 1e-9 * (v_in > 1.0 ? v_in : 1.0);
}

}  // namespace pmo
