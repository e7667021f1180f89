#pragma once

// Compactness bookkeeping: electrical RC integration timescale versus the
// device's electrothermal timescale, and the transistor-count area estimate.

#include <iosfwd>
#include <string>
#include <vector>

#include "pmo/device_model.hpp"

namespace pmo {

struct ScalingInputs {
    double eps_r = 3.9;       // capacitor dielectric
    double d = 2e-9;          // capacitor dielectric thickness [m]
    double v = 1.0;           // firing threshold voltage [V]
    double j_d = 1e8;         // switching current density [A/m^2]
    double c_v = 5e5;         // volumetric heat capacity [J/(K m^3)]
    double delta_t = 100.0;   // temperature rise [K]
    double length = 65e-9;    // RRAM film thickness [m]

    void validate() const;
};

/// eps0 * eps_r * A / d.
[[nodiscard]] double capacitance(double eps_r, double area, double d);

/// RC charging time eps0 * eps_r * V / (d * J_D); the capacitor area cancels.
[[nodiscard]] double tau_rc(const ScalingInputs& in);

/// Same quantity with the area kept explicit: C V / I with C = eps A / d, I = J_D A.
[[nodiscard]] double tau_rc_explicit(const ScalingInputs& in, double area);

/// Electrothermal time C_v * L * dT / (V * J_D); area cancels.
[[nodiscard]] double tau_th(const ScalingInputs& in);

/// Same quantity with area explicit: C_th dT / H, C_th = C_v A L, H = V J_D A.
[[nodiscard]] double tau_th_explicit(const ScalingInputs& in, double area);

/// C_th / (A L) of a device.
[[nodiscard]] double volumetric_heat_capacity(const DeviceParams& p);

/// Operating point at the onset of thermal runaway: v is the runaway
/// threshold voltage, j_d the current density there, delta_t the steady-state
/// temperature rise just below the threshold, c_v and length from the device.
[[nodiscard]] ScalingInputs runaway_operating_point(const DeviceParams& p);

// --- area -------------------------------------------------------------------

inline constexpr double kAreaPerTransistorF2 = 100.0;

/// transistor_count * 100 F^2. Throws DomainError for negative counts.
[[nodiscard]] double estimate_area(long long transistor_count);

struct ComponentCost {
    std::string name;
    int count = 0;
    int transistors_each = 0;
};

/// Periphery of the neuron: 6 register flip-flops, the toggle OR gate, the
/// two source switches and one switchable control resistor.
[[nodiscard]] std::vector<ComponentCost> neuron_transistor_budget();
[[nodiscard]] long long total_transistors(const std::vector<ComponentCost>& budget);

struct ScalingReport {
    ScalingInputs reference;     // 2 nm SiO2, 1 V, 10 mA over 100 um^2
    double reference_capacitance = 0.0;
    double reference_tau_rc = 0.0;
    ScalingInputs matched;       // runaway operating point of the device
    double matched_tau_rc = 0.0;
    double matched_tau_th = 0.0;
    std::vector<ComponentCost> budget;
    long long transistors = 0;
    double area_f2 = 0.0;
};

[[nodiscard]] ScalingReport build_scaling_report(const DeviceParams& p);

/// Human-readable report (key: value lines).
void write_scaling_text(std::ostream& os, const ScalingReport& r);

/// Single-row CSV mirroring the benchmarking table columns for this neuron.
void write_scaling_csv(std::ostream& os, const ScalingReport& r);

}  // namespace pmo
