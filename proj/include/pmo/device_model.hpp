#pragma once

// Electrothermal model of a PrMnO3 RRAM held in its low-resistance state.
//
// Conduction is the sum of a thermally activated ohmic channel and a
// trap-limited space-charge-limited channel. Both depend on one lumped
// "effective" temperature that obeys a single R_th/C_th heat balance.
// Everything here is SI; unit-suffixed config values are converted at load time.

#include <functional>
#include <optional>
#include <utility>

namespace pmo {

namespace phys {
inline constexpr double q = 1.602176634e-19;          // C
inline constexpr double k_b = 1.380649e-23;           // J/K
inline constexpr double eps0 = 8.8541878128e-12;      // F/m
}  // namespace phys

struct DeviceParams {
    double mu = 17.5e-4;          // m^2/(V s)
    double phi_b = 0.3151;        // eV
    double eps_pmo = 30.0;
    double n_v = 8.16e25;         // m^-3
    double e_trap = 0.06;         // eV
    double n_t = 3.15e27;         // m^-3
    double length = 65e-9;        // m
    double area = 1e-10;          // m^2
    double t_amb = 300.0;         // K
    double r_th = 3e4;            // K/W
    double c_th = 3.25e-12;       // J/K
    double i_compliance = 10e-3;  // A

    /// Reference PMO stack (10x10 um^2, 65 nm film, 10 mA compliance).
    static DeviceParams reference() { return {}; }

    /// Builds parameters from the customary lab units:
    /// cm^2/Vs, eV, cm^-3, nm, um^2, K, K/W, pJ/K, mA.
    static DeviceParams from_lab_units(double mu_cm2_per_vs, double phi_b_ev, double eps_pmo,
                                       double n_v_per_cm3, double e_trap_ev, double n_t_per_cm3,
                                       double length_nm, double area_um2, double t_amb_k,
                                       double r_th_k_per_w, double c_th_pj_per_k,
                                       double i_compliance_ma);

    /// Thermal time constant r_th * c_th.
    [[nodiscard]] double thermal_tau() const { return r_th * c_th; }

    /// Throws DomainError unless every field is finite and strictly positive.
    void validate() const;
};

struct DeviceState {
    double temperature = 300.0;
    double current = 0.0;
    double time = 0.0;

    static DeviceState ambient(const DeviceParams& p) { return {p.t_amb, 0.0, 0.0}; }
};

/// Substep control for the explicit thermal integrator.
struct IntegratorSettings {
    double max_temperature_step = 0.5;  // K per substep
    double min_substep = 1e-12;         // s
    double max_substep = 2e-9;          // s
    double event_resolution = 1e-12;    // s, crossing localisation
    double max_duration = 1e-3;         // s, give-up horizon for spike searches

    void validate() const;
};

// --- conduction -----------------------------------------------------------

[[nodiscard]] double ohmic_current(double v, double t, const DeviceParams& p);
[[nodiscard]] double sclc_current(double v, double t, const DeviceParams& p);

/// Ohmic + SCLC without the compliance limit.
[[nodiscard]] double unclamped_current(double v, double t, const DeviceParams& p);

/// Ohmic + SCLC, hard-limited at p.i_compliance.
[[nodiscard]] double total_current(double v, double t, const DeviceParams& p);

// --- heat balance -----------------------------------------------------------

/// dT/dt = (P - (T - T_amb)/R_th) / C_th.
[[nodiscard]] double temperature_derivative(double t, double power, const DeviceParams& p);

/// One explicit RK4 substep of the heat balance. `power(T, dt)` returns the
/// dissipated power at temperature T, dt seconds into the substep; current is
/// re-evaluated at every stage temperature.
template <class PowerFn>
double thermal_rk4(double temperature, double h, const DeviceParams& p, PowerFn&& power) {
    const double k1 = temperature_derivative(temperature, power(temperature, 0.0), p);
    const double t2 = temperature + 0.5 * h * k1;
    const double k2 = temperature_derivative(t2, power(t2, 0.5 * h), p);
    const double t3 = temperature + 0.5 * h * k2;
    const double k3 = temperature_derivative(t3, power(t3, 0.5 * h), p);
    const double t4 = temperature + h * k3;
    const double k4 = temperature_derivative(t4, power(t4, h), p);
    return temperature + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Chooses a substep so that the predicted temperature change stays within
/// the cap, then takes it, halving on overshoot. Returns {new T, h used}.
/// Throws IntegrationError if the substep falls below settings.min_substep.
template <class PowerFn>
std::pair<double, double> adaptive_thermal_substep(double temperature, double h_limit,
                                                   const DeviceParams& p,
                                                   const IntegratorSettings& s,
                                                   PowerFn&& power);

/// Advances the device under a constant voltage magnitude for dt_max seconds.
[[nodiscard]] DeviceState step_state(const DeviceState& state, double v, double dt_max,
                                     const DeviceParams& p, const IntegratorSettings& s = {});

// --- fixed points and runaway -----------------------------------------------

/// First temperature in [t0, t_stop) where heating no longer exceeds the
/// loss to ambient, given power(T) at fixed bias; nullopt if heating wins
/// over the whole interval. Tangent roots between scan points are caught by
/// minimising the imbalance around local dips.
[[nodiscard]] std::optional<double> first_balance_root(const std::function<double(double)>& power,
                                                       double t0, double t_stop,
                                                       const DeviceParams& p);

/// Smallest temperature at which the unclamped current reaches compliance.
[[nodiscard]] double compliance_temperature(double v, const DeviceParams& p);

/// Lowest stable fixed point of the heat balance at constant v, or nullopt
/// when heating runs away into compliance.
[[nodiscard]] std::optional<double> steady_state_temperature(double v, const DeviceParams& p);

/// First fixed point at or above t0 (the one a trajectory started at t0
/// would settle onto), or nullopt if the trajectory reaches compliance.
[[nodiscard]] std::optional<double> fixed_point_above(double v, double t0, const DeviceParams& p);

/// Smallest voltage without a stable fixed point, located by bisection.
[[nodiscard]] double runaway_threshold(const DeviceParams& p, double v_max = 10.0,
                                       double tol = 1e-6);

/// Time for the current to reach compliance under constant v starting from
/// temperature t0; nullopt if the device settles below compliance instead.
[[nodiscard]] std::optional<double> spike_time(double v, const DeviceParams& p, double t0,
                                               const IntegratorSettings& s = {});
[[nodiscard]] inline std::optional<double> spike_time(double v, const DeviceParams& p) {
    return spike_time(v, p, p.t_amb);
}

}  // namespace pmo

#include "pmo/detail/thermal_step.inl"
