#include "pmo/scaling.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "pmo/errors.hpp"

namespace pmo {

void ScalingInputs::validate() const {
    for (double x : {eps_r, d, v, j_d, c_v, delta_t, length}) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("scaling inputs must be finite and > 0");
    }
}

double capacitance(double eps_r, double area, double d) {
    if (!(eps_r > 0.0) || !(area > 0.0) || !(d > 0.0)) {
        throw DomainError("capacitance: eps_r, area and d must be > 0");
    }
    return phys::eps0 * eps_r * area / d;
}

double tau_rc(const ScalingInputs& in) {
    in.validate();
    return phys::eps0 * in.eps_r * in.v / (in.d * in.j_d);
}

double tau_rc_explicit(const ScalingInputs& in, double area) {
    in.validate();
    const double c = capacitance(in.eps_r, area, in.d);
    const double i = in.j_d * area;
    return c * in.v / i;
}

double tau_th(const ScalingInputs& in) {
    in.validate();
    return in.c_v * in.length * in.delta_t / (in.v * in.j_d);
}

double tau_th_explicit(const ScalingInputs& in, double area) {
    in.validate();
    if (!(area > 0.0)) throw DomainError("tau_th_explicit: area must be > 0");
    const double c_th = in.c_v * area * in.length;
    const double heat = in.v * in.j_d * area;
    return c_th * in.delta_t / heat;
}

double volumetric_heat_capacity(const DeviceParams& p) { return p.c_th / (p.area * p.length); }

ScalingInputs runaway_operating_point(const DeviceParams& p) {
    p.validate();
    const double v_th = runaway_threshold(p);
    // Last stable point just below the threshold.
    double v = v_th;
    std::optional<double> t_onset;
    for (double back = 1e-6; !t_onset && back < 1.0; back *= 2.0) {
        v = v_th - back;
        t_onset = steady_state_temperature(v, p);
    }
    if (!t_onset) throw SolverError("runaway_operating_point: no stable point below threshold");
    ScalingInputs in;
    in.v = v;
    in.j_d = unclamped_current(v, *t_onset, p) / p.area;
    in.delta_t = *t_onset - p.t_amb;
    in.c_v = volumetric_heat_capacity(p);
    in.length = p.length;
    return in;
}

double estimate_area(long long transistor_count) {
    if (transistor_count < 0) throw DomainError("estimate_area: transistor count must be >= 0");
    return static_cast<double>(transistor_count) * kAreaPerTransistorF2;
}

std::vector<ComponentCost> neuron_transistor_budget() {
    // Static CMOS D flip-flop 18T, 2-input OR 6T, pass-transistor switch 1T,
    // switchable control resistor 3T.
    return {
        {"flip-flop (4-bit + 2-bit registers)", 6, 18},
        {"OR gate (toggle block)", 1, 6},
        {"source switch (S1, S2)", 2, 1},
        {"control resistor", 1, 3},
    };
}

long long total_transistors(const std::vector<ComponentCost>& budget) {
    long long total = 0;
    for (const auto& c : budget) total += static_cast<long long>(c.count) * c.transistors_each;
    return total;
}

ScalingReport build_scaling_report(const DeviceParams& p) {
    ScalingReport r;
    r.reference.eps_r = 3.9;
    r.reference.d = 2e-9;
    r.reference.v = 1.0;
    r.reference.j_d = p.i_compliance / p.area;
    r.reference.c_v = volumetric_heat_capacity(p);
    r.reference.length = p.length;
    r.reference_capacitance = capacitance(r.reference.eps_r, p.area, r.reference.d);
    r.reference_tau_rc = tau_rc(r.reference);

    r.matched = runaway_operating_point(p);
    r.matched.eps_r = r.reference.eps_r;
    r.matched.d = r.reference.d;
    r.matched_tau_rc = tau_rc(r.matched);
    r.matched_tau_th = tau_th(r.matched);

    r.budget = neuron_transistor_budget();
    r.transistors = total_transistors(r.budget);
    r.area_f2 = estimate_area(r.transistors);
    return r;
}

void write_scaling_text(std::ostream& os, const ScalingReport& r) {
    char buf[256];
    auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        os << buf << '\n';
    };
    line("reference_capacitance_f: %.6g", r.reference_capacitance);
    line("reference_tau_rc_s: %.6g", r.reference_tau_rc);
    line("matched_threshold_v: %.6g", r.matched.v);
    line("matched_current_density_a_per_m2: %.6g", r.matched.j_d);
    line("matched_delta_t_k: %.6g", r.matched.delta_t);
    line("matched_c_v_j_per_k_m3: %.6g", r.matched.c_v);
    line("matched_tau_rc_s: %.6g", r.matched_tau_rc);
    line("matched_tau_th_s: %.6g", r.matched_tau_th);
    line("timescale_ratio: %.6g", r.matched_tau_th / r.matched_tau_rc);
    for (const auto& c : r.budget) {
        line("component: %s x%d @ %dT", c.name.c_str(), c.count, c.transistors_each);
    }
    line("transistors: %lld", r.transistors);
    line("area_f2: %.6g", r.area_f2);
}

void write_scaling_csv(std::ostream& os, const ScalingReport& r) {
    os << "work,platform,circuit_type,neuron_model,spiking_behavior,refractory_period,"
          "timescale_generation,rram_usage,transistors,area_kf2,tau_rc_s,tau_th_s\n";
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "This Work,PMO + CMOS,Mixed + Asynch.,LIF,RS IB CH,Control,Electro-thermal,"
                  "Integrator + Refractory Period,%lld,%.6g,%.6g,%.6g\n",
                  r.transistors, r.area_f2 / 1e3, r.matched_tau_rc, r.matched_tau_th);
    os << buf;
}

}  // namespace pmo
