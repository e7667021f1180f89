#include "pmo/device_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pmo/errors.hpp"

namespace pmo {

namespace {

void check_operating_point(double v, double t, const char* where) {
    if (!std::isfinite(v) || !std::isfinite(t) || v < 0.0 || t <= 0.0) {
        throw DomainError(std::string(where) + ": need finite v >= 0 and T > 0 (got v=" +
                          std::to_string(v) + ", T=" + std::to_string(t) + ")");
    }
}

double thermal_prefactor(double t, const DeviceParams& p) {
    return std::pow(t / p.t_amb, 1.5);
}

using PowerFn = std::function<double(double)>;

struct Imbalance {
    const PowerFn& power;
    const DeviceParams& p;
    double operator()(double t) const { return power(t) - (t - p.t_amb) / p.r_th; }
};

double bisect_root(const Imbalance& f, double lo, double hi) {
    // f(lo) > 0 >= f(hi)
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid; else hi = mid;
    }
    return hi;
}

// Golden-section minimum of the imbalance on [a, b]; returns {T, f(T)}.
std::pair<double, double> imbalance_minimum(const Imbalance& f, double a, double b) {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < 80 && b - a > 1e-9; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

constexpr double kScanStep = 0.25;      // K
constexpr double kMaxTemperature = 1e5;  // K, beyond this compliance is "never"

}  // namespace

DeviceParams DeviceParams::from_lab_units(double mu_cm2_per_vs, double phi_b_ev, double eps_pmo,
                                          double n_v_per_cm3, double e_trap_ev,
                                          double n_t_per_cm3, double length_nm, double area_um2,
                                          double t_amb_k, double r_th_k_per_w,
                                          double c_th_pj_per_k, double i_compliance_ma) {
    DeviceParams p;
    p.mu = mu_cm2_per_vs * 1e-4;
    p.phi_b = phi_b_ev;
    p.eps_pmo = eps_pmo;
    p.n_v = n_v_per_cm3 * 1e6;
    p.e_trap = e_trap_ev;
    p.n_t = n_t_per_cm3 * 1e6;
    p.length = length_nm * 1e-9;
    p.area = area_um2 * 1e-12;
    p.t_amb = t_amb_k;
    p.r_th = r_th_k_per_w;
    p.c_th = c_th_pj_per_k * 1e-12;
    p.i_compliance = i_compliance_ma * 1e-3;
    p.validate();
    return p;
}

void DeviceParams::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"mu", mu},       {"phi_b", phi_b}, {"eps_pmo", eps_pmo}, {"n_v", n_v},
        {"e_trap", e_trap}, {"n_t", n_t},   {"length", length},   {"area", area},
        {"t_amb", t_amb}, {"r_th", r_th},   {"c_th", c_th},       {"i_compliance", i_compliance},
    };
    for (const auto& [name, value] : fields) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw DomainError(std::string("device parameter '") + name +
                              "' must be finite and > 0 (got " + std::to_string(value) + ")");
        }
    }
}

void IntegratorSettings::validate() const {
    if (!(max_temperature_step > 0.0) || !(min_substep > 0.0) || !(max_substep >= min_substep) ||
        !(event_resolution > 0.0) || !(max_duration > 0.0)) {
        throw DomainError("integrator settings must be positive with max_substep >= min_substep");
    }
}

double ohmic_current(double v, double t, const DeviceParams& p) {
    check_operating_point(v, t, "ohmic_current");
    return phys::q * p.area * p.mu * p.n_v * thermal_prefactor(t, p) *
           std::exp(-phys::q * p.phi_b / (phys::k_b * t)) * (v / p.length);
}

double sclc_current(double v, double t, const DeviceParams& p) {
    check_operating_point(v, t, "sclc_current");
    return p.area * p.mu * phys::eps0 * p.eps_pmo * (p.n_v / p.n_t) * thermal_prefactor(t, p) *
           std::exp(-phys::q * p.e_trap / (phys::k_b * t)) * (v * v / (p.length * p.length * p.length));
}

double unclamped_current(double v, double t, const DeviceParams& p) {
    return ohmic_current(v, t, p) + sclc_current(v, t, p);
}

double total_current(double v, double t, const DeviceParams& p) {
    return std::min(unclamped_current(v, t, p), p.i_compliance);
}

double temperature_derivative(double t, double power, const DeviceParams& p) {
    if (!std::isfinite(t) || !std::isfinite(power)) {
        throw DomainError("temperature_derivative: non-finite input");
    }
    return (power - (t - p.t_amb) / p.r_th) / p.c_th;
}

DeviceState step_state(const DeviceState& state, double v, double dt_max, const DeviceParams& p,
                       const IntegratorSettings& s) {
    check_operating_point(v, state.temperature, "step_state");
    if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw DomainError("step_state: dt_max must be > 0");

    auto power = [&](double t, double) { return total_current(v, t, p) * v; };
    double t = state.temperature;
    double elapsed = 0.0;
    while (elapsed < dt_max) {
        const double remaining = dt_max - elapsed;
        const auto [next, h] = adaptive_thermal_substep(t, remaining, p, s, power);
        t = next;
        elapsed = (h >= remaining) ? dt_max : elapsed + h;
    }
    return {t, total_current(v, t, p), state.time + dt_max};
}

double compliance_temperature(double v, const DeviceParams& p) {
    check_operating_point(v, p.t_amb, "compliance_temperature");
    if (v == 0.0) return std::numeric_limits<double>::infinity();
    if (unclamped_current(v, p.t_amb, p) >= p.i_compliance) return p.t_amb;
    double lo = p.t_amb;
    double hi = 2.0 * p.t_amb;
    while (unclamped_current(v, hi, p) < p.i_compliance) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxTemperature) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (unclamped_current(v, mid, p) >= p.i_compliance) hi = mid; else lo = mid;
    }
    return hi;
}

std::optional<double> first_balance_root(const std::function<double(double)>& power, double t0,
                                         double t_stop, const DeviceParams& p) {
    const Imbalance f{power, p};
    double f_prev = f(t0);
    if (f_prev <= 0.0) return t0;

    const double t_end = std::min(t_stop, kMaxTemperature);
    double t_prev = t0;
    double t_prev2 = t0;
    double f_prev2 = f_prev;
    while (t_prev < t_end) {
        const double t = std::min(t_prev + kScanStep, t_end);
        const double ft = f(t);
        if (ft <= 0.0) return bisect_root(f, t_prev, t);
        if (t_prev > t_prev2 && f_prev < f_prev2 && f_prev < ft) {
            const auto [t_min, f_min] = imbalance_minimum(f, t_prev2, t);
            if (f_min <= 0.0) return bisect_root(f, t_prev2, t_min);
        }
        t_prev2 = t_prev; f_prev2 = f_prev;
        t_prev = t; f_prev = ft;
    }
    return std::nullopt;
}

std::optional<double> fixed_point_above(double v, double t0, const DeviceParams& p) {
    check_operating_point(v, t0, "fixed_point_above");
    const double t_c = compliance_temperature(v, p);
    if (t0 >= t_c) return std::nullopt;
    return first_balance_root([&](double t) { return unclamped_current(v, t, p) * v; }, t0, t_c, p);
}

std::optional<double> steady_state_temperature(double v, const DeviceParams& p) {
    if (v == 0.0) return p.t_amb;
    return fixed_point_above(v, p.t_amb, p);
}

double runaway_threshold(const DeviceParams& p, double v_max, double tol) {
    if (steady_state_temperature(v_max, p)) {
        throw SolverError("runaway_threshold: device is still stable at v_max=" +
                          std::to_string(v_max) + " V");
    }
    double lo = 0.0;
    double hi = v_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (steady_state_temperature(mid, p)) lo = mid; else hi = mid;
    }
    return hi;
}

std::optional<double> spike_time(double v, const DeviceParams& p, double t0,
                                 const IntegratorSettings& s) {
    check_operating_point(v, t0, "spike_time");
    if (t0 < p.t_amb) throw DomainError("spike_time: initial temperature below ambient");
    const double t_c = compliance_temperature(v, p);
    if (t0 >= t_c) return 0.0;
    if (fixed_point_above(v, t0, p)) return std::nullopt;

    auto power = [&](double t, double) { return total_current(v, t, p) * v; };
    double temp = t0;
    double elapsed = 0.0;
    while (elapsed < s.max_duration) {
        const auto [next, h] = adaptive_thermal_substep(temp, s.max_duration - elapsed, p, s, power);
        if (next >= t_c) {
            // Localise the compliance crossing inside this substep.
            double lo = 0.0;
            double hi = h;
            while (hi - lo > s.event_resolution) {
                const double mid = 0.5 * (lo + hi);
                if (thermal_rk4(temp, mid, p, power) >= t_c) hi = mid; else lo = mid;
            }
            return elapsed + hi;
        }
        temp = next;
        elapsed += h;
    }
    throw IntegrationError("spike_time: no compliance crossing within " +
                           std::to_string(s.max_duration) + " s at v=" + std::to_string(v) + " V");
}

}  // namespace pmo
