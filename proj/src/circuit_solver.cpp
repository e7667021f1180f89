#include "pmo/circuit_solver.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "pmo/errors.hpp"

namespace pmo {

void SeriesNetwork::validate() const {
    if (!(r_s > 0.0) || !std::isfinite(r_s)) throw DomainError("series network: r_s must be > 0");
    if (!(r_c_active >= 0.0) || !std::isfinite(r_c_active)) {
        throw DomainError("series network: r_c_active must be >= 0");
    }
}

OperatingPoint solve_operating_point(double v_in, double t, const SeriesNetwork& net,
                                     const DeviceParams& p) {
    if (!std::isfinite(v_in) || v_in < 0.0) {
        throw DomainError("solve_operating_point: v_in must be finite and >= 0");
    }
    if (!net.switch_closed || v_in == 0.0) return {};

    const double r_total = net.series_resistance();
    if (r_total == 0.0) {
        const double i = total_current(v_in, t, p);
        return {v_in, i, i * net.r_s};
    }

    // residual(v) = v_in - i(v) R - v is strictly decreasing in v.
    auto residual = [&](double v) { return v_in - total_current(v, t, p) * r_total - v; };
    const double tol = operating_point_tolerance(v_in);

    // At fixed T the unclamped current is a*v + b*v^2, so the series equation
    // is a quadratic; the clamp gives v_in - I_c R once the root exceeds it.
    {
        const double a = ohmic_current(1.0, t, p);
        const double b = sclc_current(1.0, t, p);
        const double lin = a * r_total + 1.0;
        double v = 2.0 * v_in / (lin + std::sqrt(lin * lin + 4.0 * b * r_total * v_in));
        if (a * v + b * v * v > p.i_compliance) v = v_in - p.i_compliance * r_total;
        if (v >= 0.0 && v <= v_in && std::abs(residual(v)) <= tol) {
            const double i = total_current(v, t, p);
            return {v, i, i * net.r_s};
        }
    }

    double lo = 0.0;
    double hi = v_in;
    double r_hi = residual(hi);
    if (residual(lo) < 0.0 || r_hi > 0.0) {
        throw SolverError("solve_operating_point: residual does not bracket a root (v_in=" +
                          std::to_string(v_in) + " V, T=" + std::to_string(t) + " K)");
    }
    if (std::abs(r_hi) <= tol) {
        const double i = total_current(hi, t, p);
        return {hi, i, i * net.r_s};
    }

    // Newton on the bracket; a bisection step is forced whenever the bracket
    // failed to halve (e.g. the slope estimate straddles the compliance kink).
    double v = 0.5 * (lo + hi);
    double width = hi - lo;
    for (int iter = 0; iter < 300; ++iter) {
        const double r = residual(v);
        if (std::abs(r) <= tol) {
            const double i = total_current(v, t, p);
            return {v, i, i * net.r_s};
        }
        if (r > 0.0) lo = v; else hi = v;
        if (hi - lo <= 1e-15 * v_in) break;

        const bool stalled = hi - lo > 0.5 * width;
        width = hi - lo;
        double next = 0.5 * (lo + hi);
        if (!stalled) {
            const double dv = 1e-9 * (v > 1e-3 ? v : 1e-3);
            const double slope = (residual(v + dv) - r) / dv;
            if (slope < 0.0) next = v - r / slope;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        }
        v = next;
    }
    const double i = total_current(v, t, p);
    if (std::abs(v_in - i * r_total - v) > tol) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "solve_operating_point: no convergence (v_in=%.17g V, T=%.17g K, R=%.17g ohm)",
                      v_in, t, r_total);
        throw SolverError(msg);
    }
    return {v, i, i * net.r_s};
}

}  // namespace pmo
