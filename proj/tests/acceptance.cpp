// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pmo/calibration.hpp"
#include "pmo/circuit_solver.hpp"
#include "pmo/errors.hpp"
#include "pmo/neuron.hpp"
#include "pmo/patterns.hpp"
#include "pmo/scaling.hpp"
#include "pmo/scenarios.hpp"

using namespace pmo;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// Mean frequency after dropping the first two spikes.
double settled_frequency(const Trace& t) {
    const auto s = t.spike_times(Block::integration);
    if (s.size() < 5) return 0.0;
    return static_cast<double>(s.size() - 3) / (s.back() - s[2]);
}

bool within(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

Outcome thermal_relaxation() {
    const DeviceParams p;
    const double tau = p.r_th * p.c_th;
    const double t0 = 400.0;
    DeviceState s{t0, 0.0, 0.0};
    double worst = 0.0;
    for (int k = 1; k <= 500; ++k) {
        s = step_state(s, 0.0, tau / 100.0, p);
        const double expected = p.t_amb + (t0 - p.t_amb) * std::exp(-s.time / tau);
        worst = std::max(worst, std::abs(s.temperature - expected) / (expected - p.t_amb));
    }
    return {worst <= 0.01 && within(tau, 97.5e-9, 1e-12),
            format("tau=%.4g ns, worst excess-temperature error %.2e over 5 tau", tau * 1e9, worst)};
}

std::string spike_row(const DeviceParams& p, bool& ok) {
    std::string row;
    double prev = INFINITY;
    ok = true;
    for (int k = 0; k < 10; ++k) {
        const double v = 1.5 + 0.1 * k;
        const auto t = spike_time(v, p);
        if (!t) {
            ok = false;
            row += " none";
            continue;
        }
        ok = ok && *t < prev && *t >= 100e-9 && *t <= 1e-6;
        prev = *t;
        row += format(" %.0f", *t * 1e9);
    }
    return row;
}

Outcome spike_time_monotonicity() {
    bool ok = false, reference_ok = false;
    const std::string calibrated = spike_row(calibrated_neuron().device_input, ok);
    const std::string reference = spike_row(DeviceParams{}, reference_ok);
    return {ok, "calibrated device (ns):" + calibrated + "; reference stack (ns, informational):" + reference};
}

Outcome frequency_reproduction() {
    const std::vector<FrequencyAnchor> anchors{{-1.6, 537e3, 1.0}, {-1.8, 754e3, 1.0}};
    SimplexOptions opt;
    opt.starts = 1;
    const NeuronConfig start = apply_neuron_parameters(NeuronConfig{}, 0.55, 5.3, 52.0, 1.55);
    const NeuronFitResult fit = fit_frequency_anchors(start, anchors, {}, {}, opt);
    const double f16 = settled_frequency(simulate(fit.config, constant(-1.6, 20e-6), 20e-6));
    const double f18 = settled_frequency(simulate(fit.config, constant(-1.8, 20e-6), 20e-6));
    const double ratio = f18 / f16;
    const bool ok = within(f16, 537e3, 0.10) && within(f18, 754e3, 0.10) && within(ratio, 754.0 / 537.0, 0.08) &&
                    within(f16, 595e3, 0.15) && within(f18, 757e3, 0.15);
    return {ok, format("fitted R_S=%.3f ohm, v_ref=%.4f V: %.1f kHz at -1.6 V, %.1f kHz at -1.8 V, ratio %.3f",
                       fit.config.network_input.r_s, fit.config.v_refractory, f16 / 1e3, f18 / 1e3, ratio)};
}

Outcome refractory_control() {
    bool ok = true;
    std::string detail;
    for (double target : {400e-9, 200e-9}) {
        const Scenario sc = refractory_scenario(target);
        const auto gaps = quiescent_gaps(simulate(sc.config, sc.stimulus, sc.t_end));
        if (gaps.size() < 5) return {false, "too few gaps"};
        double worst = 0.0;
        for (std::size_t k = gaps.size() - 5; k < gaps.size(); ++k) {
            worst = std::max(worst, std::abs(gaps[k] - target) / target);
        }
        ok = ok && worst <= 0.10;
        detail += format("%.0f ns: v_ref=%.5f V, last gap %.1f ns; ", target * 1e9, sc.config.v_refractory,
                         gaps.back() * 1e9);
    }
    NeuronConfig c = calibrated_neuron();
    double prev = INFINITY;
    bool monotone = true;
    for (int k = 0; k < 10; ++k) {
        c.v_refractory = -(1.45 + 0.01 * k);
        const auto gaps = quiescent_gaps(simulate(c, constant(kRefractoryInputVoltage, 20e-6), 20e-6));
        const double g = gaps.back();
        monotone = monotone && g < prev;
        prev = g;
    }
    detail += format("gap strictly decreasing over |v_ref| 1.45..1.54 V: %s", monotone ? "yes" : "no");
    return {ok && monotone, detail};
}

Outcome time_varying_input() {
    const Scenario sc = two_tone_scenario(2);
    const auto spikes = simulate(sc.config, sc.stimulus, sc.t_end).spike_times(Block::integration);
    const SinusoidSum tones{kToneF1, kToneF2, kToneAmplitude, kToneDc};
    const auto regions = envelope_regions(tones);
    const double beat = beat_period(kToneF1, kToneF2);
    bool ok = true;
    std::string detail;
    for (int b = 0; b < 2; ++b) {
        const auto counts = count_per_region(regions, spikes, b * beat);
        int high_min = 1 << 30, moderate_min = 1 << 30, moderate_max = 0, low_max = 0;
        for (std::size_t r = 0; r < regions.size(); ++r) {
            switch (regions[r].level) {
                case EnvelopeLevel::high: high_min = std::min(high_min, counts[r]); break;
                case EnvelopeLevel::moderate:
                    moderate_min = std::min(moderate_min, counts[r]);
                    moderate_max = std::max(moderate_max, counts[r]);
                    break;
                case EnvelopeLevel::low: low_max = std::max(low_max, counts[r]); break;
            }
            detail += format("%s=%d ", envelope_level_name(regions[r].level), counts[r]);
        }
        ok = ok && high_min > moderate_max && moderate_min > 0 && low_max == 0;
        detail += "| ";
    }
    return {ok, "per-region spikes " + detail};
}

std::string labels(const std::vector<double>& spikes) {
    const auto split = split_intervals(spike_intervals(spikes, 0.0), 0.25);
    std::string s;
    for (bool l : split.is_long) s += l ? 'l' : 's';
    return s;
}

std::string msb_sequence(const Trace& t) {
    std::string s;
    for (const auto& e : t.events) {
        if (e.source == Block::integration) s += e.register1.front();
    }
    return s;
}

Outcome pattern_structure() {
    const Scenario ch = pattern_scenario(Pattern::CH);
    const Trace tc = simulate(ch.config, ch.stimulus, ch.t_end);
    const auto sc = tc.spike_times(Block::integration);
    const Scenario ib = pattern_scenario(Pattern::IB);
    const Trace ti = simulate(ib.config, ib.stimulus, ib.t_end);
    const auto si = ti.spike_times(Block::integration);

    const std::string lc = labels(sc), li = labels(si);
    const bool ch_ok = classify_pattern(sc, 0.25, 0.0) == Pattern::CH &&
                       lc.find("ssslssslsssl") != std::string::npos;
    const bool ib_ok = classify_pattern(si, 0.25, 0.0) == Pattern::IB && li.rfind("sssllll", 0) == 0 &&
                       li.find('s', 3) == std::string::npos;
    const std::string mc = msb_sequence(tc), mi = msb_sequence(ti);
    bool msb_ok = mi.rfind("111", 0) == 0 && mi.find('1', 3) == std::string::npos && mi.size() > 7;
    for (std::size_t k = 0; k < mc.size(); ++k) msb_ok = msb_ok && mc[k] == (k % 4 == 3 ? '0' : '1');
    return {ch_ok && ib_ok && msb_ok,
            "CH intervals " + lc + " msb " + mc + "; IB intervals " + li + " msb " + mi};
}

Outcome scaling_report() {
    const ScalingReport r = build_scaling_report(calibrated_neuron().device_input);
    const double c = capacitance(3.9, 100e-12, 2e-9);
    const double ratio = r.matched_tau_th / r.matched_tau_rc;
    const bool ok = within(c, 1.7e-12, 0.03) && r.reference_tau_rc >= 0.05e-9 && r.reference_tau_rc <= 0.2e-9 &&
                    ratio >= 100.0 && ratio <= 1000.0;
    return {ok, format("C=%.4g pF, tau_rc=%.4g ns, tau_th/tau_rc=%.1f at the runaway point", c * 1e12,
                       r.reference_tau_rc * 1e9, ratio)};
}

Outcome area_estimate() {
    const double a = estimate_area(119);
    return {a == 11900.0 && total_transistors(neuron_transistor_budget()) == 119,
            format("estimate_area(119)=%.1f F^2, budget %lld transistors", a,
                   total_transistors(neuron_transistor_budget()))};
}

double energy_drift(const std::vector<Sample>& rows, const DeviceParams& p) {
    double in = 0.0, out = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double dt = rows[k].time - rows[k - 1].time;
        in += 0.5 * dt * (rows[k].current * rows[k].v_device + rows[k - 1].current * rows[k - 1].v_device);
        out += 0.5 * dt * (rows[k].temperature + rows[k - 1].temperature - 2.0 * p.t_amb) / p.r_th;
    }
    const double stored = p.c_th * (rows.back().temperature - rows.front().temperature);
    return std::abs(in - out - stored) / in;
}

/// Device voltage with the smallest residual: 1 mV grid, refined at 10 uV.
double scan_device_voltage(double v_in, double t, const SeriesNetwork& n, const DeviceParams& p) {
    auto res = [&](double v) { return std::abs(v_in - total_current(v, t, p) * n.series_resistance() - v); };
    double best = 0.0, best_r = INFINITY;
    for (double v = 0.0; v <= v_in + 1e-12; v += 1e-3) {
        if (const double r = res(v); r < best_r) best_r = r, best = v;
    }
    const double lo = std::max(0.0, best - 2e-3), hi = std::min(v_in, best + 2e-3);
    for (double v = lo; v <= hi + 1e-12; v += 1e-5) {
        if (const double r = res(v); r < best_r) best_r = r, best = v;
    }
    return best;
}

bool same_events(const Trace& a, const Trace& b) {
    if (a.events.size() != b.events.size() || a.integration.size() != b.integration.size()) return false;
    for (std::size_t k = 0; k < a.events.size(); ++k) {
        if (a.events[k].time != b.events[k].time || a.events[k].source != b.events[k].source ||
            a.events[k].register1 != b.events[k].register1) {
            return false;
        }
    }
    return true;
}

bool exclusive(const Trace& t) {
    if (t.integration.size() != t.refractory.size()) return false;
    for (std::size_t k = 0; k < t.integration.size(); ++k) {
        if (t.integration[k].time != t.refractory[k].time ||
            t.integration[k].connected == t.refractory[k].connected) {
            return false;
        }
    }
    for (std::size_t k = 1; k < t.events.size(); ++k) {
        if (t.events[k].source == t.events[k - 1].source) return false;
    }
    return true;
}

Outcome property_suites() {
    const NeuronConfig c = calibrated_neuron();
    const Trace t = simulate(c, constant(-1.6, 6e-6), 6e-6, {0.0});
    const double drift =
        std::max(energy_drift(t.integration, c.device_input), energy_drift(t.refractory, c.device_refractory));

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const DeviceParams p;
    int solver_fail = 0;
    double worst_residual = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SeriesNetwork n{1.0 + 199.0 * u(rng), 300.0 * u(rng), k % 2 == 0, true};
        const double v = 3.0 * u(rng), temp = 300.0 + 400.0 * u(rng);
        const auto op = solve_operating_point(v, temp, n, p);
        const double r = std::abs(v - op.current * n.series_resistance() - op.v_device);
        worst_residual = std::max(worst_residual, r / std::max(1.0, v));
        if (r > operating_point_tolerance(v) || std::abs(op.v_device - scan_device_voltage(v, temp, n, p)) > 1e-5) {
            ++solver_fail;
        }
    }

    int invariant_fail = 0, collapsed = 0;
    for (int k = 0; k < 100; ++k) {
        NeuronConfig cfg = c;
        std::string bits;
        for (int b = 0; b < 4; ++b) bits += u(rng) < 0.5 ? '0' : '1';
        cfg.register1 = ShiftRegister::from_string(bits, u(rng) < 0.5);
        cfg.network_input.r_c_active = 100.0 * u(rng);
        cfg.v_refractory = -(1.5 + 0.6 * u(rng));
        const double v_in = -(1.3 + 0.8 * u(rng));
        auto run = [&]() -> std::optional<Trace> {
            try {
                return simulate(cfg, constant(v_in, 3e-6), 3e-6);
            } catch (const CollapseError&) {
                return std::nullopt;
            }
        };
        const auto a = run(), b = run();
        if (!a || !b) {
            collapsed += !a && !b ? 1 : 0;
            invariant_fail += (a.has_value() != b.has_value()) ? 1 : 0;
            continue;
        }
        if (!exclusive(*a) || !same_events(*a, *b)) ++invariant_fail;
    }
    return {drift <= 0.005 && solver_fail == 0 && invariant_fail == 0,
            format("energy drift %.2e; solver: %d/1000 off (worst residual %.1e); invariants: %d/100 off "
                   "(%d collapsed consistently)",
                   drift, solver_fail, worst_residual, invariant_fail, collapsed)};
}

Outcome calibration_round_trip() {
    const DeviceParams init;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> log_scale(std::log(0.5), std::log(2.0));
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        DeviceParams truth = init;
        truth.r_th *= std::exp(log_scale(rng));
        truth.c_th *= std::exp(log_scale(rng));
        std::vector<SpikeTimeObservation> obs;
        for (int k = 0; k < 10; ++k) {
            const double v = 1.5 + 0.1 * k;
            if (const auto ts = spike_time(v, truth)) obs.push_back({v, *ts, 1.0});
        }
        const auto fit = fit_spike_times(obs, default_free_set(init), init);
        worst = std::max({worst, std::abs(fit.params.r_th / truth.r_th - 1.0),
                          std::abs(fit.params.c_th / truth.c_th - 1.0)});
    }
    return {worst <= 0.02, format("worst relative error over 20 draws %.2e", worst)};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{
        thermal_relaxation, spike_time_monotonicity, frequency_reproduction, refractory_control,
        time_varying_input, pattern_structure,       scaling_report,         area_estimate,
        property_suites,    calibration_round_trip};
    int failures = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s - %s (%.2f s)\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of %zu criteria failed, %.1f s total\n", failures, criteria.size(), total);
    return failures == 0 ? 0 : 1;
}
