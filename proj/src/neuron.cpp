#include "pmo/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pmo/errors.hpp"

namespace pmo {

namespace {

// Guards the V_A comparison against the last-ulp rounding of I_c * R_S.
constexpr double kThresholdSlack = 1e-9;

struct Branch {
    const DeviceParams* params;
    SeriesNetwork net;
    double temperature;
    bool armed = true;
};

// Temperature at which the closed branch's V_A first reaches v_th; +inf if never.
double detection_temperature(double v_source, const SeriesNetwork& net, const DeviceParams& p,
                             double v_th, double t_from) {
    auto v_a = [&](double t) { return solve_operating_point(v_source, t, net, p).v_a; };
    if (v_a(t_from) >= v_th) return t_from;
    double lo = t_from;
    double hi = 2.0 * t_from;
    while (v_a(hi) < v_th) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e5) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (v_a(mid) >= v_th) hi = mid; else lo = mid;
    }
    return hi;
}

}  // namespace

const char* block_name(Block b) {
    return b == Block::integration ? "integration" : "refractory";
}

void NeuronConfig::validate() const {
    device_input.validate();
    device_refractory.validate();
    network_input.validate();
    network_refractory.validate();
    integrator.validate();
    if (!std::isfinite(v_refractory)) throw DomainError("v_refractory must be finite");
    if (!(v_th_detect > 0.0) || !std::isfinite(v_th_detect)) {
        throw DomainError("v_th_detect must be > 0");
    }
    if (!(detector_latency >= 0.0) || !std::isfinite(detector_latency)) {
        throw DomainError("detector_latency must be >= 0");
    }
    if (register2.width() != 2 || register2.popcount() != 1 || !register2.wrap()) {
        throw DomainError("register 2 must be a circular 2-bit register holding exactly one 1");
    }
    for (const auto& t0 : {t0_input, t0_refractory}) {
        if (t0 && (!std::isfinite(*t0) || *t0 <= 0.0)) {
            throw DomainError("initial temperatures must be finite and > 0");
        }
    }
}

std::vector<double> Trace::spike_times(Block source) const {
    std::vector<double> out;
    for (const auto& e : events) {
        if (e.source == source) out.push_back(e.time);
    }
    return out;
}

Trace simulate(const NeuronConfig& config, const Waveform& stimulus, double t_end,
               const SimulationOptions& options) {
    config.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("simulate: t_end must be > 0");
    if (stimulus.duration() < t_end * (1.0 - 1e-12)) {
        throw DomainError("simulate: stimulus covers " + std::to_string(stimulus.duration()) +
                          " s but t_end is " + std::to_string(t_end) + " s");
    }
    if (!(options.sample_interval >= 0.0)) throw DomainError("simulate: sample interval must be >= 0");

    const IntegratorSettings& settings = config.integrator;
    const double threshold = config.v_th_detect * (1.0 - kThresholdSlack);

    Branch input{&config.device_input, config.network_input,
                 config.t0_input.value_or(config.device_input.t_amb)};
    Branch refr{&config.device_refractory, config.network_refractory,
                config.t0_refractory.value_or(config.device_refractory.t_amb)};
    ShiftRegister reg1 = config.register1;
    ShiftRegister reg2 = config.register2;

    auto apply_registers = [&] {
        // Register-2 MSB = 1 opens S1; S2 is its complement.
        input.net.switch_closed = !reg2.msb();
        refr.net.switch_closed = reg2.msb();
        input.net.r_c_is_short = reg1.msb();
    };
    apply_registers();

    auto source_voltage = [&](Block b, double time) {
        if (b == Block::refractory) return config.v_refractory;
        return stimulus.value(std::min(time, stimulus.duration()));
    };
    auto branch = [&](Block b) -> Branch& { return b == Block::integration ? input : refr; };
    auto operating_point = [&](Block b, double temperature, double time) {
        const Branch& br = branch(b);
        const double v = br.net.switch_closed ? std::abs(source_voltage(b, time)) : 0.0;
        return solve_operating_point(v, temperature, br.net, *br.params);
    };

    Trace trace;
    auto record = [&](double time, std::optional<Block> spiking) {
        for (Block b : {Block::integration, Block::refractory}) {
            auto& rows = b == Block::integration ? trace.integration : trace.refractory;
            const bool spike = spiking && *spiking == b;
            if (!rows.empty() && rows.back().time >= time) {
                if (spike && rows.back().time == time) rows.back().spike = true;
                continue;
            }
            const Branch& br = branch(b);
            const auto op = operating_point(b, br.temperature, time);
            rows.push_back({time, br.net.switch_closed ? source_voltage(b, time) : 0.0, op.v_device,
                            op.current, br.temperature, op.v_a, br.net.switch_closed, spike});
        }
    };

    double last_action = -1.0;
    int zero_phases = 0;
    auto act = [&](Block source, double time) {
        reg2.shift_left();
        trace.shifts.push_back({time, 2, reg2.to_string()});
        if (source == Block::integration) {
            reg1.shift_left();
            trace.shifts.push_back({time, 1, reg1.to_string()});
        }
        apply_registers();
        // A disconnected branch has V_A = 0, so its detector re-arms.
        (input.net.switch_closed ? refr : input).armed = true;
        if (time - last_action < settings.event_resolution) {
            if (++zero_phases > 4) {
                throw CollapseError("neuron collapsed into zero-length phases at t=" +
                                       std::to_string(time) +
                                       " s (both devices stay above the detection threshold)");
            }
        } else {
            zero_phases = 0;
        }
        last_action = time;
    };

    double t = 0.0;
    record(t, std::nullopt);
    long long sample_index = 1;
    auto next_sample = [&] {
        return options.sample_interval > 0.0
                   ? static_cast<double>(sample_index) * options.sample_interval
                   : std::numeric_limits<double>::infinity();
    };
    // Time of a detected crossing waiting out the detector latency; +inf when none.
    double pending_time = std::numeric_limits<double>::infinity();
    Block pending_source = Block::integration;

    while (t < t_end) {
        const Block active = input.net.switch_closed ? Block::integration : Block::refractory;
        Branch& on = branch(active);
        Branch& off = branch(active == Block::integration ? Block::refractory : Block::integration);

        double target = std::min(t_end, next_sample());
        if (active == Block::integration) {
            target = std::min(target, stimulus.next_breakpoint(t));
            target = std::min(target, t + stimulus.max_step_hint());
        }
        target = std::min(target, pending_time);
        const double h_limit = std::max(target - t, 0.0);

        const double t_start = t;
        auto power = [&](double temperature, double dt) {
            const auto op = operating_point(active, temperature, t_start + dt);
            return op.current * op.v_device;
        };
        auto no_power = [](double, double) { return 0.0; };

        auto [on_next, h] = h_limit > 0.0
                                ? adaptive_thermal_substep(on.temperature, h_limit, *on.params,
                                                           settings, power)
                                : std::pair{on.temperature, 0.0};
        double off_next = thermal_rk4(off.temperature, h, *off.params, no_power);

        if (on.armed && std::isinf(pending_time)) {
            const double v_a_start = operating_point(active, on.temperature, t).v_a;
            const double v_a_end = operating_point(active, on_next, t + h).v_a;
            if (v_a_start >= threshold || v_a_end >= threshold) {
                double hi = 0.0;
                if (v_a_start < threshold) {
                    double lo = 0.0;
                    hi = h;
                    while (hi - lo > settings.event_resolution) {
                        const double mid = 0.5 * (lo + hi);
                        const double t_mid = thermal_rk4(on.temperature, mid, *on.params, power);
                        if (operating_point(active, t_mid, t + mid).v_a >= threshold) hi = mid;
                        else lo = mid;
                    }
                }
                on.temperature = thermal_rk4(on.temperature, hi, *on.params, power);
                off.temperature = thermal_rk4(off.temperature, hi, *off.params, no_power);
                t += hi;
                on.armed = false;
                trace.crossings.push_back(t);
                trace.events.push_back({t, active, reg1.to_string()});
                if (trace.events.size() > options.max_events) {
                    throw IntegrationError("simulate: exceeded " + std::to_string(options.max_events) +
                                           " spike events");
                }
                record(t, active);
                if (config.detector_latency == 0.0) {
                    act(active, t);
                } else {
                    pending_time = t + config.detector_latency;
                    pending_source = active;
                }
                continue;
            }
        }

        on.temperature = on_next;
        off.temperature = off_next;
        t = (h >= h_limit) ? target : t + h;

        for (Block b : {Block::integration, Block::refractory}) {
            Branch& br = branch(b);
            if (!br.armed && operating_point(b, br.temperature, t).v_a < threshold) br.armed = true;
        }
        if (t >= pending_time) {
            act(pending_source, t);
            pending_time = std::numeric_limits<double>::infinity();
        }
        if (options.sample_interval == 0.0) {
            record(t, std::nullopt);
        } else {
            while (next_sample() <= t) {
                if (next_sample() == t) record(t, std::nullopt);
                ++sample_index;
            }
        }
    }
    if (options.sample_interval > 0.0) record(t, std::nullopt);
    return trace;
}

std::optional<BranchCrossing> branch_crossing(double v_source, const SeriesNetwork& net_in,
                                              const DeviceParams& p, double v_th, double t0,
                                              const IntegratorSettings& s) {
    SeriesNetwork net = net_in;
    net.switch_closed = true;
    const double v = std::abs(v_source);
    const double threshold = v_th * (1.0 - kThresholdSlack);
    auto op = [&](double temperature) { return solve_operating_point(v, temperature, net, p); };

    if (op(t0).v_a >= threshold) return BranchCrossing{0.0, t0};
    const double t_detect = detection_temperature(v, net, p, threshold, t0);
    if (!std::isfinite(t_detect)) return std::nullopt;
    const auto settle = first_balance_root(
        [&](double temperature) {
            const auto o = op(temperature);
            return o.current * o.v_device;
        },
        t0, t_detect, p);
    if (settle) return std::nullopt;

    auto power = [&](double temperature, double) {
        const auto o = op(temperature);
        return o.current * o.v_device;
    };
    double temp = t0;
    double elapsed = 0.0;
    while (elapsed < s.max_duration) {
        const auto [next, h] = adaptive_thermal_substep(temp, s.max_duration - elapsed, p, s, power);
        if (op(next).v_a >= threshold) {
            double lo = 0.0;
            double hi = h;
            while (hi - lo > s.event_resolution) {
                const double mid = 0.5 * (lo + hi);
                if (op(thermal_rk4(temp, mid, p, power)).v_a >= threshold) hi = mid; else lo = mid;
            }
            return BranchCrossing{elapsed + hi, thermal_rk4(temp, hi, p, power)};
        }
        temp = next;
        elapsed += h;
    }
    throw IntegrationError("branch_spike_time: no threshold crossing within " +
                           std::to_string(s.max_duration) + " s");
}

std::optional<double> branch_spike_time(double v_source, const SeriesNetwork& net,
                                        const DeviceParams& p, double v_th, double t0,
                                        const IntegratorSettings& s) {
    const auto c = branch_crossing(v_source, net, p, v_th, t0, s);
    if (!c) return std::nullopt;
    return c->time;
}

double refractory_period(const NeuronConfig& config, std::optional<double> t0) {
    const auto& p = config.device_refractory;
    const auto gap = branch_spike_time(config.v_refractory, config.network_refractory, p,
                                       config.v_th_detect, t0.value_or(p.t_amb), config.integrator);
    if (!gap) {
        throw NoSpikeError("refractory branch never fires at v_refractory=" +
                           std::to_string(config.v_refractory) +
                           " V; the integration block would stay disconnected forever");
    }
    return *gap;
}

namespace {

double cooled(double temperature, double dt, const DeviceParams& p) {
    return p.t_amb + (temperature - p.t_amb) * std::exp(-dt / p.thermal_tau());
}

// Steps the two-device phase map one integration/refractory pair at a time.
class PhaseMap {
public:
    PhaseMap(const NeuronConfig& config, double v_in)
        : c_(config),
          v_in_(std::abs(v_in)),
          reg1_(config.register1),
          t_in_(config.t0_input.value_or(config.device_input.t_amb)),
          t_ref_(config.t0_refractory.value_or(config.device_refractory.t_amb)) {
        config.validate();
        if (config.detector_latency != 0.0) {
            throw DomainError("phase prediction requires zero detector latency");
        }
    }

    PhasePrediction next() {
        SeriesNetwork net = c_.network_input;
        net.r_c_is_short = reg1_.msb();
        const auto in = branch_crossing(v_in_, net, c_.device_input, c_.v_th_detect, t_in_,
                                        c_.integrator);
        if (!in) {
            throw NoSpikeError("integration branch never fires at |v_in|=" + std::to_string(v_in_) +
                               " V (register 1 = " + reg1_.to_string() + ")");
        }
        PhasePrediction out;
        out.input_start_temperature = t_in_;
        out.integration_time = in->time;
        out.register1 = reg1_.to_string();
        reg1_.shift_left();

        t_ref_ = cooled(t_ref_, in->time, c_.device_refractory);
        out.refractory_start_temperature = t_ref_;
        const auto ref = branch_crossing(c_.v_refractory, c_.network_refractory,
                                         c_.device_refractory, c_.v_th_detect, t_ref_,
                                         c_.integrator);
        if (!ref) {
            throw NoSpikeError("refractory branch never fires at v_refractory=" +
                               std::to_string(c_.v_refractory) + " V");
        }
        out.gap = ref->time;
        t_ref_ = ref->temperature;
        t_in_ = cooled(in->temperature, ref->time, c_.device_input);

        for (double phase : {out.integration_time, out.gap}) {
            zero_phases_ = phase < c_.integrator.event_resolution ? zero_phases_ + 1 : 0;
            if (zero_phases_ > 4) {
                throw CollapseError(
                    "predicted cycle collapsed into zero-length phases (both devices stay above "
                    "the detection threshold)");
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t register_period() const { return reg1_.width(); }

private:
    const NeuronConfig& c_;
    double v_in_;
    ShiftRegister reg1_;
    double t_in_;
    double t_ref_;
    int zero_phases_ = 0;
};

}  // namespace

std::vector<PhasePrediction> predict_phases(const NeuronConfig& config, double v_in,
                                            std::size_t count) {
    PhaseMap map(config, v_in);
    std::vector<PhasePrediction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(map.next());
    return out;
}

SteadyCycle steady_cycle(const NeuronConfig& config, double v_in, double rel_tol,
                         std::size_t max_phases) {
    PhaseMap map(config, v_in);
    const std::size_t period = map.register_period();
    // The ISI ending a cycle needs the next integration time, so keep one
    // phase of look-ahead.
    PhasePrediction prev = map.next();
    std::size_t phases = 1;
    double last_isi = -1.0;
    while (phases < max_phases) {
        double isi = 0.0;
        double gap = 0.0;
        for (std::size_t k = 0; k < period; ++k) {
            const PhasePrediction cur = map.next();
            ++phases;
            isi += prev.gap + cur.integration_time;
            gap += prev.gap;
            prev = cur;
        }
        isi /= static_cast<double>(period);
        gap /= static_cast<double>(period);
        const double tol = std::max(rel_tol * isi, 2.0 * config.integrator.event_resolution);
        if (last_isi >= 0.0 && std::abs(isi - last_isi) <= tol) {
            return {isi, gap, isi > 0.0 ? 1.0 / isi : 0.0, phases};
        }
        last_isi = isi;
    }
    throw IntegrationError("steady_cycle: no convergence within " + std::to_string(max_phases) +
                           " phases");
}

double solve_refractory_voltage(const NeuronConfig& config, double target_gap, double v_lo,
                                double v_hi, std::optional<double> v_input) {
    if (!(target_gap > 0.0)) throw DomainError("target refractory gap must be > 0");
    const double sign = config.v_refractory < 0.0 ? -1.0 : 1.0;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    auto gap_at = [&](double magnitude) {
        NeuronConfig c = config;
        c.v_refractory = sign * magnitude;
        if (!v_input) {
            return branch_spike_time(magnitude, c.network_refractory, c.device_refractory,
                                     c.v_th_detect, c.device_refractory.t_amb, c.integrator)
                .value_or(kInf);
        }
        const auto silent = branch_spike_time(magnitude, c.network_refractory,
                                              c.device_refractory, c.v_th_detect,
                                              c.device_refractory.t_amb, c.integrator);
        if (!silent) return kInf;
        // A silent integration branch (NoSpikeError) is a config problem and propagates.
        try {
            return steady_cycle(c, *v_input).gap;
        } catch (const CollapseError&) {
            return 0.0;
        }
    };
    double lo = std::abs(v_lo);
    double hi = std::abs(v_hi);
    if (gap_at(hi) > target_gap) {
        throw SolverError("solve_refractory_voltage: target gap not reachable at |v|=" +
                          std::to_string(hi) + " V");
    }
    if (gap_at(lo) < target_gap) {
        throw SolverError("solve_refractory_voltage: gap already below target at |v|=" +
                          std::to_string(lo) + " V");
    }
    for (int i = 0; i < 100 && hi - lo > 1e-9; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gap_at(mid) > target_gap) lo = mid; else hi = mid;
    }
    return sign * 0.5 * (lo + hi);
}

std::vector<double> quiescent_gaps(const Trace& trace) {
    std::vector<double> gaps;
    const auto& ev = trace.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].source != Block::integration) continue;
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            if (ev[j].source == Block::refractory) {
                gaps.push_back(ev[j].time - ev[i].time);
                break;
            }
        }
    }
    return gaps;
}

ReplicationResult replicate_experiment(const DeviceParams& p, const Waveform& stimulus,
                                       double sample_interval, const IntegratorSettings& s) {
    p.validate();
    s.validate();
    ReplicationResult out;
    const double t_end = stimulus.duration();
    if (t_end <= 0.0) return out;

    auto v_at = [&](double time) { return std::abs(stimulus.value(std::min(time, t_end))); };
    auto at_compliance = [&](double v, double temperature) {
        return v > 0.0 && unclamped_current(v, temperature, p) >= p.i_compliance * (1.0 - kThresholdSlack);
    };
    auto push_sample = [&](double time, double temperature, bool spike) {
        if (!out.samples.empty() && out.samples.back().time >= time) {
            if (spike) out.samples.back().spike = true;
            return;
        }
        const double v = v_at(time);
        const double i = total_current(v, temperature, p);
        out.samples.push_back({time, stimulus.value(std::min(time, t_end)), v, i, temperature, 0.0,
                               true, spike});
    };

    double t = 0.0;
    double temp = p.t_amb;
    bool armed = true;
    long long sample_index = 1;
    auto next_sample = [&] {
        return sample_interval > 0.0 ? static_cast<double>(sample_index) * sample_interval
                                     : std::numeric_limits<double>::infinity();
    };
    push_sample(0.0, temp, false);
    while (t < t_end) {
        const double target = std::min({t_end, next_sample(), stimulus.next_breakpoint(t),
                                        t + stimulus.max_step_hint()});
        const double t_start = t;
        auto power = [&](double temperature, double dt) {
            const double v = v_at(t_start + dt);
            return total_current(v, temperature, p) * v;
        };
        const auto [next, h] = adaptive_thermal_substep(temp, target - t, p, s, power);
        if (armed && at_compliance(v_at(t + h), next)) {
            double hi = 0.0;
            if (!at_compliance(v_at(t), temp)) {
                double lo = 0.0;
                hi = h;
                while (hi - lo > s.event_resolution) {
                    const double mid = 0.5 * (lo + hi);
                    if (at_compliance(v_at(t + mid), thermal_rk4(temp, mid, p, power))) hi = mid;
                    else lo = mid;
                }
            }
            temp = thermal_rk4(temp, hi, p, power);
            t += hi;
            armed = false;
            out.spike_times.push_back(t);
            push_sample(t, temp, true);
            if (hi > 0.0) continue;
            // Already at compliance at the start of the substep: fall through and advance.
        }
        temp = next;
        t = (h >= target - t_start) ? target : t_start + h;
        if (!armed && !at_compliance(v_at(t), temp)) armed = true;
        if (sample_interval == 0.0) {
            push_sample(t, temp, false);
        } else {
            while (next_sample() <= t) {
                if (next_sample() == t) push_sample(t, temp, false);
                ++sample_index;
            }
        }
    }
    return out;
}

}  // namespace pmo
