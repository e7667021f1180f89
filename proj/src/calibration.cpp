#include "pmo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace pmo {

namespace {

// Log-residual charged to an observation the model cannot make spike.
constexpr double kSilentResidual = 10.0;
constexpr double kFailedObjective = 1e3;
constexpr double kFitCycleTolerance = 1e-6;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> model_spike_time(double v, const DeviceParams& p) {
    try {
        return spike_time(v, p);
    } catch (const IntegrationError&) {
        return std::nullopt;  // creeps towards compliance beyond the search horizon
    }
}

}  // namespace

const char* parameter_name(FreeParameter f) {
    switch (f) {
        case FreeParameter::r_th: return "r_th";
        case FreeParameter::c_th: return "c_th";
        case FreeParameter::i_compliance: return "i_compliance";
        case FreeParameter::phi_b: return "phi_b";
        case FreeParameter::e_trap: return "e_trap";
    }
    return "?";
}

double get_parameter(const DeviceParams& p, FreeParameter f) {
    switch (f) {
        case FreeParameter::r_th: return p.r_th;
        case FreeParameter::c_th: return p.c_th;
        case FreeParameter::i_compliance: return p.i_compliance;
        case FreeParameter::phi_b: return p.phi_b;
        case FreeParameter::e_trap: return p.e_trap;
    }
    return 0.0;
}

void set_parameter(DeviceParams& p, FreeParameter f, double value) {
    switch (f) {
        case FreeParameter::r_th: p.r_th = value; break;
        case FreeParameter::c_th: p.c_th = value; break;
        case FreeParameter::i_compliance: p.i_compliance = value; break;
        case FreeParameter::phi_b: p.phi_b = value; break;
        case FreeParameter::e_trap: p.e_trap = value; break;
    }
}

std::vector<ParameterRange> default_free_set(const DeviceParams& init) {
    return {{FreeParameter::r_th, init.r_th / 10.0, init.r_th * 10.0},
            {FreeParameter::c_th, init.c_th / 10.0, init.c_th * 10.0}};
}

std::vector<ParameterRange> extended_free_set(const DeviceParams& init) {
    auto set = default_free_set(init);
    set.push_back({FreeParameter::i_compliance, init.i_compliance / 10.0, init.i_compliance * 10.0});
    set.push_back({FreeParameter::phi_b, init.phi_b * 0.5, init.phi_b * 2.0});
    set.push_back({FreeParameter::e_trap, init.e_trap * 0.5, init.e_trap * 2.0});
    return set;
}

double rms_log_error(std::span<const double> residuals,
                     std::span<const SpikeTimeObservation> observations) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        num += observations[i].weight * residuals[i] * residuals[i];
        den += observations[i].weight;
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

FitResult fit_spike_times(std::span<const SpikeTimeObservation> observations,
                          std::span<const ParameterRange> free, const DeviceParams& init,
                          const SimplexOptions& options) {
    init.validate();
    if (observations.size() < free.size()) {
        throw DomainError("fit: need at least as many observations (" +
                          std::to_string(observations.size()) + ") as free parameters (" +
                          std::to_string(free.size()) + ")");
    }
    for (const auto& o : observations) {
        if (!(o.t_spike > 0.0) || !(o.v > 0.0) || !(o.weight >= 0.0) || !std::isfinite(o.t_spike)) {
            throw DomainError("fit: observations need v > 0, t_spike > 0 and weight >= 0");
        }
    }
    Bounds bounds;
    std::vector<double> x0;
    for (const auto& r : free) {
        if (!(r.lower > 0.0) || !(r.upper >= r.lower) || !std::isfinite(r.upper)) {
            throw DomainError(std::string("fit: bounds for ") + parameter_name(r.parameter) +
                              " must satisfy 0 < lower <= upper");
        }
        bounds.lower.push_back(std::log(r.lower));
        bounds.upper.push_back(std::log(r.upper));
        x0.push_back(std::log(std::clamp(get_parameter(init, r.parameter), r.lower, r.upper)));
    }

    auto params_at = [&](std::span<const double> x) {
        DeviceParams p = init;
        for (std::size_t i = 0; i < free.size(); ++i) set_parameter(p, free[i].parameter, std::exp(x[i]));
        return p;
    };
    auto residuals_at = [&](const DeviceParams& p, std::vector<bool>* silent) {
        std::vector<double> r;
        for (const auto& o : observations) {
            const auto t = model_spike_time(o.v, p);
            if (silent) silent->push_back(!t);
            r.push_back(t ? std::log(*t) - std::log(o.t_spike) : kSilentResidual);
        }
        return r;
    };
    const Objective objective = [&](std::span<const double> x) {
        const auto r = residuals_at(params_at(x), nullptr);
        double sum = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) sum += observations[i].weight * r[i] * r[i];
        return sum;
    };

    const SimplexResult best = multi_start_nelder_mead(objective, x0, bounds, options);
    const std::vector<double> x = free.empty() ? x0 : best.x;

    FitResult out;
    out.params = params_at(x);
    std::vector<bool> silent;
    out.residuals = residuals_at(out.params, &silent);
    for (std::size_t i = 0; i < silent.size(); ++i) {
        if (silent[i]) {
            std::ostringstream msg;
            msg << "fit infeasible: observation " << i << " (v=" << observations[i].v
                << " V, t_spike=" << observations[i].t_spike
                << " s) never reaches compliance for any explored parameter set";
            throw InfeasibleError(msg.str());
        }
    }
    for (double xi : x) out.values.push_back(std::exp(xi));
    out.rms_log_error = rms_log_error(out.residuals, observations);
    out.iterations = best.iterations;
    out.evaluations = best.evaluations;
    out.objective_history = best.best_history;
    return out;
}

std::vector<SpikeTimeObservation> read_observations_csv(std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    const std::vector<std::string> expected{"v_volts", "t_spike_seconds", "weight"};
    if (split_csv(trim(line)) != expected) {
        throw ConfigError("observations CSV line " + std::to_string(line_no) +
                          ": header must be 'v_volts,t_spike_seconds,weight'");
    }
    std::vector<SpikeTimeObservation> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 3) {
            throw ConfigError("observations CSV line " + std::to_string(line_no) + ": expected 3 columns, got " +
                              std::to_string(cells.size()));
        }
        double values[3];
        for (int c = 0; c < 3; ++c) {
            std::size_t used = 0;
            try {
                values[c] = std::stod(cells[c], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cells[c].size() || cells[c].empty() || !std::isfinite(values[c])) {
                throw ConfigError("observations CSV line " + std::to_string(line_no) + ", column " +
                                  expected[c] + ": '" + cells[c] + "' is not a number");
            }
        }
        if (!(values[0] > 0.0) || !(values[1] > 0.0) || !(values[2] >= 0.0)) {
            throw ConfigError("observations CSV line " + std::to_string(line_no) +
                              ": need v_volts > 0, t_spike_seconds > 0, weight >= 0");
        }
        out.push_back({values[0], values[1], values[2]});
    }
    return out;
}

NeuronConfig apply_neuron_parameters(const NeuronConfig& base, double r_th_scale, double c_th_scale,
                                     double r_s, double v_refractory_magnitude) {
    NeuronConfig c = base;
    for (DeviceParams* p : {&c.device_input, &c.device_refractory}) {
        p->r_th *= r_th_scale;
        p->c_th *= c_th_scale;
    }
    c.network_input.r_s = r_s;
    c.network_refractory.r_s = r_s;
    c.v_th_detect = r_s * c.device_input.i_compliance;
    c.v_refractory = (base.v_refractory < 0.0 ? -1.0 : 1.0) * v_refractory_magnitude;
    return c;
}

NeuronFitResult fit_frequency_anchors(const NeuronConfig& base,
                                      std::span<const FrequencyAnchor> anchors,
                                      const NeuronFitBox& box, const SpikeTimeBand& band,
                                      const SimplexOptions& options) {
    base.validate();
    if (anchors.empty()) throw DomainError("fit_frequency_anchors: no anchors");
    for (const auto& a : anchors) {
        if (!(a.frequency > 0.0) || !(a.weight >= 0.0) || a.v_in == 0.0) {
            throw DomainError("fit_frequency_anchors: anchors need v_in != 0, frequency > 0, weight >= 0");
        }
    }
    Bounds bounds{{std::log(box.r_th_scale_min), std::log(box.c_th_scale_min), std::log(box.r_s_min),
                   box.v_refractory_min},
                  {std::log(box.r_th_scale_max), std::log(box.c_th_scale_max), std::log(box.r_s_max),
                   box.v_refractory_max}};
    const std::vector<double> x0{
        0.0, 0.0, std::log(std::clamp(base.network_input.r_s, box.r_s_min, box.r_s_max)),
        std::clamp(std::abs(base.v_refractory), box.v_refractory_min, box.v_refractory_max)};

    auto config_at = [&](std::span<const double> x) {
        return apply_neuron_parameters(base, std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), x[3]);
    };
    const Objective objective = [&](std::span<const double> x) {
        try {
            const NeuronConfig c = config_at(x);
            double sum = 0.0;
            for (const auto& a : anchors) {
                const double f = steady_cycle(c, a.v_in, kFitCycleTolerance).frequency;
                const double r = std::log(f / a.frequency);
                sum += a.weight * r * r;
            }
            if (band.enabled) {
                const auto slow = spike_time(band.v_low, c.device_input);
                const auto fast = spike_time(band.v_high, c.device_input);
                if (!slow || !fast) return kFailedObjective;
                const double lo = band.t_min * (1.0 + band.margin);
                const double hi = band.t_max / (1.0 + band.margin);
                sum += band.penalty * std::pow(std::max(0.0, std::log(*slow / hi)), 2);
                sum += band.penalty * std::pow(std::max(0.0, std::log(lo / *fast)), 2);
            }
            return std::isfinite(sum) ? sum : kFailedObjective;
        } catch (const Error&) {
            return kFailedObjective;
        }
    };

    const SimplexResult best = multi_start_nelder_mead(objective, x0, bounds, options);
    NeuronFitResult out;
    out.config = config_at(best.x);
    out.objective = best.value;
    out.iterations = best.iterations;
    out.evaluations = best.evaluations;
    for (const auto& a : anchors) {
        try {
            out.frequencies.push_back(steady_cycle(out.config, a.v_in).frequency);
        } catch (const Error&) {
            out.frequencies.push_back(0.0);
        }
    }
    return out;
}

NeuronConfig calibrated_neuron() {
    return apply_neuron_parameters(NeuronConfig{}, 0.527190, 5.093566, 49.7740, 1.560471);
}

double chattering_ratio(const NeuronConfig& config, double v_in) {
    NeuronConfig c = config;
    c.register1 = ShiftRegister::from_string("1110", true);
    // Five register periods are plenty for the warm-start transient to fade.
    const auto phases = predict_phases(c, v_in, 21);
    // Interval ending at integration spike k is gap[k-1] + integration_time[k].
    auto interval = [&](std::size_t k) { return phases[k - 1].gap + phases[k].integration_time; };
    double sum = 0.0;
    double longest = 0.0;
    for (std::size_t k = 17; k <= 20; ++k) {
        sum += interval(k);
        longest = std::max(longest, interval(k));
    }
    return longest / ((sum - longest) / 3.0);
}

double solve_control_resistance(const NeuronConfig& config, double v_in, double target_ratio,
                                double r_max) {
    if (!(target_ratio > 1.0)) throw DomainError("solve_control_resistance: target ratio must be > 1");
    auto ratio_at = [&](double r_c) {
        NeuronConfig c = config;
        c.network_input.r_c_active = r_c;
        try {
            return chattering_ratio(c, v_in);
        } catch (const NoSpikeError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    double lo = 0.0;
    double hi = r_max;
    if (ratio_at(lo) >= target_ratio) {
        throw SolverError("solve_control_resistance: ratio already reached with R_C = 0");
    }
    if (ratio_at(hi) < target_ratio) {
        throw SolverError("solve_control_resistance: ratio not reached below R_C = " + std::to_string(r_max) +
                          " ohm");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-9 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_at(mid) < target_ratio) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace pmo
