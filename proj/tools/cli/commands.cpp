#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "outputs.hpp"
#include "pmo/calibration.hpp"
#include "pmo/errors.hpp"
#include "pmo/patterns.hpp"
#include "pmo/scaling.hpp"

namespace pmo::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

double sample_interval(const RunSpec& spec, const CommandOptions& o) {
    const double s = o.sample_interval.value_or(spec.sample_interval);
    if (!(s > 0.0)) throw ConfigError("--sample-interval must be > 0");
    return s;
}

void write_run(const fs::path& dir, const Trace& trace, const RunSummary& summary,
               const std::string& scenario, bool plot) {
    {
        auto os = open_output(dir / "trace.csv");
        write_trace_csv(os, trace);
    }
    {
        auto os = open_output(dir / "spikes.csv");
        write_spike_csv(os, trace);
    }
    {
        auto os = open_output(dir / "summary.json");
        write_summary_json(os, summary, scenario);
    }
    if (plot) {
        auto os = open_output(dir / "trace.svg");
        write_trace_svg(os, trace, scenario);
    }
}

void log_summary(std::ostream& log, const std::string& scenario, const RunSummary& s) {
    log << scenario << ": " << s.spike_count << " integration spikes, mean frequency "
        << s.mean_frequency / 1e3 << " kHz, pattern " << s.pattern << '\n';
}

/// Register-1 MSB at every integration spike, as a 0/1 string.
std::string msb_sequence(const Trace& trace) {
    std::string out;
    for (const auto& e : trace.events) {
        if (e.source == Block::integration && !e.register1.empty()) out += e.register1.front();
    }
    return out;
}

void write_tone_regions(const fs::path& path, const RunSpec& spec, const Trace& trace) {
    const auto regions = envelope_regions(spec.stimulus.tones);
    const double beat = beat_period(spec.stimulus.tones.f1, spec.stimulus.tones.f2);
    const auto spikes = trace.spike_times(Block::integration);
    auto os = open_output(path);
    os << "beat,region,start_s,end_s,level,peak_v,spike_count\n";
    for (int b = 0; (b + 1) * beat <= spec.t_end * (1.0 + 1e-12); ++b) {
        const auto counts = count_per_region(regions, spikes, b * beat);
        for (std::size_t k = 0; k < regions.size(); ++k) {
            os << b << ',' << k << ',' << fmt(regions[k].start + b * beat) << ','
               << fmt(regions[k].end + b * beat) << ',' << envelope_level_name(regions[k].level) << ','
               << fmt(regions[k].peak_magnitude) << ',' << counts[k] << '\n';
        }
    }
}

struct SweepRow {
    double v_input = 0.0;
    double v_refractory = 0.0;
    std::string status = "ok";
    std::size_t spikes = 0;
    double frequency = NAN;
    double predicted = NAN;
    double gap = NAN;
};

std::string cell(double x) { return std::isnan(x) ? "" : fmt(x); }

SweepRow run_sweep_point(const RunSpec& spec, double value, const fs::path& spike_file) {
    SweepRow row;
    NeuronConfig c = spec.neuron;
    if (spec.scenario == ScenarioKind::refractory_sweep) {
        c.v_refractory = value;
        row.v_input = spec.stimulus.v_input;
    } else {
        row.v_input = value;
    }
    row.v_refractory = c.v_refractory;
    Trace trace;
    try {
        trace = simulate(c, constant(row.v_input, spec.t_end), spec.t_end, {spec.t_end});
    } catch (const CollapseError&) {
        row.status = "collapsed";
        return row;
    }
    {
        std::ofstream os(spike_file);
        write_spike_csv(os, trace);
    }
    const RunSummary s = summarize(trace);
    row.spikes = s.spike_count;
    if (s.spike_count < 2) {
        row.status = "silent";
    } else {
        row.frequency = s.mean_frequency;
        const auto gaps = quiescent_gaps(trace);
        if (!gaps.empty()) row.gap = gaps.back();
    }
    try {
        row.predicted = steady_cycle(c, row.v_input, 1e-6).frequency;
    } catch (const NumericalError&) {
        // left empty: the predictor needs a settling regular cycle
    }
    return row;
}

}  // namespace

void run_simulate(const RunSpec& spec, const CommandOptions& o, std::ostream& log) {
    const std::string name = scenario_name(spec.scenario);
    const double dt = sample_interval(spec, o);
    const Waveform stimulus = build_stimulus(spec);
    switch (spec.scenario) {
        case ScenarioKind::experiment_replication: {
            const auto r = replicate_experiment(spec.neuron.device_input, stimulus, dt,
                                                spec.neuron.integrator);
            {
                auto os = open_output(o.out / "trace.csv");
                write_replication_csv(os, r);
            }
            {
                auto os = open_output(o.out / "spikes.csv");
                os << kSpikeHeader << '\n';
                for (double t : r.spike_times) os << fmt(t) << ",device,\n";
            }
            const RunSummary s = summarize(r.spike_times, {});
            {
                auto os = open_output(o.out / "summary.json");
                write_summary_json(os, s, name);
            }
            if (o.plot) {
                Trace t;
                t.integration = r.samples;
                auto os = open_output(o.out / "trace.svg");
                write_trace_svg(os, t, name);
            }
            log_summary(log, name, s);
            return;
        }
        case ScenarioKind::constant:
        case ScenarioKind::sinusoid:
        case ScenarioKind::pattern_ch:
        case ScenarioKind::pattern_ib: {
            const Trace trace = simulate(spec.neuron, stimulus, spec.t_end, {dt});
            const RunSummary s = summarize(trace);
            write_run(o.out, trace, s, name, o.plot);
            if (spec.stimulus.kind == StimulusSpec::Kind::sinusoid) {
                write_tone_regions(o.out / "regions.csv", spec, trace);
            }
            log_summary(log, name, s);
            return;
        }
        default:
            throw ConfigError(std::string("scenario \"") + name + "\" cannot be run by simulate");
    }
}

void run_sweep(const RunSpec& spec, const CommandOptions& o, std::ostream& log) {
    if (spec.scenario != ScenarioKind::constant && spec.scenario != ScenarioKind::refractory_sweep) {
        throw ConfigError(std::string("sweep needs scenario constant or refractory-sweep, got ") +
                          scenario_name(spec.scenario));
    }
    fs::create_directories(o.out / "points");
    const auto& values = spec.sweep.values;
    std::vector<SweepRow> rows(values.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t first = 0; first < values.size(); first += workers) {
        std::vector<std::future<SweepRow>> batch;
        for (std::size_t k = first; k < std::min(values.size(), first + workers); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "point_%04zu_spikes.csv", k);
            batch.push_back(std::async(std::launch::async, run_sweep_point, std::cref(spec), values[k],
                                       o.out / "points" / name));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) rows[first + k] = batch[k].get();
    }

    auto os = open_output(o.out / "sweep.csv");
    os << kSweepHeader << '\n';
    for (const auto& r : rows) {
        os << fmt(r.v_input) << ',' << fmt(r.v_refractory) << ',' << r.status << ',' << r.spikes << ','
           << cell(r.frequency) << ',' << cell(r.predicted) << ',' << cell(r.gap) << ",\n";
        log << "v_input " << r.v_input << " V, v_refractory " << r.v_refractory << " V: " << r.status;
        if (!std::isnan(r.frequency)) log << ", " << r.frequency / 1e3 << " kHz";
        log << '\n';
    }
    if (spec.scenario == ScenarioKind::constant && spec.sweep.reference_rows && !rows.empty()) {
        // Measured spiking frequencies of the fabricated device.
        for (const auto& [v, f] : {std::pair{-1.6, 595e3}, std::pair{-1.8, 757e3}}) {
            os << fmt(v) << ",," << "reference,,,,," << fmt(f) << '\n';
        }
    }
}

void run_calibrate(const RunSpec& spec, const CommandOptions& o, std::ostream& log) {
    const CalibrationSpec& c = spec.calibration;
    nlohmann::ordered_json j;
    if (c.mode == CalibrationSpec::Mode::anchors) {
        const auto fit = fit_frequency_anchors(spec.neuron, c.anchors, {}, c.band, c.simplex);
        const auto& d = fit.config.device_input;
        j["mode"] = "anchors";
        j["r_th_k_per_w"] = d.r_th;
        j["c_th_pj_per_k"] = d.c_th * 1e12;
        j["r_s_ohm"] = fit.config.network_input.r_s;
        j["v_th_detect_v"] = fit.config.v_th_detect;
        j["v_refractory_v"] = fit.config.v_refractory;
        j["objective"] = fit.objective;
        j["iterations"] = fit.iterations;
        j["evaluations"] = fit.evaluations;
        for (std::size_t k = 0; k < c.anchors.size(); ++k) {
            j["anchors"].push_back({{"v_input_v", c.anchors[k].v_in},
                                    {"target_frequency_hz", c.anchors[k].frequency},
                                    {"model_frequency_hz", fit.frequencies[k]}});
            log << "anchor " << c.anchors[k].v_in << " V: target " << c.anchors[k].frequency / 1e3
                << " kHz, model " << fit.frequencies[k] / 1e3 << " kHz\n";
        }
    } else {
        std::vector<ParameterRange> ranges;
        for (const auto& r : extended_free_set(spec.neuron.device_input)) {
            if (std::find(c.free.begin(), c.free.end(), r.parameter) != c.free.end()) ranges.push_back(r);
        }
        const auto fit = fit_spike_times(c.observations, ranges, spec.neuron.device_input, c.simplex);
        j["mode"] = "spike_times";
        for (std::size_t k = 0; k < ranges.size(); ++k) {
            j["parameters"][parameter_name(ranges[k].parameter)] = fit.values[k];
            log << parameter_name(ranges[k].parameter) << " = " << fit.values[k] << '\n';
        }
        j["residuals"] = fit.residuals;
        j["rms_log_error"] = fit.rms_log_error;
        j["iterations"] = fit.iterations;
        j["evaluations"] = fit.evaluations;
        j["objective_history"] = fit.objective_history;
        log << "rms log error " << fit.rms_log_error << '\n';
    }
    auto os = open_output(o.out / "calibration.json");
    os << j.dump(2) << '\n';
}

void run_scaling(const RunSpec& spec, const CommandOptions& o, std::ostream& log) {
    const ScalingReport r = build_scaling_report(spec.neuron.device_input);
    {
        auto os = open_output(o.out / "scaling.txt");
        write_scaling_text(os, r);
    }
    {
        auto os = open_output(o.out / "scaling.csv");
        write_scaling_csv(os, r);
    }
    write_scaling_text(log, r);
}

void run_patterns(const RunSpec& spec, const CommandOptions& o, std::ostream& log) {
    std::vector<RunSpec> runs;
    if (spec.scenario == ScenarioKind::pattern_ch || spec.scenario == ScenarioKind::pattern_ib) {
        runs.push_back(spec);
    } else if (spec.scenario == ScenarioKind::constant) {
        runs.push_back(default_run_spec(ScenarioKind::pattern_ch));
        runs.push_back(default_run_spec(ScenarioKind::pattern_ib));
    } else {
        throw ConfigError(std::string("patterns needs scenario pattern:CH or pattern:IB, got ") +
                          scenario_name(spec.scenario));
    }
    auto table = open_output(o.out / "patterns.csv");
    table << "scenario,pattern,spike_count,mean_frequency_hz,register1_msb\n";
    for (const RunSpec& run : runs) {
        const std::string name = scenario_name(run.scenario);
        const Trace trace = simulate(run.neuron, build_stimulus(run), run.t_end, {sample_interval(run, o)});
        const RunSummary s = summarize(trace);
        write_run(o.out / name.substr(name.find(':') + 1), trace, s, name, o.plot);
        table << name << ',' << s.pattern << ',' << s.spike_count << ',' << fmt(s.mean_frequency) << ','
              << msb_sequence(trace) << '\n';
        log_summary(log, name, s);
    }
}

}  // namespace pmo::cli
