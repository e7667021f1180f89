#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pmo/errors.hpp"
#include "pmo/scenarios.hpp"

namespace pmo::cli {

using nlohmann::json;

namespace {

/// Typed access to one JSON object; remembers which keys were read so that
/// finish() can reject the rest.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail_at(path_, "expected an object");
    }

    std::optional<double> number(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) fail_at(where(key), "expected a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) fail_at(where(key), "must be finite");
        return x;
    }
    std::optional<double> positive(const std::string& key) {
        auto x = number(key);
        if (x && !(*x > 0.0)) fail_at(where(key), "must be > 0");
        return x;
    }
    std::optional<int> integer(const std::string& key, int min) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number_integer()) fail_at(where(key), "expected an integer");
        const auto x = v->get<long long>();
        if (x < min || x > 1'000'000'000) fail_at(where(key), "must be >= " + std::to_string(min));
        return static_cast<int>(x);
    }
    std::optional<bool> boolean(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) fail_at(where(key), "expected true or false");
        return v->get<bool>();
    }
    std::optional<std::string> string(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) fail_at(where(key), "expected a string");
        return v->get<std::string>();
    }
    const json* raw(const std::string& key) { return find(key); }

    [[nodiscard]] std::string where(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) {
                std::string allowed;
                for (const auto& k : known_) allowed += (allowed.empty() ? "" : ", ") + k;
                fail_at(where(key), "unknown key (allowed here: " + allowed + ")");
            }
        }
    }

    [[noreturn]] static void fail_at(const std::string& path, const std::string& what) {
        throw ConfigError(path + ": " + what);
    }

private:
    const json* find(const std::string& key) {
        known_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
    std::set<std::string> known_;
};

const std::map<std::string, ScenarioKind>& scenario_table() {
    static const std::map<std::string, ScenarioKind> table{
        {"constant", ScenarioKind::constant},
        {"refractory-sweep", ScenarioKind::refractory_sweep},
        {"sinusoid", ScenarioKind::sinusoid},
        {"pattern:CH", ScenarioKind::pattern_ch},
        {"pattern:IB", ScenarioKind::pattern_ib},
        {"experiment-replication", ScenarioKind::experiment_replication},
        {"scaling-report", ScenarioKind::scaling_report},
        {"calibrate", ScenarioKind::calibrate},
    };
    return table;
}

std::vector<PulseLevel> replication_program(const std::string& name, const std::string& where) {
    // Pulse widths are not measured values; 500 ns fits every spike time of
    // the calibrated device at these amplitudes.
    if (name == "CH") return {{-2.4, 500e-9, 3}, {-1.7, 500e-9, 1}};
    if (name == "IB") return {{-2.4, 500e-9, 3}, {-1.9, 500e-9, 6}};
    ObjectReader::fail_at(where, "unknown program \"" + name + "\" (expected CH or IB)");
}

void read_device(const json& j, const std::string& path, DeviceParams& p) {
    ObjectReader r(j, path);
    if (auto x = r.positive("mu_cm2_per_vs")) p.mu = *x * 1e-4;
    if (auto x = r.positive("phi_b_ev")) p.phi_b = *x;
    if (auto x = r.positive("eps_pmo")) p.eps_pmo = *x;
    if (auto x = r.positive("n_v_per_cm3")) p.n_v = *x * 1e6;
    if (auto x = r.positive("e_trap_ev")) p.e_trap = *x;
    if (auto x = r.positive("n_t_per_cm3")) p.n_t = *x * 1e6;
    if (auto x = r.positive("length_nm")) p.length = *x * 1e-9;
    if (auto x = r.positive("area_um2")) p.area = *x * 1e-12;
    if (auto x = r.positive("t_amb_k")) p.t_amb = *x;
    if (auto x = r.positive("r_th_k_per_w")) p.r_th = *x;
    if (auto x = r.positive("c_th_pj_per_k")) p.c_th = *x * 1e-12;
    if (auto x = r.positive("i_compliance_ma")) p.i_compliance = *x * 1e-3;
    r.finish();
}

void read_integrator(const json& j, const std::string& path, IntegratorSettings& s) {
    ObjectReader r(j, path);
    if (auto x = r.positive("max_temperature_step_k")) s.max_temperature_step = *x;
    if (auto x = r.positive("min_substep_s")) s.min_substep = *x;
    if (auto x = r.positive("max_substep_s")) s.max_substep = *x;
    if (auto x = r.positive("event_resolution_s")) s.event_resolution = *x;
    if (auto x = r.positive("max_duration_s")) s.max_duration = *x;
    r.finish();
}

void read_neuron(const json& j, const std::string& path, NeuronConfig& c) {
    ObjectReader r(j, path);
    if (auto base = r.string("base")) {
        if (*base == "reference") {
            c = NeuronConfig{};
        } else if (*base != "calibrated") {
            ObjectReader::fail_at(r.where("base"), "expected \"calibrated\" or \"reference\"");
        }
    }
    if (const json* d = r.raw("device")) {
        read_device(*d, r.where("device"), c.device_input);
        read_device(*d, r.where("device"), c.device_refractory);
    }
    if (const json* d = r.raw("device_refractory")) {
        read_device(*d, r.where("device_refractory"), c.device_refractory);
    }
    if (auto x = r.positive("r_s_ohm")) {
        c.network_input.r_s = *x;
        c.network_refractory.r_s = *x;
    }
    if (auto x = r.positive("r_s_refractory_ohm")) c.network_refractory.r_s = *x;
    if (auto x = r.number("r_c_ohm")) {
        if (*x < 0.0) ObjectReader::fail_at(r.where("r_c_ohm"), "must be >= 0");
        c.network_input.r_c_active = *x;
    }
    if (auto x = r.number("v_refractory_v")) c.v_refractory = *x;
    if (auto x = r.positive("v_th_detect_v")) c.v_th_detect = *x;
    if (auto x = r.number("detector_latency_s")) {
        if (*x < 0.0) ObjectReader::fail_at(r.where("detector_latency_s"), "must be >= 0");
        c.detector_latency = *x;
    }
    const auto bits = r.string("register1");
    const auto wrap = r.boolean("register1_wrap");
    if (bits || wrap) {
        const std::string b = bits.value_or(c.register1.to_string());
        if (b.size() != 4 || b.find_first_not_of("01") != std::string::npos) {
            ObjectReader::fail_at(r.where("register1"), "expected 4 characters of 0/1");
        }
        c.register1 = ShiftRegister::from_string(b, wrap.value_or(c.register1.wrap()));
    }
    if (auto x = r.positive("t0_input_k")) c.t0_input = *x;
    if (auto x = r.positive("t0_refractory_k")) c.t0_refractory = *x;
    if (const json* s = r.raw("integrator")) read_integrator(*s, r.where("integrator"), c.integrator);
    r.finish();
    try {
        c.validate();
    } catch (const DomainError& e) {
        ObjectReader::fail_at(path, e.what());
    }
}

void read_stimulus(const json& j, const std::string& path, StimulusSpec& s) {
    ObjectReader r(j, path);
    if (auto kind = r.string("kind")) {
        if (*kind == "constant") s.kind = StimulusSpec::Kind::constant;
        else if (*kind == "sinusoid") s.kind = StimulusSpec::Kind::sinusoid;
        else if (*kind == "pulses") s.kind = StimulusSpec::Kind::pulses;
        else ObjectReader::fail_at(r.where("kind"), "expected constant, sinusoid or pulses");
    }
    switch (s.kind) {
        case StimulusSpec::Kind::constant:
            if (auto x = r.number("v_input_v")) s.v_input = *x;
            break;
        case StimulusSpec::Kind::sinusoid:
            if (auto x = r.positive("f1_hz")) s.tones.f1 = *x;
            if (auto x = r.positive("f2_hz")) s.tones.f2 = *x;
            if (auto x = r.number("amplitude_v")) s.tones.amplitude = *x;
            if (auto x = r.number("dc_v")) s.tones.dc = *x;
            break;
        case StimulusSpec::Kind::pulses: {
            if (auto name = r.string("program")) s.levels = replication_program(*name, r.where("program"));
            if (const json* levels = r.raw("levels")) {
                if (!levels->is_array()) ObjectReader::fail_at(r.where("levels"), "expected an array");
                s.levels.clear();
                for (std::size_t i = 0; i < levels->size(); ++i) {
                    const std::string where = r.where("levels") + "[" + std::to_string(i) + "]";
                    ObjectReader lr((*levels)[i], where);
                    const auto v = lr.number("voltage_v");
                    const auto d = lr.positive("duration_s");
                    if (!v || !d) ObjectReader::fail_at(where, "voltage_v and duration_s are required");
                    s.levels.push_back({*v, *d, lr.integer("repeat", 1).value_or(1)});
                    lr.finish();
                }
            }
            if (auto x = r.number("reset_gap_s")) {
                if (*x < 0.0) ObjectReader::fail_at(r.where("reset_gap_s"), "must be >= 0");
                s.reset_gap = *x;
            }
            if (auto x = r.integer("cycles", 1)) s.cycles = *x;
            break;
        }
    }
    r.finish();
}

std::vector<double> read_points(const json& j, const std::string& path, const char* unit) {
    if (j.is_array()) {
        std::vector<double> out;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number()) {
                ObjectReader::fail_at(path + "[" + std::to_string(i) + "]", "expected a number");
            }
            out.push_back(j[i].get<double>());
        }
        return out;
    }
    ObjectReader r(j, path);
    const std::string u = unit;
    const auto start = r.number("start_" + u);
    const auto stop = r.number("stop_" + u);
    const auto step = r.number("step_" + u);
    r.finish();
    if (!start || !stop || !step) {
        ObjectReader::fail_at(path, "expected a list or start_" + u + "/stop_" + u + "/step_" + u);
    }
    if (*step == 0.0) ObjectReader::fail_at(path + ".step_" + u, "must be non-zero");
    return linear_range(*start, *stop, *step);
}

void read_sweep(const json& j, const std::string& path, ScenarioKind kind, SweepSpec& s) {
    ObjectReader r(j, path);
    const char* key = kind == ScenarioKind::refractory_sweep ? "v_refractory_v" : "v_input_v";
    if (const json* pts = r.raw(key)) s.values = read_points(*pts, r.where(key), "v");
    if (auto x = r.boolean("reference_rows")) s.reference_rows = *x;
    r.finish();
}

std::vector<SpikeTimeObservation> read_observation_file(const std::filesystem::path& file,
                                                        const std::string& where) {
    std::ifstream in(file);
    if (!in) ObjectReader::fail_at(where, "cannot open " + file.string());
    try {
        return read_observations_csv(in);
    } catch (const ConfigError& e) {
        ObjectReader::fail_at(where, file.string() + ": " + e.what());
    }
}

void read_calibration(const json& j, const std::string& path, const std::filesystem::path& base_dir,
                      CalibrationSpec& s) {
    ObjectReader r(j, path);
    if (auto mode = r.string("mode")) {
        if (*mode == "anchors") s.mode = CalibrationSpec::Mode::anchors;
        else if (*mode == "spike_times") s.mode = CalibrationSpec::Mode::spike_times;
        else ObjectReader::fail_at(r.where("mode"), "expected anchors or spike_times");
    }
    if (const json* a = r.raw("anchors")) {
        if (!a->is_array() || a->empty()) ObjectReader::fail_at(r.where("anchors"), "expected a non-empty array");
        s.anchors.clear();
        for (std::size_t i = 0; i < a->size(); ++i) {
            const std::string where = r.where("anchors") + "[" + std::to_string(i) + "]";
            ObjectReader ar((*a)[i], where);
            const auto v = ar.number("v_input_v");
            const auto f = ar.positive("frequency_hz");
            if (!v || !f) ObjectReader::fail_at(where, "v_input_v and frequency_hz are required");
            s.anchors.push_back({*v, *f, ar.number("weight").value_or(1.0)});
            ar.finish();
        }
    }
    if (auto file = r.string("observations_csv")) {
        s.observations = read_observation_file(base_dir / *file, r.where("observations_csv"));
    }
    if (const json* f = r.raw("free")) {
        if (!f->is_array()) ObjectReader::fail_at(r.where("free"), "expected an array of names");
        s.free.clear();
        static const std::map<std::string, FreeParameter> names{
            {"r_th", FreeParameter::r_th}, {"c_th", FreeParameter::c_th},
            {"i_compliance", FreeParameter::i_compliance}, {"phi_b", FreeParameter::phi_b},
            {"e_trap", FreeParameter::e_trap}};
        for (const auto& item : *f) {
            const auto it = item.is_string() ? names.find(item.get<std::string>()) : names.end();
            if (it == names.end()) {
                ObjectReader::fail_at(r.where("free"),
                                      "unknown parameter " + item.dump() +
                                          " (allowed: r_th, c_th, i_compliance, phi_b, e_trap)");
            }
            s.free.push_back(it->second);
        }
    }
    if (auto x = r.integer("starts", 1)) s.simplex.starts = *x;
    if (auto x = r.positive("tolerance")) s.simplex.tolerance = *x;
    if (auto x = r.integer("max_iterations", 1)) s.simplex.max_iterations = *x;
    if (const json* b = r.raw("band")) {
        ObjectReader br(*b, r.where("band"));
        if (auto x = br.boolean("enabled")) s.band.enabled = *x;
        if (auto x = br.positive("v_low_v")) s.band.v_low = *x;
        if (auto x = br.positive("v_high_v")) s.band.v_high = *x;
        if (auto x = br.positive("t_min_s")) s.band.t_min = *x;
        if (auto x = br.positive("t_max_s")) s.band.t_max = *x;
        br.finish();
    }
    r.finish();
    if (s.mode == CalibrationSpec::Mode::spike_times && s.observations.empty()) {
        ObjectReader::fail_at(path, "spike_times mode needs observations_csv");
    }
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

const char* scenario_name(ScenarioKind k) {
    for (const auto& [name, kind] : scenario_table()) {
        if (kind == k) return name.c_str();
    }
    return "?";
}

std::vector<double> linear_range(double start, double stop, double step) {
    std::vector<double> out;
    if (step == 0.0 || (stop - start) * step < 0.0) return out;
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
        // Round to the step's decimal grid so -1.5 + 3*(-0.1) prints as -1.8.
        const double x = start + static_cast<double>(i) * step;
        out.push_back(std::round(x * 1e9) / 1e9);
    }
    return out;
}

RunSpec default_run_spec(ScenarioKind kind) {
    RunSpec s;
    s.scenario = kind;
    s.neuron = calibrated_neuron();
    switch (kind) {
        case ScenarioKind::constant:
            s.sweep.values = linear_range(-1.5, -2.4, -0.1);
            break;
        case ScenarioKind::refractory_sweep:
            s.stimulus.v_input = kRefractoryInputVoltage;
            s.sweep.values = linear_range(-1.45, -1.60, -0.01);
            s.sweep.reference_rows = false;
            s.t_end = 40e-6;
            break;
        case ScenarioKind::sinusoid: {
            const Scenario sc = two_tone_scenario(2);
            s.neuron = sc.config;
            s.stimulus.kind = StimulusSpec::Kind::sinusoid;
            s.t_end = sc.t_end;
            break;
        }
        case ScenarioKind::pattern_ch:
        case ScenarioKind::pattern_ib: {
            const Scenario sc =
                pattern_scenario(kind == ScenarioKind::pattern_ch ? Pattern::CH : Pattern::IB);
            s.neuron = sc.config;
            s.stimulus.v_input = kPatternInputVoltage;
            s.t_end = sc.t_end;
            break;
        }
        case ScenarioKind::experiment_replication:
            s.stimulus.kind = StimulusSpec::Kind::pulses;
            s.stimulus.levels = replication_program("CH", "");
            s.stimulus.cycles = 3;
            // Several thermal time constants of the calibrated device, so each
            // pulse starts close to ambient.
            s.stimulus.reset_gap = 1e-6;
            s.t_end = 0.0;  // whole program
            break;
        case ScenarioKind::scaling_report:
        case ScenarioKind::calibrate:
            break;
    }
    return s;
}

RunSpec parse_run_spec(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("syntax error at " + line_column(text, e.byte) + ": " + e.what());
    }
    ObjectReader r(j, "");
    ScenarioKind kind = ScenarioKind::constant;
    if (auto name = r.string("scenario")) {
        const auto it = scenario_table().find(*name);
        if (it == scenario_table().end()) {
            std::string allowed;
            for (const auto& [n, k] : scenario_table()) allowed += (allowed.empty() ? "" : ", ") + n;
            ObjectReader::fail_at("scenario", "unknown scenario \"" + *name + "\" (allowed: " + allowed + ")");
        }
        kind = it->second;
    }
    RunSpec s = default_run_spec(kind);
    if (auto x = r.positive("t_end_s")) s.t_end = *x;
    if (auto x = r.positive("sample_interval_s")) s.sample_interval = *x;
    if (const json* n = r.raw("neuron")) read_neuron(*n, "neuron", s.neuron);
    if (const json* st = r.raw("stimulus")) read_stimulus(*st, "stimulus", s.stimulus);
    if (const json* sw = r.raw("sweep")) read_sweep(*sw, "sweep", kind, s.sweep);
    if (const json* c = r.raw("calibration")) read_calibration(*c, "calibration", base_dir, s.calibration);
    r.finish();
    if (s.stimulus.kind == StimulusSpec::Kind::sinusoid) {
        const double f1 = s.stimulus.tones.f1, f2 = s.stimulus.tones.f2;
        if (f1 != std::round(f1) || f2 != std::round(f2)) {
            ObjectReader::fail_at("stimulus", "tone frequencies must be whole hertz");
        }
    }
    return s;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_run_spec(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

Waveform build_stimulus(const RunSpec& spec) {
    const StimulusSpec& s = spec.stimulus;
    switch (s.kind) {
        case StimulusSpec::Kind::constant:
            return constant(s.v_input, spec.t_end);
        case StimulusSpec::Kind::sinusoid:
            return sinusoid_sum(s.tones.f1, s.tones.f2, s.tones.amplitude, s.tones.dc, spec.t_end);
        case StimulusSpec::Kind::pulses: {
            Waveform w = pulse_program(s.levels, s.reset_gap, s.cycles);
            if (spec.t_end > w.duration()) w.append(constant(0.0, spec.t_end - w.duration()));
            return w;
        }
    }
    return {};
}

}  // namespace pmo::cli
