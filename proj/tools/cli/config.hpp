#pragma once

// JSON run description. Every key carries its unit in the name and unknown
// keys are rejected, so a typo never silently falls back to a default.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pmo/calibration.hpp"
#include "pmo/neuron.hpp"
#include "pmo/waveform.hpp"

namespace pmo::cli {

enum class ScenarioKind {
    constant,
    refractory_sweep,
    sinusoid,
    pattern_ch,
    pattern_ib,
    experiment_replication,
    scaling_report,
    calibrate,
};

[[nodiscard]] const char* scenario_name(ScenarioKind k);

struct StimulusSpec {
    enum class Kind { constant, sinusoid, pulses } kind = Kind::constant;
    double v_input = -1.6;
    SinusoidSum tones{250e3, 350e3, -0.7, -0.7};
    std::vector<PulseLevel> levels;
    double reset_gap = 100e-9;
    int cycles = 1;
};

struct SweepSpec {
    std::vector<double> values;  // v_input_v or v_refractory_v points, signed
    bool reference_rows = true;
};

struct CalibrationSpec {
    enum class Mode { anchors, spike_times } mode = Mode::anchors;
    std::vector<FrequencyAnchor> anchors{{-1.6, 537e3, 1.0}, {-1.8, 754e3, 1.0}};
    std::vector<SpikeTimeObservation> observations;
    std::vector<FreeParameter> free{FreeParameter::r_th, FreeParameter::c_th};
    SpikeTimeBand band;
    SimplexOptions simplex{0.1, 1e-4, 0.0, 2000, 1};
};

struct RunSpec {
    ScenarioKind scenario = ScenarioKind::constant;
    NeuronConfig neuron;
    StimulusSpec stimulus;
    double t_end = 20e-6;
    double sample_interval = 10e-9;
    SweepSpec sweep;
    CalibrationSpec calibration;
};

/// Parses a run description. `base_dir` resolves relative file references.
/// Throws ConfigError naming the line/column (syntax) or the key path (content).
[[nodiscard]] RunSpec parse_run_spec(const std::string& text,
                                     const std::filesystem::path& base_dir = ".");

[[nodiscard]] RunSpec load_run_spec(const std::filesystem::path& path);

/// Spec used when no --config is given.
[[nodiscard]] RunSpec default_run_spec(ScenarioKind kind);

/// Builds the stimulus the spec describes, t_end long.
[[nodiscard]] Waveform build_stimulus(const RunSpec& spec);

/// Evenly spaced points from start to stop inclusive; empty when step
/// points away from stop.
[[nodiscard]] std::vector<double> linear_range(double start, double stop, double step);

}  // namespace pmo::cli
