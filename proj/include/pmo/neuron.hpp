#pragma once

// Clock-less two-branch neuron. The integration branch is driven by the
// stimulus, the refractory branch by a constant voltage; a 2-bit toggle
// register keeps exactly one of them connected. Every state change is caused
// by the sense-resistor voltage V_A of the connected branch crossing the
// detection threshold.

#include <optional>
#include <string>
#include <vector>

#include "pmo/circuit_solver.hpp"
#include "pmo/device_model.hpp"
#include "pmo/shift_register.hpp"
#include "pmo/waveform.hpp"

namespace pmo {

enum class Block { integration, refractory };

[[nodiscard]] const char* block_name(Block b);

struct NeuronConfig {
    DeviceParams device_input;
    DeviceParams device_refractory;
    SeriesNetwork network_input{50.0, 0.0, true, true};
    SeriesNetwork network_refractory{50.0, 0.0, true, false};
    double v_refractory = -2.0;
    ShiftRegister register1 = ShiftRegister::from_string("1111", true);
    ShiftRegister register2 = ShiftRegister::from_string("01", true);
    double v_th_detect = 0.5;
    double detector_latency = 0.0;
    IntegratorSettings integrator;
    /// Starting temperatures; nullopt means ambient.
    std::optional<double> t0_input;
    std::optional<double> t0_refractory;

    void validate() const;
};

struct Sample {
    double time = 0.0;
    double v_in = 0.0;       // signed source voltage seen by the branch (0 when its switch is open)
    double v_device = 0.0;
    double current = 0.0;
    double temperature = 0.0;
    double v_a = 0.0;
    bool connected = false;
    bool spike = false;      // row written at a threshold crossing of this branch
};

struct SpikeEvent {
    double time = 0.0;
    Block source = Block::integration;
    std::string register1;  // Register-1 contents at the crossing, before the shift
};

struct RegisterShift {
    double time = 0.0;
    int register_index = 0;  // 1 or 2
    std::string contents;    // after the shift
};

struct Trace {
    std::vector<Sample> integration;
    std::vector<Sample> refractory;
    std::vector<SpikeEvent> events;
    std::vector<RegisterShift> shifts;
    /// Times at which a V_A threshold crossing was detected.
    std::vector<double> crossings;

    [[nodiscard]] std::vector<double> spike_times(Block source) const;
};

struct SimulationOptions {
    /// Uniform sampling period; 0 records every integrator substep.
    double sample_interval = 10e-9;
    /// Hard cap on spike events (guards against collapse into zero-length phases).
    std::size_t max_events = 1'000'000;
};

/// Runs the event-driven neuron over [0, t_end]. Throws CollapseError when
/// both branches stay above threshold and the phases shrink to nothing.
[[nodiscard]] Trace simulate(const NeuronConfig& config, const Waveform& stimulus, double t_end,
                             const SimulationOptions& options = {});

struct BranchCrossing {
    double time = 0.0;         // s after connection
    double temperature = 0.0;  // device temperature at the crossing
};

/// Threshold crossing of a single closed branch (source magnitude v_source
/// through `net`) started at temperature t0. nullopt if V_A settles below v_th.
[[nodiscard]] std::optional<BranchCrossing> branch_crossing(double v_source, const SeriesNetwork& net,
                                                            const DeviceParams& p, double v_th,
                                                            double t0,
                                                            const IntegratorSettings& s = {});

/// Time part of branch_crossing.
[[nodiscard]] std::optional<double> branch_spike_time(double v_source, const SeriesNetwork& net,
                                                      const DeviceParams& p, double v_th, double t0,
                                                      const IntegratorSettings& s = {});

/// Thrown when a branch never reaches the detection threshold.
class NoSpikeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Predicted quiescent gap: spike time of the refractory branch at its drive
/// voltage, starting from `t0` (ambient by default). Throws NoSpikeError if
/// the drive is sub-threshold.
[[nodiscard]] double refractory_period(const NeuronConfig& config,
                                       std::optional<double> t0 = std::nullopt);

/// One integration phase followed by one refractory phase under a constant
/// input, as predicted without running the event loop.
struct PhasePrediction {
    double input_start_temperature = 0.0;       // integration device at reconnection
    double integration_time = 0.0;               // reconnection -> integration spike
    double refractory_start_temperature = 0.0;  // refractory device at its connection
    double gap = 0.0;                            // integration spike -> refractory spike
    std::string register1;                       // contents while integrating
};

/// Alternates branch_crossing for the two devices, cooling the idle one with
/// the closed-form exponential, for `count` integration spikes. Requires zero
/// detector latency. Throws NoSpikeError when a branch stops firing and
/// CollapseError when both phases shrink to zero length.
[[nodiscard]] std::vector<PhasePrediction> predict_phases(const NeuronConfig& config, double v_in,
                                                          std::size_t count);

struct SteadyCycle {
    double isi = 0.0;   // integration spike to integration spike
    double gap = 0.0;   // quiescent part of the isi
    double frequency = 0.0;
    std::size_t phases = 0;  // phases iterated before convergence
};

/// Limit cycle of predict_phases for a regular-spiking program (the period of
/// the R_C state sequence is folded into one cycle). Converged when the mean
/// ISI over one register period changes by less than rel_tol (or two crossing
/// resolutions, whichever is larger).
[[nodiscard]] SteadyCycle steady_cycle(const NeuronConfig& config, double v_in,
                                       double rel_tol = 1e-7, std::size_t max_phases = 20000);

/// |v_refractory| (sign of config.v_refractory kept) giving the requested
/// gap, by bisection over [v_lo, v_hi]. Without `v_input` the cold-start
/// refractory_period is matched; with it, the steady-cycle gap under that
/// constant input. A collapsed cycle counts as a zero gap, a silent refractory
/// branch as an infinite one.
[[nodiscard]] double solve_refractory_voltage(const NeuronConfig& config, double target_gap,
                                              double v_lo, double v_hi,
                                              std::optional<double> v_input = std::nullopt);

/// Integration-block quiescent gaps: time from each integration spike to the
/// next reconnection of the integration switch.
[[nodiscard]] std::vector<double> quiescent_gaps(const Trace& trace);

// --- single-device experiment replication ---------------------------------

struct ReplicationResult {
    std::vector<double> spike_times;  // compliance reach, one per pulse at most
    std::vector<Sample> samples;
};

/// Applies a waveform straight to one RRAM (no toggle or register logic).
/// A spike is the current reaching compliance; the device stays clamped for
/// the rest of that pulse and re-arms once the source returns to 0 V.
[[nodiscard]] ReplicationResult replicate_experiment(const DeviceParams& p, const Waveform& stimulus,
                                                     double sample_interval = 10e-9,
                                                     const IntegratorSettings& s = {});

}  // namespace pmo
