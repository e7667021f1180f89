#pragma once

// Ready-made neuron set-ups on top of the calibrated device pair. The
// refractory drive and R_C are not measured quantities; each scenario carries
// its own tuned value.

#include "pmo/neuron.hpp"
#include "pmo/patterns.hpp"
#include "pmo/waveform.hpp"

namespace pmo {

struct Scenario {
    NeuronConfig config;
    Waveform stimulus;
    double t_end = 0.0;
};

/// Two-tone drive: 250 kHz + 350 kHz, both -0.7 V, on a -0.7 V offset.
inline constexpr double kToneF1 = 250e3;
inline constexpr double kToneF2 = 350e3;
inline constexpr double kToneAmplitude = -0.7;
inline constexpr double kToneDc = -0.7;
/// Refractory drive for the two-tone scenario. The regular-spiking value is
/// too weak to recover between the dense spikes of a high-voltage lobe.
inline constexpr double kToneRefractoryVoltage = -2.14;

/// Constant input of the chattering / bursting scenarios.
inline constexpr double kPatternInputVoltage = -1.8;
/// Long/short interval ratio aimed for by R_C.
inline constexpr double kPatternIntervalRatio = 1.5;
/// solve_control_resistance(calibrated_neuron(), -1.8, 1.5).
inline constexpr double kPatternControlResistance = 47.5367;

/// Constant input of the refractory-control scenario.
inline constexpr double kRefractoryInputVoltage = -2.2;

/// Calibrated neuron under a constant input, register 1 = 1111 (wrap).
[[nodiscard]] Scenario regular_spiking_scenario(double v_in, double t_end = 20e-6);

/// Calibrated neuron under the two-tone drive, `beats` beat periods long.
[[nodiscard]] Scenario two_tone_scenario(int beats = 2);

/// CH (1110 circular) or IB (1110 zero-fill) at the pattern input.
/// Throws DomainError for RS / other.
[[nodiscard]] Scenario pattern_scenario(Pattern pattern, double t_end = 40e-6);

/// Calibrated neuron at the refractory input with the refractory drive solved
/// so that the settled quiescent gap equals `target_gap`.
[[nodiscard]] Scenario refractory_scenario(double target_gap, double t_end = 40e-6);

}  // namespace pmo
