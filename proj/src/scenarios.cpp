#include "pmo/scenarios.hpp"

#include <cmath>

#include "pmo/calibration.hpp"
#include "pmo/errors.hpp"

namespace pmo {

Scenario regular_spiking_scenario(double v_in, double t_end) {
    return {calibrated_neuron(), constant(v_in, t_end), t_end};
}

Scenario two_tone_scenario(int beats) {
    if (beats < 1) throw DomainError("two_tone_scenario: need at least one beat period");
    NeuronConfig c = calibrated_neuron();
    c.v_refractory = kToneRefractoryVoltage;
    const double t_end = beats * beat_period(kToneF1, kToneF2);
    return {c, sinusoid_sum(kToneF1, kToneF2, kToneAmplitude, kToneDc, t_end), t_end};
}

Scenario pattern_scenario(Pattern pattern, double t_end) {
    if (pattern != Pattern::CH && pattern != Pattern::IB) {
        throw DomainError("pattern_scenario: only CH and IB have a register program");
    }
    NeuronConfig c = calibrated_neuron();
    c.network_input.r_c_active = kPatternControlResistance;
    c.register1 = ShiftRegister::from_string("1110", pattern == Pattern::CH);
    return {c, constant(kPatternInputVoltage, t_end), t_end};
}

Scenario refractory_scenario(double target_gap, double t_end) {
    NeuronConfig c = calibrated_neuron();
    const double v_in = std::abs(kRefractoryInputVoltage);
    c.v_refractory = solve_refractory_voltage(c, target_gap, 1.3, 3.0, v_in);
    return {c, constant(kRefractoryInputVoltage, t_end), t_end};
}

}  // namespace pmo
