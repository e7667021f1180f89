#pragma once

// Parameter fitting against measured spike times (single device) and
// against spiking-frequency anchors (full neuron).

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pmo/device_model.hpp"
#include "pmo/errors.hpp"
#include "pmo/nelder_mead.hpp"
#include "pmo/neuron.hpp"

namespace pmo {

struct SpikeTimeObservation {
    double v = 0.0;        // applied voltage magnitude [V]
    double t_spike = 0.0;  // [s]
    double weight = 1.0;
};

enum class FreeParameter { r_th, c_th, i_compliance, phi_b, e_trap };

[[nodiscard]] const char* parameter_name(FreeParameter f);
[[nodiscard]] double get_parameter(const DeviceParams& p, FreeParameter f);
void set_parameter(DeviceParams& p, FreeParameter f, double value);

/// One free parameter with its search box, in natural (SI / eV) units.
struct ParameterRange {
    FreeParameter parameter = FreeParameter::r_th;
    double lower = 0.0;
    double upper = 0.0;
};

/// {r_th, c_th} with a decade either side of the reference stack.
[[nodiscard]] std::vector<ParameterRange> default_free_set(const DeviceParams& init);
/// Default set plus {i_compliance, phi_b, e_trap}.
[[nodiscard]] std::vector<ParameterRange> extended_free_set(const DeviceParams& init);

struct FitResult {
    DeviceParams params;
    std::vector<double> values;     // fitted values, in the order of the free set
    std::vector<double> residuals;  // ln t_model - ln t_obs per observation
    double rms_log_error = 0.0;     // sqrt(sum w r^2 / sum w)
    int iterations = 0;
    int evaluations = 0;
    std::vector<double> objective_history;
};

/// No parameter choice in the box makes some observation spike.
class InfeasibleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Weighted RMS of log residuals, as stored in FitResult.
[[nodiscard]] double rms_log_error(std::span<const double> residuals,
                                   std::span<const SpikeTimeObservation> observations);

/// Minimises sum w (ln t_model(v) - ln t_obs)^2 over the free parameters
/// (searched in log coordinates) with multi-start Nelder-Mead.
[[nodiscard]] FitResult fit_spike_times(std::span<const SpikeTimeObservation> observations,
                                        std::span<const ParameterRange> free,
                                        const DeviceParams& init,
                                        const SimplexOptions& options = {});

/// Reads "v_volts,t_spike_seconds,weight" rows; the header is required.
[[nodiscard]] std::vector<SpikeTimeObservation> read_observations_csv(std::istream& in);

// --- neuron frequency anchors ----------------------------------------------

struct FrequencyAnchor {
    double v_in = 0.0;       // signed constant input [V]
    double frequency = 0.0;  // [Hz]
    double weight = 1.0;
};

/// Keeps the bare device's spike times inside [t_min, t_max] between the two
/// voltages while the anchors are fitted (the frequencies alone leave a
/// valley of equivalent solutions).
struct SpikeTimeBand {
    double v_low = 1.5;
    double v_high = 2.4;
    double t_min = 100e-9;
    double t_max = 1e-6;
    double margin = 0.02;  // penalised beyond [t_min (1 + margin), t_max / (1 + margin)]
    double penalty = 10.0;
    bool enabled = true;
};

/// Search box of the neuron fit: both devices share one thermal scaling and
/// both branches one sense resistor, with V_th = R_S * I_compliance.
struct NeuronFitBox {
    double r_th_scale_min = 0.2, r_th_scale_max = 5.0;
    double c_th_scale_min = 0.5, c_th_scale_max = 30.0;
    double r_s_min = 20.0, r_s_max = 400.0;
    double v_refractory_min = 0.8, v_refractory_max = 3.0;
};

struct NeuronFitResult {
    NeuronConfig config;
    std::vector<double> frequencies;  // model, per anchor
    double objective = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

/// Applies (r_th scale, c_th scale, R_S, |v_refractory|) to `base`.
[[nodiscard]] NeuronConfig apply_neuron_parameters(const NeuronConfig& base, double r_th_scale,
                                                   double c_th_scale, double r_s,
                                                   double v_refractory_magnitude);

/// Fits {r_th, c_th, v_refractory, R_S} to the anchors using the steady
/// cycle frequency. The start is `base` itself (scales 1).
[[nodiscard]] NeuronFitResult fit_frequency_anchors(const NeuronConfig& base,
                                                    std::span<const FrequencyAnchor> anchors,
                                                    const NeuronFitBox& box = {},
                                                    const SpikeTimeBand& band = {},
                                                    const SimplexOptions& options = {});

/// Reference stack after fitting the two regular-spiking anchors
/// (537 kHz at -1.6 V, 754 kHz at -1.8 V) with fit_frequency_anchors.
[[nodiscard]] NeuronConfig calibrated_neuron();

/// Long/short interval ratio of a chattering program (register 1 = 1110,
/// circular) once the predicted phases have settled: the
/// longest interval of the last register period over the mean of the other three.
[[nodiscard]] double chattering_ratio(const NeuronConfig& config, double v_in);

/// R_C in [0, r_max] giving the requested chattering_ratio, by bisection.
/// A control resistance that silences the integration branch counts as an
/// infinite ratio.
[[nodiscard]] double solve_control_resistance(const NeuronConfig& config, double v_in,
                                              double target_ratio, double r_max = 1000.0);

}  // namespace pmo
