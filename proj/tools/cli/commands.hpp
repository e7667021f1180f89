#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace pmo::cli {

struct CommandOptions {
    std::filesystem::path out = "out";
    bool plot = false;
    std::optional<double> sample_interval;  // overrides RunSpec::sample_interval when set
};

/// Each command writes its artifacts under options.out and a short report to
/// `log`. Errors propagate as pmo exceptions.
void run_simulate(const RunSpec& spec, const CommandOptions& options, std::ostream& log);
void run_sweep(const RunSpec& spec, const CommandOptions& options, std::ostream& log);
void run_calibrate(const RunSpec& spec, const CommandOptions& options, std::ostream& log);
void run_scaling(const RunSpec& spec, const CommandOptions& options, std::ostream& log);
void run_patterns(const RunSpec& spec, const CommandOptions& options, std::ostream& log);

/// Header of the sweep CSV.
inline constexpr const char* kSweepHeader =
    "v_input_v,v_refractory_v,status,spike_count,frequency_hz,predicted_frequency_hz,"
    "refractory_gap_s,reference_frequency_hz";

}  // namespace pmo::cli
