#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pmo/neuron.hpp"

namespace pmo::cli {

/// time_s,v_in_v,v_device_v,current_a,temperature_k,v_a_v,block,spike
inline constexpr const char* kTraceHeader =
    "time_s,v_in_v,v_device_v,current_a,temperature_k,v_a_v,block,spike";
inline constexpr const char* kSpikeHeader = "time_s,source,register1_bits";

/// Rows of both blocks merged in time order (integration first on ties).
void write_trace_csv(std::ostream& os, const Trace& trace);
void write_spike_csv(std::ostream& os, const Trace& trace);

/// Replication runs have a single device; its rows are tagged "device".
void write_replication_csv(std::ostream& os, const ReplicationResult& r);

struct RunSummary {
    std::size_t spike_count = 0;             // integration block
    std::size_t refractory_spike_count = 0;
    double mean_frequency = 0.0;             // (n - 1) / (last - first), 0 below two spikes
    std::vector<double> isi;                 // between consecutive integration spikes
    std::string pattern = "n/a";             // classify_pattern from the stimulus onset
};

/// Summary from integration and refractory spike times.
[[nodiscard]] RunSummary summarize(const std::vector<double>& integration,
                                   const std::vector<double>& refractory);
[[nodiscard]] RunSummary summarize(const Trace& trace);

/// Re-reads a trace CSV (spike rows only matter) and summarises it.
/// Throws ConfigError on a malformed file, naming the line.
[[nodiscard]] RunSummary summarize_trace_csv(std::istream& in);

void write_summary_json(std::ostream& os, const RunSummary& s, const std::string& scenario);

/// Two stacked panels, current and temperature against time, one polyline
/// per block.
void write_trace_svg(std::ostream& os, const Trace& trace, const std::string& title);

/// Shortest decimal that reads back to the same double; used in every CSV.
[[nodiscard]] std::string fmt(double x);

}  // namespace pmo::cli
