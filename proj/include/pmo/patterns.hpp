#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmo {

enum class Pattern { RS, IB, CH, other };

[[nodiscard]] const char* pattern_name(Pattern p);

struct IntervalSplit {
    std::vector<double> intervals;
    std::vector<bool> is_long;      // per interval
    double short_mean = 0.0;
    double long_mean = 0.0;
    bool single_cluster = true;
};

/// Two-means split of the intervals (exact for 1-D: best threshold on the
/// sorted values). Clusters whose means differ by less than a factor
/// (1 + tolerance) collapse into one.
[[nodiscard]] IntervalSplit split_intervals(std::span<const double> intervals, double tolerance);

/// Labels a spike train from its intervals. When `onset` is given the first
/// interval is the latency from the onset to the first spike.
///   RS: one cluster (a single leading transient interval is tolerated)
///   CH: short/long sequence periodic in (s,s,s,l)
///   IB: a run of >= 2 short intervals followed only by long ones (>= 2)
/// Throws DomainError with fewer than 6 spikes.
[[nodiscard]] Pattern classify_pattern(std::span<const double> spike_times, double tolerance = 0.25,
                                       std::optional<double> onset = std::nullopt);

/// Interval list as used by classify_pattern.
[[nodiscard]] std::vector<double> spike_intervals(std::span<const double> spike_times,
                                                  std::optional<double> onset = std::nullopt);

}  // namespace pmo
