#include "pmo/patterns.hpp"

#include <algorithm>
#include <numeric>

#include "pmo/errors.hpp"

namespace pmo {

const char* pattern_name(Pattern p) {
    switch (p) {
        case Pattern::RS: return "RS";
        case Pattern::IB: return "IB";
        case Pattern::CH: return "CH";
        case Pattern::other: return "other";
    }
    return "other";
}

std::vector<double> spike_intervals(std::span<const double> spike_times, std::optional<double> onset) {
    std::vector<double> out;
    if (onset && !spike_times.empty()) out.push_back(spike_times.front() - *onset);
    for (std::size_t i = 1; i < spike_times.size(); ++i) out.push_back(spike_times[i] - spike_times[i - 1]);
    return out;
}

IntervalSplit split_intervals(std::span<const double> intervals, double tolerance) {
    IntervalSplit s;
    s.intervals.assign(intervals.begin(), intervals.end());
    s.is_long.assign(intervals.size(), false);
    if (intervals.empty()) return s;

    std::vector<double> sorted = s.intervals;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double mean_all = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    s.short_mean = s.long_mean = mean_all;

    // Minimise the within-cluster sum of squares over all cut positions.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_cut = 0;
    for (std::size_t cut = 1; cut < n; ++cut) {
        auto sse = [](auto first, auto last) {
            const double m = std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
            double acc = 0.0;
            for (auto it = first; it != last; ++it) acc += (*it - m) * (*it - m);
            return acc;
        };
        const double total = sse(sorted.begin(), sorted.begin() + static_cast<long>(cut)) +
                             sse(sorted.begin() + static_cast<long>(cut), sorted.end());
        if (total < best) {
            best = total;
            best_cut = cut;
        }
    }
    if (best_cut == 0) return s;
    const auto mid = sorted.begin() + static_cast<long>(best_cut);
    const double short_mean = std::accumulate(sorted.begin(), mid, 0.0) / static_cast<double>(best_cut);
    const double long_mean = std::accumulate(mid, sorted.end(), 0.0) / static_cast<double>(n - best_cut);
    if (long_mean < (1.0 + tolerance) * short_mean) return s;

    s.single_cluster = false;
    s.short_mean = short_mean;
    s.long_mean = long_mean;
    const double cut_value = 0.5 * (sorted[best_cut - 1] + sorted[best_cut]);
    for (std::size_t i = 0; i < s.intervals.size(); ++i) s.is_long[i] = s.intervals[i] > cut_value;
    return s;
}

namespace {

bool periodic_chattering(const std::vector<bool>& is_long) {
    if (is_long.size() < 4) return false;
    for (int phase = 0; phase < 4; ++phase) {
        bool ok = true;
        for (std::size_t i = 0; i < is_long.size() && ok; ++i) {
            ok = is_long[i] == ((i + static_cast<std::size_t>(phase)) % 4 == 3);
        }
        if (ok) return true;
    }
    return false;
}

bool bursting(const std::vector<bool>& is_long) {
    std::size_t first_long = 0;
    while (first_long < is_long.size() && !is_long[first_long]) ++first_long;
    if (first_long < 2 || is_long.size() - first_long < 2) return false;
    return std::all_of(is_long.begin() + static_cast<long>(first_long), is_long.end(),
                       [](bool b) { return b; });
}

}  // namespace

Pattern classify_pattern(std::span<const double> spike_times, double tolerance,
                         std::optional<double> onset) {
    if (spike_times.size() < 6) {
        throw DomainError("classify_pattern: need at least 6 spikes, got " +
                          std::to_string(spike_times.size()));
    }
    const auto intervals = spike_intervals(spike_times, onset);
    const auto split = split_intervals(intervals, tolerance);
    if (split.single_cluster) return Pattern::RS;
    if (periodic_chattering(split.is_long)) return Pattern::CH;
    if (bursting(split.is_long)) return Pattern::IB;
    // Start-up transient: everything after the first interval is one cluster.
    const auto tail = split_intervals(std::span(intervals).subspan(1), tolerance);
    if (tail.single_cluster) return Pattern::RS;
    return Pattern::other;
}

}  // namespace pmo
