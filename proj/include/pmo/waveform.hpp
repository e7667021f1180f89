#pragma once

// Piecewise stimulus waveforms: constant levels, two-tone sinusoid sums and
// pulse programs with 0 V reset gaps. Values are signed volts.

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace pmo {

struct ConstantLevel {
    double v = 0.0;
};

/// dc + amplitude*sin(2 pi f1 s) + amplitude*sin(2 pi f2 s), s local to the segment.
struct SinusoidSum {
    double f1 = 0.0;
    double f2 = 0.0;
    double amplitude = 0.0;
    double dc = 0.0;
};

struct Segment {
    std::variant<ConstantLevel, SinusoidSum> shape;
    double duration = 0.0;
};

class Waveform {
public:
    Waveform() = default;
    explicit Waveform(std::vector<Segment> segments);

    /// Signed voltage at time s in [0, duration()]. Throws DomainError outside.
    [[nodiscard]] double value(double s) const;
    [[nodiscard]] double duration() const { return duration_; }
    [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }
    [[nodiscard]] bool empty() const { return segments_.empty(); }

    /// Earliest segment boundary strictly after s (duration() if none).
    [[nodiscard]] double next_breakpoint(double s) const;

    /// Upper bound on integrator substeps that keeps oscillating segments resolved.
    [[nodiscard]] double max_step_hint() const;

    /// Appends the segments of another waveform after this one.
    Waveform& append(const Waveform& other);

    /// Uniformly sampled CSV with header "time_s,v_in_v".
    void write_csv(std::ostream& os, double sample_interval) const;

private:
    std::vector<Segment> segments_;
    std::vector<double> starts_;
    double duration_ = 0.0;
};

[[nodiscard]] Waveform constant(double v, double t_end);

[[nodiscard]] Waveform sinusoid_sum(double f1, double f2, double amplitude, double dc, double t_end);

/// Beat period of a two-tone sum: 1 / gcd(f1, f2). Frequencies must be whole hertz.
[[nodiscard]] double beat_period(double f1, double f2);

enum class EnvelopeLevel { high, moderate, low };

[[nodiscard]] const char* envelope_level_name(EnvelopeLevel level);

/// One carrier period of a two-tone sum, ranked by how far it swings in the
/// direction of the dc offset.
struct EnvelopeRegion {
    double start = 0.0;
    double end = 0.0;
    double peak_magnitude = 0.0;  // largest |v| with the sign of dc inside the window
    EnvelopeLevel level = EnvelopeLevel::low;
};

/// Splits one beat period into windows of one carrier period 2/(f1+f2) and
/// labels the top third of peaks high, the middle third moderate and the rest
/// low. Throws DomainError when the beat is not a whole number of carrier periods.
[[nodiscard]] std::vector<EnvelopeRegion> envelope_regions(const SinusoidSum& s);

/// Number of spike times falling in [start, end) of each region, after
/// shifting the regions by `offset`.
[[nodiscard]] std::vector<int> count_per_region(std::span<const EnvelopeRegion> regions,
                                                std::span<const double> spike_times,
                                                double offset = 0.0);

struct PulseLevel {
    double voltage = 0.0;
    double duration = 0.0;
    int repeat = 1;
};

/// Each listed level is emitted `repeat` times; consecutive pulses are
/// separated by `reset_gap` seconds at 0 V. The whole list is played
/// `cycles` times. An empty list yields an empty (zero) waveform.
[[nodiscard]] Waveform pulse_program(std::span<const PulseLevel> levels, double reset_gap = 100e-9,
                                     int cycles = 1);

}  // namespace pmo
