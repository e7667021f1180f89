#include "pmo/waveform.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "pmo/errors.hpp"

namespace pmo {

namespace {

double evaluate(const Segment& seg, double local) {
    return std::visit(
        [local](const auto& shape) -> double {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, ConstantLevel>) {
                return shape.v;
            } else {
                constexpr double two_pi = 2.0 * std::numbers::pi;
                return shape.dc + shape.amplitude * std::sin(two_pi * shape.f1 * local) +
                       shape.amplitude * std::sin(two_pi * shape.f2 * local);
            }
        },
        seg.shape);
}

void check_segment(const Segment& seg) {
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
        throw DomainError("waveform segment duration must be finite and > 0");
    }
    std::visit(
        [](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, ConstantLevel>) {
                if (!std::isfinite(shape.v)) throw DomainError("constant level must be finite");
            } else {
                if (!(shape.f1 > 0.0) || !(shape.f2 > 0.0) || !std::isfinite(shape.f1) ||
                    !std::isfinite(shape.f2)) {
                    throw DomainError("sinusoid frequencies must be finite and > 0");
                }
                if (!std::isfinite(shape.amplitude) || !std::isfinite(shape.dc)) {
                    throw DomainError("sinusoid amplitude and dc must be finite");
                }
            }
        },
        seg.shape);
}

}  // namespace

Waveform::Waveform(std::vector<Segment> segments) {
    for (auto& seg : segments) {
        check_segment(seg);
        starts_.push_back(duration_);
        duration_ += seg.duration;
        segments_.push_back(std::move(seg));
    }
}

double Waveform::value(double s) const {
    if (!(s >= 0.0) || s > duration_) {
        throw DomainError("stimulus undefined at t=" + std::to_string(s) + " s (domain [0, " +
                          std::to_string(duration_) + "])");
    }
    if (segments_.empty()) return 0.0;
    // Segment i owns [start_i, start_{i+1}); the final instant belongs to the last one.
    auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
    const auto idx = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
    return evaluate(segments_[idx], s - starts_[idx]);
}

double Waveform::next_breakpoint(double s) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
    return it == starts_.end() ? duration_ : *it;
}

double Waveform::max_step_hint() const {
    double hint = std::numeric_limits<double>::infinity();
    for (const auto& seg : segments_) {
        if (const auto* sine = std::get_if<SinusoidSum>(&seg.shape)) {
            hint = std::min(hint, 1.0 / (200.0 * std::max(sine->f1, sine->f2)));
        }
    }
    return hint;
}

Waveform& Waveform::append(const Waveform& other) {
    for (const auto& seg : other.segments_) {
        starts_.push_back(duration_);
        duration_ += seg.duration;
        segments_.push_back(seg);
    }
    return *this;
}

void Waveform::write_csv(std::ostream& os, double sample_interval) const {
    if (!(sample_interval > 0.0)) throw DomainError("sample interval must be > 0");
    os << "time_s,v_in_v\n";
    const auto n = static_cast<long long>(std::floor(duration_ / sample_interval + 1e-9));
    char buf[64];
    for (long long i = 0; i <= n; ++i) {
        const double t = std::min(static_cast<double>(i) * sample_interval, duration_);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, value(t));
        os << buf;
    }
}

Waveform constant(double v, double t_end) {
    return Waveform({Segment{ConstantLevel{v}, t_end}});
}

Waveform sinusoid_sum(double f1, double f2, double amplitude, double dc, double t_end) {
    return Waveform({Segment{SinusoidSum{f1, f2, amplitude, dc}, t_end}});
}

double beat_period(double f1, double f2) {
    const double r1 = std::round(f1);
    const double r2 = std::round(f2);
    if (!(r1 >= 1.0) || !(r2 >= 1.0) || std::abs(f1 - r1) > 1e-9 * f1 || std::abs(f2 - r2) > 1e-9 * f2 ||
        r1 > 9e15 || r2 > 9e15) {
        throw DomainError("beat_period: frequencies must be whole hertz");
    }
    return 1.0 / static_cast<double>(std::gcd(static_cast<long long>(r1), static_cast<long long>(r2)));
}

const char* envelope_level_name(EnvelopeLevel level) {
    switch (level) {
        case EnvelopeLevel::high: return "high";
        case EnvelopeLevel::moderate: return "moderate";
        case EnvelopeLevel::low: return "low";
    }
    return "?";
}

std::vector<EnvelopeRegion> envelope_regions(const SinusoidSum& s) {
    const double beat = beat_period(s.f1, s.f2);
    const double carrier = 2.0 / (s.f1 + s.f2);
    const double windows = beat / carrier;
    const auto n = static_cast<std::size_t>(std::llround(windows));
    if (n == 0 || std::abs(windows - static_cast<double>(n)) > 1e-9 * windows) {
        throw DomainError("envelope_regions: beat period is not a whole number of carrier periods");
    }
    const Segment seg{s, beat};
    const double sign = s.dc < 0.0 ? -1.0 : 1.0;
    constexpr int kSamples = 4000;
    std::vector<EnvelopeRegion> out(n);
    for (std::size_t w = 0; w < n; ++w) {
        auto& r = out[w];
        r.start = static_cast<double>(w) * carrier;
        r.end = static_cast<double>(w + 1) * carrier;
        for (int k = 0; k <= kSamples; ++k) {
            const double v = sign * evaluate(seg, r.start + carrier * k / kSamples);
            r.peak_magnitude = std::max(r.peak_magnitude, v);
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out[a].peak_magnitude > out[b].peak_magnitude;
    });
    for (std::size_t rank = 0; rank < n; ++rank) {
        out[order[rank]].level = rank * 3 < n       ? EnvelopeLevel::high
                                 : rank * 3 < 2 * n ? EnvelopeLevel::moderate
                                                    : EnvelopeLevel::low;
    }
    return out;
}

std::vector<int> count_per_region(std::span<const EnvelopeRegion> regions,
                                  std::span<const double> spike_times, double offset) {
    std::vector<int> counts(regions.size(), 0);
    for (double t : spike_times) {
        for (std::size_t i = 0; i < regions.size(); ++i) {
            if (t >= regions[i].start + offset && t < regions[i].end + offset) ++counts[i];
        }
    }
    return counts;
}

Waveform pulse_program(std::span<const PulseLevel> levels, double reset_gap, int cycles) {
    if (!(reset_gap >= 0.0) || !std::isfinite(reset_gap)) {
        throw DomainError("pulse_program: reset gap must be >= 0");
    }
    if (cycles < 0) throw DomainError("pulse_program: cycles must be >= 0");
    std::vector<Segment> segs;
    for (int c = 0; c < cycles; ++c) {
        for (const auto& level : levels) {
            if (level.repeat < 0) throw DomainError("pulse_program: repeat must be >= 0");
            for (int r = 0; r < level.repeat; ++r) {
                if (!segs.empty() && reset_gap > 0.0) {
                    segs.push_back({ConstantLevel{0.0}, reset_gap});
                }
                segs.push_back({ConstantLevel{level.voltage}, level.duration});
            }
        }
    }
    return Waveform(std::move(segs));
}

}  // namespace pmo
