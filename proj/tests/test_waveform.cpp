#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pmo/errors.hpp"
#include "pmo/waveform.hpp"

using namespace pmo;

TEST_CASE("constant level") {
    const auto w = constant(-1.6, 5e-6);
    CHECK(w.value(0.0) == -1.6);
    CHECK(w.value(3.3e-6) == -1.6);
    CHECK(w.value(5e-6) == -1.6);
    CHECK(w.duration() == 5e-6);
    CHECK_THROWS_AS((void)w.value(6e-6), DomainError);
}

TEST_CASE("two-tone sum") {
    const auto w = sinusoid_sum(250e3, 350e3, -0.7, -0.7, 40e-6);
    CHECK(w.value(0.0) == -0.7);
    CHECK(w.value(1.3e-6) == w.value(1.3e-6));
    const double s = 2.7e-6;
    const double expect = -0.7 - 0.7 * std::sin(2 * M_PI * 250e3 * s) - 0.7 * std::sin(2 * M_PI * 350e3 * s);
    CHECK(w.value(s) == doctest::Approx(expect).epsilon(1e-12));
    double lo = 0.0, hi = -10.0;
    for (int k = 0; k <= 200000; ++k) {
        const double v = w.value(20e-6 * k / 200000);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Bounded by dc +- 2|amplitude|; the two sines never peak together exactly.
    CHECK(lo >= -2.1 - 1e-12);
    CHECK(hi <= 0.7 + 1e-12);
    CHECK(lo < -2.0);
    CHECK(hi > 0.6);
}

TEST_CASE("beat period") {
    CHECK(beat_period(250e3, 350e3) == doctest::Approx(20e-6).epsilon(1e-15));
    CHECK(beat_period(1000, 1000) == doctest::Approx(1e-3));
    CHECK_THROWS_AS((void)beat_period(250e3 + 0.5, 350e3), DomainError);
    const auto w = sinusoid_sum(250e3, 350e3, -0.7, -0.7, 60e-6);
    for (double s : {0.3e-6, 4.1e-6, 13.7e-6}) {
        CHECK(w.value(s) == doctest::Approx(w.value(s + 20e-6)).epsilon(1e-9));
    }
}

TEST_CASE("envelope regions over one beat") {
    const auto regions = envelope_regions({250e3, 350e3, -0.7, -0.7});
    REQUIRE(regions.size() == 6);
    int high = 0, moderate = 0, low = 0;
    for (const auto& r : regions) {
        CHECK(r.end - r.start == doctest::Approx(20e-6 / 6));
        high += r.level == EnvelopeLevel::high;
        moderate += r.level == EnvelopeLevel::moderate;
        low += r.level == EnvelopeLevel::low;
    }
    CHECK(high == 2);
    CHECK(moderate == 2);
    CHECK(low == 2);
    CHECK(regions[0].level == EnvelopeLevel::high);
    CHECK(regions[1].level == EnvelopeLevel::low);
    const std::vector<double> spikes{1e-6, 2e-6, 7e-6, 21e-6};
    const auto c0 = count_per_region(regions, spikes);
    CHECK(c0 == std::vector<int>{2, 0, 1, 0, 0, 0});
    const auto c1 = count_per_region(regions, spikes, 20e-6);
    CHECK(c1 == std::vector<int>{1, 0, 0, 0, 0, 0});
}

TEST_CASE("pulse programs") {
    const std::vector<PulseLevel> ch{{-2.4, 200e-9, 3}, {-1.7, 300e-9, 1}};
    const auto w = pulse_program(ch, 100e-9, 2);
    // 8 pulses and 7 gaps.
    CHECK(w.duration() == doctest::Approx(2 * (3 * 200e-9 + 300e-9) + 7 * 100e-9));
    CHECK(w.value(100e-9) == -2.4);
    CHECK(w.value(250e-9) == 0.0);
    CHECK(w.value(3 * 300e-9 + 150e-9) == -1.7);
    double sum = 0.0;
    for (const auto& s : w.segments()) sum += s.duration;
    CHECK(sum == doctest::Approx(w.duration()));
    const auto empty = pulse_program({}, 100e-9, 3);
    CHECK(empty.empty());
    CHECK(empty.duration() == 0.0);
    const std::vector<PulseLevel> ib{{-2.4, 200e-9, 3}, {-1.9, 200e-9, 5}};
    CHECK(pulse_program(ib).value(7 * 300e-9 + 50e-9) == -1.9);
}

TEST_CASE("append and breakpoints") {
    auto w = constant(-1.0, 1e-6);
    w.append(constant(-2.0, 2e-6));
    CHECK(w.duration() == doctest::Approx(3e-6));
    CHECK(w.value(2e-6) == -2.0);
    CHECK(w.next_breakpoint(0.5e-6) == doctest::Approx(1e-6));
    CHECK(w.next_breakpoint(1.5e-6) == doctest::Approx(3e-6));
}

TEST_CASE("stimulus CSV export") {
    std::ostringstream os;
    constant(-1.6, 1e-6).write_csv(os, 0.25e-6);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "time_s,v_in_v");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}
