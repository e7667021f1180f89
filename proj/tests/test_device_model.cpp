#include <cmath>
#include <limits>

#include "doctest.h"
#include "pmo/device_model.hpp"
#include "pmo/errors.hpp"

using namespace pmo;

namespace {

// Hand evaluation of both conduction terms at 1.6 V, 300 K for the reference
// stack (30-digit arithmetic, frozen).
constexpr double kOhmic16 = 2.86548544294310337e-4;
constexpr double kSclc16 = 1.10212764628303341e-3;

/// First temperature on a 0.1 K grid where loss catches up with heating,
/// searched below the temperature at which the current reaches compliance.
std::optional<double> scan_fixed_point(double v, const DeviceParams& p) {
    if (v == 0.0) return p.t_amb;
    for (int k = 1; k <= 17000; ++k) {
        const double t = p.t_amb + 0.1 * k;
        const double i = unclamped_current(v, t, p);
        if (i >= p.i_compliance) return std::nullopt;
        if (i * v - (t - p.t_amb) / p.r_th <= 0.0) return t;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("conduction terms match hand evaluation") {
    const DeviceParams p;
    CHECK(ohmic_current(1.6, 300.0, p) == doctest::Approx(kOhmic16).epsilon(1e-12));
    CHECK(sclc_current(1.6, 300.0, p) == doctest::Approx(kSclc16).epsilon(1e-12));
    CHECK(total_current(1.6, 300.0, p) == doctest::Approx(kOhmic16 + kSclc16).epsilon(1e-12));
}

TEST_CASE("conduction limits and scaling") {
    const DeviceParams p;
    CHECK(ohmic_current(0.0, 300.0, p) == 0.0);
    CHECK(sclc_current(0.0, 300.0, p) == 0.0);
    CHECK(total_current(0.0, 800.0, p) == 0.0);
    CHECK(ohmic_current(1.6, 600.0, p) > ohmic_current(1.6, 300.0, p));
    CHECK(sclc_current(3.2, 350.0, p) == doctest::Approx(4.0 * sclc_current(1.6, 350.0, p)).epsilon(1e-14));
    CHECK(total_current(5.0, 900.0, p) == p.i_compliance);
    CHECK(unclamped_current(5.0, 900.0, p) > p.i_compliance);
}

TEST_CASE("unclamped current increases in voltage and temperature") {
    const DeviceParams p;
    double prev = 0.0;
    for (double v = 0.05; v <= 3.0; v += 0.05) {
        const double i = unclamped_current(v, 320.0, p);
        CHECK(i > prev);
        prev = i;
    }
    prev = 0.0;
    for (double t = 300.0; t <= 900.0; t += 10.0) {
        const double i = unclamped_current(1.2, t, p);
        CHECK(i > prev);
        prev = i;
    }
}

TEST_CASE("invalid conduction inputs are rejected") {
    const DeviceParams p;
    CHECK_THROWS_AS((void)ohmic_current(-1.0, 300.0, p), DomainError);
    CHECK_THROWS_AS((void)sclc_current(1.0, 0.0, p), DomainError);
    CHECK_THROWS_AS((void)total_current(std::numeric_limits<double>::quiet_NaN(), 300.0, p), DomainError);
    DeviceParams bad;
    bad.r_th = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("lab unit conversion reproduces the SI defaults") {
    const DeviceParams lab =
        DeviceParams::from_lab_units(17.5, 0.3151, 30.0, 8.16e19, 0.06, 3.15e21, 65.0, 100.0, 300.0, 3e4, 3.25, 10.0);
    const DeviceParams si;
    CHECK(lab.mu == doctest::Approx(si.mu));
    CHECK(lab.n_v == doctest::Approx(si.n_v));
    CHECK(lab.n_t == doctest::Approx(si.n_t));
    CHECK(lab.length == doctest::Approx(si.length));
    CHECK(lab.area == doctest::Approx(si.area));
    CHECK(lab.c_th == doctest::Approx(si.c_th));
    CHECK(lab.i_compliance == doctest::Approx(si.i_compliance));
}

TEST_CASE("heat balance derivative") {
    const DeviceParams p;
    CHECK(temperature_derivative(300.0, 0.0, p) == 0.0);
    CHECK(temperature_derivative(400.0, 0.0, p) == doctest::Approx(-1.0256410256410256e9).epsilon(1e-12));
    CHECK(temperature_derivative(350.0, 50.0 / p.r_th, p) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("cooling follows the exponential") {
    const DeviceParams p;
    DeviceState s{400.0, 0.0, 0.0};
    s = step_state(s, 0.0, 97.5e-9, p);
    CHECK(s.temperature == doctest::Approx(336.787944117144232).epsilon(1e-6));
    const DeviceState amb = step_state(DeviceState::ambient(p), 0.0, 1e-6, p);
    CHECK(amb.temperature == 300.0);
}

TEST_CASE("supra-threshold bias heats monotonically up to compliance") {
    const DeviceParams p;
    DeviceState s = DeviceState::ambient(p);
    double prev_t = s.temperature, prev_i = 0.0;
    bool reached = false;
    for (int k = 0; k < 400 && !reached; ++k) {
        s = step_state(s, 1.6, 1e-9, p);
        CHECK(s.temperature > prev_t);
        CHECK(s.current >= prev_i);
        prev_t = s.temperature;
        prev_i = s.current;
        reached = s.current >= p.i_compliance;
    }
    CHECK(reached);
}

TEST_CASE("temperature never drops below ambient") {
    const DeviceParams p;
    DeviceState s = DeviceState::ambient(p);
    for (double v : {0.0, 0.3, 0.7, 0.0, 0.9, 0.0}) {
        s = step_state(s, v, 200e-9, p);
        CHECK(s.temperature >= p.t_amb);
    }
}

TEST_CASE("energy balance over a heating and cooling run") {
    const DeviceParams p;
    DeviceState s = DeviceState::ambient(p);
    const double dt = 0.1e-9;
    double heat_in = 0.0, heat_out = 0.0;
    const double t_start = s.temperature;
    auto power = [&](const DeviceState& st, double v) { return total_current(v, st.temperature, p) * v; };
    for (int k = 0; k < 6000; ++k) {
        const double v = k < 3000 ? 0.9 : 0.0;
        const DeviceState next = step_state(s, v, dt, p);
        heat_in += 0.5 * dt * (power(s, v) + power(next, v));
        heat_out += 0.5 * dt * ((s.temperature - p.t_amb) + (next.temperature - p.t_amb)) / p.r_th;
        s = next;
    }
    const double stored = p.c_th * (s.temperature - t_start);
    CHECK(std::abs(heat_in - heat_out - stored) <= 0.005 * heat_in);
}

TEST_CASE("steady state agrees with a 0.1 K scan") {
    const DeviceParams p;
    CHECK(steady_state_temperature(0.0, p).value() == doctest::Approx(300.0));
    for (double v : {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.92}) {
        const auto model = steady_state_temperature(v, p);
        const auto scan = scan_fixed_point(v, p);
        REQUIRE(model.has_value());
        REQUIRE(scan.has_value());
        CHECK(std::abs(*model - *scan) <= 0.1);
    }
    const double v_small = 0.01;
    const double rise = total_current(v_small, 300.0, p) * v_small * p.r_th;
    CHECK(rise < 1.0);
    CHECK(steady_state_temperature(v_small, p).value() == doctest::Approx(300.0 + rise).epsilon(1e-5));
}

TEST_CASE("runaway threshold agrees with a scan over voltage") {
    const DeviceParams p;
    double v_scan = 0.0;
    for (double v = 0.85; v <= 1.1; v += 0.0005) {
        if (!scan_fixed_point(v, p)) {
            v_scan = v;
            break;
        }
    }
    REQUIRE(v_scan > 0.0);
    CHECK(std::abs(runaway_threshold(p) - v_scan) <= 0.001);
    CHECK_FALSE(steady_state_temperature(runaway_threshold(p) + 0.01, p).has_value());
}

TEST_CASE("spike time") {
    const DeviceParams p;
    CHECK_FALSE(spike_time(0.5, p).has_value());
    double prev = 1.0;
    for (double v = 1.0; v <= 2.5; v += 0.1) {
        const auto t = spike_time(v, p);
        REQUIRE(t.has_value());
        CHECK(*t < prev);
        prev = *t;
    }
    // Warm start shortens the time.
    CHECK(*spike_time(1.6, p, 350.0) < *spike_time(1.6, p));
}

TEST_CASE("halving the temperature step barely moves the spike time") {
    const DeviceParams p;
    IntegratorSettings fine;
    fine.max_temperature_step = 0.25;
    for (double v : {1.2, 1.6, 2.2}) {
        const double a = *spike_time(v, p, p.t_amb);
        const double b = *spike_time(v, p, p.t_amb, fine);
        CHECK(std::abs(a - b) < 1e-3 * a);
    }
}
