#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pmo/calibration.hpp"
#include "pmo/errors.hpp"
#include "pmo/scaling.hpp"

using namespace pmo;

TEST_CASE("capacitor helper and RC time") {
    const double c = capacitance(3.9, 100e-12, 2e-9);
    CHECK(c == doctest::Approx(8.8541878128e-12 * 3.9 * 100e-12 / 2e-9).epsilon(1e-14));
    CHECK(c == doctest::Approx(1.7e-12).epsilon(0.03));
    ScalingInputs in;
    in.j_d = 10e-3 / 100e-12;
    CHECK(tau_rc(in) == doctest::Approx(1.7266e-10).epsilon(1e-3));
}

TEST_CASE("area cancels in both timescales") {
    ScalingInputs in;
    CHECK(tau_rc_explicit(in, 1e-10) == doctest::Approx(tau_rc(in)).epsilon(1e-12));
    CHECK(tau_rc_explicit(in, 2e-10) == doctest::Approx(tau_rc_explicit(in, 1e-10)).epsilon(1e-12));
    CHECK(tau_th_explicit(in, 1e-10) == doctest::Approx(tau_th(in)).epsilon(1e-12));
    CHECK(tau_th_explicit(in, 7e-12) == doctest::Approx(tau_th_explicit(in, 1e-10)).epsilon(1e-12));
}

TEST_CASE("timescale ratio depends only on the combined inputs") {
    ScalingInputs in;
    in.v = 1.3;
    in.delta_t = 40.0;
    const double expect = in.c_v * in.delta_t * in.length * in.d / (8.8541878128e-12 * in.eps_r * in.v * in.v);
    CHECK(tau_th(in) / tau_rc(in) == doctest::Approx(expect).epsilon(1e-12));
    ScalingInputs other = in;
    other.j_d *= 3.0;
    CHECK(tau_th(other) / tau_rc(other) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("volumetric heat capacity of the reference stack") {
    CHECK(volumetric_heat_capacity(DeviceParams{}) == doctest::Approx(5e5).epsilon(1e-12));
}

TEST_CASE("at runaway onset the electrothermal time is r_th c_th") {
    // At a fixed point V I = dT / r_th, so c_v L dT / (V J_D) = r_th c_th.
    const DeviceParams p;
    CHECK(tau_th(runaway_operating_point(p)) == doctest::Approx(p.thermal_tau()).epsilon(1e-6));
    const DeviceParams cal = calibrated_neuron().device_input;
    const ScalingInputs m = runaway_operating_point(cal);
    CHECK(tau_th(m) >= 100e-9);
    CHECK(tau_th(m) <= 1e-6);
}

TEST_CASE("area estimate") {
    CHECK(estimate_area(119) == 11900.0);
    CHECK(estimate_area(0) == 0.0);
    CHECK_THROWS_AS((void)estimate_area(-1), DomainError);
    CHECK(total_transistors(neuron_transistor_budget()) == 119);
}

TEST_CASE("scaling input validation and report") {
    ScalingInputs bad;
    bad.d = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    const auto r = build_scaling_report(calibrated_neuron().device_input);
    std::ostringstream text, csv;
    write_scaling_text(text, r);
    write_scaling_csv(csv, r);
    CHECK(text.str().find("area_f2: 11900") != std::string::npos);
    CHECK(csv.str().find(",119,11.9,") != std::string::npos);
}
