#include <cmath>
#include <random>

#include "doctest.h"
#include "pmo/circuit_solver.hpp"
#include "pmo/errors.hpp"

using namespace pmo;

namespace {

double residual(double v_in, double v, double t, const SeriesNetwork& n, const DeviceParams& p) {
    return v_in - total_current(v, t, p) * n.series_resistance() - v;
}

/// Minimal-|residual| device voltage: 1 mV sweep, then 10 uV around the best point.
double scan_device_voltage(double v_in, double t, const SeriesNetwork& n, const DeviceParams& p) {
    double best = 0.0, best_r = INFINITY;
    for (double v = 0.0; v <= v_in + 1e-12; v += 1e-3) {
        const double r = std::abs(residual(v_in, v, t, n, p));
        if (r < best_r) best_r = r, best = v;
    }
    const double lo = std::max(0.0, best - 2e-3), hi = std::min(v_in, best + 2e-3);
    for (double v = lo; v <= hi + 1e-12; v += 1e-5) {
        const double r = std::abs(residual(v_in, v, t, n, p));
        if (r < best_r) best_r = r, best = v;
    }
    return best;
}

}  // namespace

TEST_CASE("trivial operating points") {
    const DeviceParams p;
    SeriesNetwork n;
    const auto zero = solve_operating_point(0.0, 300.0, n, p);
    CHECK(zero.v_device == 0.0);
    CHECK(zero.current == 0.0);
    CHECK(zero.v_a == 0.0);
    n.switch_closed = false;
    const auto open = solve_operating_point(2.0, 300.0, n, p);
    CHECK(open.v_device == 0.0);
    CHECK(open.current == 0.0);
    CHECK(open.v_a == 0.0);
}

TEST_CASE("vanishing series resistance leaves the whole source on the device") {
    const DeviceParams p;
    SeriesNetwork n{1e-12, 0.0, true, true};
    CHECK(solve_operating_point(1.3, 300.0, n, p).v_device == doctest::Approx(1.3).epsilon(1e-9));
}

TEST_CASE("reference point matches a 10 uV scan") {
    const DeviceParams p;
    const SeriesNetwork n{50.0, 0.0, true, true};
    const auto op = solve_operating_point(1.6, 300.0, n, p);
    CHECK(std::abs(op.v_device - scan_device_voltage(1.6, 300.0, n, p)) <= 1e-5);
    CHECK(std::abs(residual(1.6, op.v_device, 300.0, n, p)) <= 1e-9);
    CHECK(op.v_a == doctest::Approx(op.current * 50.0));
}

TEST_CASE("voltage partition and short-circuit consistency") {
    const DeviceParams p;
    double prev = 2.0;
    for (double r_c : {0.0, 10.0, 50.0, 200.0, 1000.0}) {
        const SeriesNetwork n{50.0, r_c, false, true};
        const auto op = solve_operating_point(2.0, 420.0, n, p);
        CHECK(op.v_device >= 0.0);
        CHECK(op.v_device <= 2.0);
        if (r_c > 0.0) CHECK(op.v_device < prev);
        prev = op.v_device;
    }
    const auto shorted = solve_operating_point(1.7, 380.0, {50.0, 120.0, true, true}, p);
    const auto zero_rc = solve_operating_point(1.7, 380.0, {50.0, 0.0, false, true}, p);
    CHECK(shorted.v_device == zero_rc.v_device);
    CHECK(shorted.current == zero_rc.current);
}

TEST_CASE("random operating points meet the residual bound and the scan") {
    const DeviceParams p;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> v_in(0.0, 3.0), temp(300.0, 700.0), r_s(1.0, 200.0),
        r_c(0.0, 300.0);
    for (int k = 0; k < 200; ++k) {
        const SeriesNetwork n{r_s(rng), r_c(rng), k % 2 == 0, true};
        const double v = v_in(rng), t = temp(rng);
        const auto op = solve_operating_point(v, t, n, p);
        CHECK(std::abs(residual(v, op.v_device, t, n, p)) <= operating_point_tolerance(v));
        if (k % 10 == 0) CHECK(std::abs(op.v_device - scan_device_voltage(v, t, n, p)) <= 1e-5);
    }
}

TEST_CASE("network validation") {
    SeriesNetwork n{0.0, 0.0, true, true};
    CHECK_THROWS_AS(n.validate(), DomainError);
    n = {50.0, -1.0, false, true};
    CHECK_THROWS_AS(n.validate(), DomainError);
}
