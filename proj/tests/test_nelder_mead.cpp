#include <cmath>

#include "doctest.h"
#include "pmo/nelder_mead.hpp"

using namespace pmo;

TEST_CASE("bounded Rosenbrock") {
    auto f = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const std::vector<double> x0{-1.2, 1.0};
    const Bounds b{{-2.0, -2.0}, {2.0, 2.0}};
    SimplexOptions o;
    o.tolerance = 1e-8;
    o.max_iterations = 5000;
    const auto r = nelder_mead(f, x0, b, o);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
    for (std::size_t k = 1; k < r.best_history.size(); ++k) {
        CHECK(r.best_history[k] <= r.best_history[k - 1]);
    }
}

TEST_CASE("box constraint is respected") {
    auto f = [](std::span<const double> x) { return (x[0] - 5.0) * (x[0] - 5.0); };
    const std::vector<double> x0{0.0};
    const auto r = nelder_mead(f, x0, {{-1.0}, {1.0}});
    CHECK(r.x[0] <= 1.0);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("multi-start escapes a local minimum") {
    // Double well with the deeper minimum at x = +2.
    auto f = [](std::span<const double> x) {
        return std::pow(x[0] * x[0] - 4.0, 2) - 2.0 * x[0];
    };
    const std::vector<double> x0{-2.0};
    SimplexOptions o;
    o.starts = 5;
    const auto r = multi_start_nelder_mead(f, x0, {{-3.0}, {3.0}}, o);
    CHECK(r.x[0] > 1.5);
}

TEST_CASE("Halton points") {
    const auto p1 = halton_point(1, 3);
    CHECK(p1[0] == doctest::Approx(0.5));
    CHECK(p1[1] == doctest::Approx(1.0 / 3.0));
    CHECK(p1[2] == doctest::Approx(0.2));
    for (int i = 1; i < 50; ++i) {
        for (double u : halton_point(i, 4)) {
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
    }
}
