#include "pmo/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pmo/errors.hpp"

namespace pmo {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

void project(std::vector<double>& x, const Bounds& b) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], b.lower[i], b.upper[i]);
}

// Per-coordinate spread relative to max(|x|, 1); in log coordinates this is
// the relative change of the underlying parameter.
double relative_diameter(const std::vector<Vertex>& simplex) {
    double diameter = 0.0;
    for (std::size_t j = 0; j < simplex[0].x.size(); ++j) {
        double lo = simplex[0].x[j];
        double hi = lo;
        for (const auto& v : simplex) {
            lo = std::min(lo, v.x[j]);
            hi = std::max(hi, v.x[j]);
        }
        const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
        diameter = std::max(diameter, (hi - lo) / scale);
    }
    return diameter;
}

void check_bounds(std::span<const double> x0, const Bounds& b) {
    if (b.lower.size() != x0.size() || b.upper.size() != x0.size()) {
        throw DomainError("nelder_mead: bounds dimension mismatch");
    }
    for (std::size_t i = 0; i < x0.size(); ++i) {
        if (!(b.lower[i] <= b.upper[i])) throw DomainError("nelder_mead: lower bound above upper");
    }
}

}  // namespace

std::vector<double> halton_point(int index, std::size_t dim) {
    static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dim > std::size(kPrimes)) throw DomainError("halton_point: dimension too large");
    std::vector<double> out(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const int base = kPrimes[d];
        double f = 1.0;
        double r = 0.0;
        for (int i = index; i > 0; i /= base) {
            f /= base;
            r += f * (i % base);
        }
        out[d] = r;
    }
    return out;
}

SimplexResult nelder_mead(const Objective& f, std::span<const double> x0, const Bounds& bounds,
                          const SimplexOptions& options) {
    check_bounds(x0, bounds);
    const std::size_t n = x0.size();
    SimplexResult result;
    if (n == 0) {
        result.value = f(x0);
        result.evaluations = 1;
        return result;
    }

    auto eval = [&](std::vector<double> x) {
        project(x, bounds);
        ++result.evaluations;
        const double value = f(x);
        return Vertex{std::move(x), std::isfinite(value) ? value : std::numeric_limits<double>::infinity()};
    };

    std::vector<Vertex> simplex;
    simplex.push_back(eval(std::vector<double>(x0.begin(), x0.end())));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(x0.begin(), x0.end());
        const double step = options.initial_step * (bounds.upper[i] - bounds.lower[i]);
        x[i] += (x[i] + step <= bounds.upper[i]) ? step : -step;
        simplex.push_back(eval(std::move(x)));
    }

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::sort(simplex.begin(), simplex.end(), by_value);

    while (result.iterations < options.max_iterations) {
        if (relative_diameter(simplex) < options.tolerance) break;
        if (options.f_tolerance > 0.0 &&
            std::abs(simplex.back().f - simplex.front().f) < options.f_tolerance) {
            break;
        }
        ++result.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[k].x[j] / static_cast<double>(n);
        }
        auto along = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) {
                x[j] = centroid[j] + coeff * (simplex.back().x[j] - centroid[j]);
            }
            return x;
        };

        Vertex reflected = eval(along(-1.0));
        if (reflected.f < simplex.front().f) {
            Vertex expanded = eval(along(-2.0));
            simplex.back() = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
        } else if (reflected.f < simplex[n - 1].f) {
            simplex.back() = std::move(reflected);
        } else {
            const bool outside = reflected.f < simplex.back().f;
            Vertex contracted = eval(along(outside ? -0.5 : 0.5));
            if (contracted.f < std::min(reflected.f, simplex.back().f)) {
                simplex.back() = std::move(contracted);
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    std::vector<double> x(n);
                    for (std::size_t j = 0; j < n; ++j) {
                        x[j] = simplex[0].x[j] + 0.5 * (simplex[k].x[j] - simplex[0].x[j]);
                    }
                    simplex[k] = eval(std::move(x));
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_value);
        result.best_history.push_back(simplex.front().f);
    }
    result.x = simplex.front().x;
    result.value = simplex.front().f;
    return result;
}

SimplexResult multi_start_nelder_mead(const Objective& f, std::span<const double> x0,
                                      const Bounds& bounds, const SimplexOptions& options) {
    check_bounds(x0, bounds);
    SimplexResult best = nelder_mead(f, x0, bounds, options);
    int evaluations = best.evaluations;
    for (int s = 1; s < options.starts; ++s) {
        const auto u = halton_point(s, x0.size());
        std::vector<double> start(x0.size());
        for (std::size_t i = 0; i < start.size(); ++i) {
            start[i] = bounds.lower[i] + u[i] * (bounds.upper[i] - bounds.lower[i]);
        }
        SimplexResult r = nelder_mead(f, start, bounds, options);
        evaluations += r.evaluations;
        if (r.value < best.value) best = std::move(r);
    }
    best.evaluations = evaluations;
    return best;
}

}  // namespace pmo
