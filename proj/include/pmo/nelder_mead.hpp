#pragma once

// Bounded Nelder-Mead simplex search with quasi-random multi-start.

#include <functional>
#include <span>
#include <vector>

namespace pmo {

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct SimplexOptions {
    double initial_step = 0.1;       // fraction of each box edge
    double tolerance = 1e-4;         // relative simplex diameter
    double f_tolerance = 0.0;        // optional spread-of-values stop (0 = off)
    int max_iterations = 2000;
    int starts = 5;                  // multi-start count (first start = supplied x0)
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    std::vector<double> best_history;  // best value after every iteration of the winning start
};

using Objective = std::function<double(std::span<const double>)>;

/// Single Nelder-Mead descent from x0; vertices are projected onto the box.
[[nodiscard]] SimplexResult nelder_mead(const Objective& f, std::span<const double> x0,
                                        const Bounds& bounds, const SimplexOptions& options = {});

/// Runs nelder_mead from x0 and from options.starts - 1 Halton points inside
/// the box; returns the best result.
[[nodiscard]] SimplexResult multi_start_nelder_mead(const Objective& f, std::span<const double> x0,
                                                    const Bounds& bounds,
                                                    const SimplexOptions& options = {});

/// i-th point (i >= 1) of the Halton sequence in [0,1)^dim.
[[nodiscard]] std::vector<double> halton_point(int index, std::size_t dim);

}  // namespace pmo
