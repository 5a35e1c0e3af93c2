#pragma once

#include <functional>
#include <span>
#include <vector>

namespace carima::optim {

// Minimisers for the small, smooth objectives met in likelihood fitting.
// Objectives may return +inf to reject a point.

using Objective = std::function<double(std::span<const double>)>;

struct Result {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

Result nelder_mead(const Objective& f, std::vector<double> x0, double step, int max_evals,
                   double ftol);

/// BFGS with central-difference gradients and a backtracking line search.
Result bfgs(const Objective& f, std::vector<double> x0, int max_iter, double gtol);

}  // namespace carima::optim
