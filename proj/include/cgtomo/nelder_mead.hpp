#pragma once

#include <functional>
#include <vector>

namespace cgtomo {

struct NelderMeadOptions {
    double tol = 1e-8;     // convergence: simplex diameter below tol
    int max_iters = 2000;
    double step = 0.25;    // initial simplex edge length
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const NelderMeadOptions& opts = {});

}  // namespace cgtomo
