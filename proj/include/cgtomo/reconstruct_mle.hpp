#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cgtomo/coarse_grain.hpp"
#include "cgtomo/gaussian.hpp"

namespace cgtomo {

/// Ordered homodyne phases in [0, pi).
struct AngleSet {
    std::vector<double> angles;

    static AngleSet uniform(int count);
    void validate() const;
};

struct MleConfig {
    int angle_count = 60;   // single-mode phases over [0, pi)
    int pair_grid = 12;     // two-mode phase pairs: pair_grid^2 over [0, pi)^2
    int restarts = 8;
    double tol = 1e-8;
    int max_iters = 2000;
    std::uint64_t seed = 12345;
    // Exploration variant: score candidates by their own coarse-grained
    // (piecewise-flat) distribution instead of the smooth marginal. This
    // deconvolves the binning; not used by the figure pipelines.
    bool coarse_grained_candidate = false;
};

/// Log-likelihood sum over angles of the per-bin integral of the data
/// against the candidate's smooth marginal; the quadratic log-density
/// integrates in closed form on each bin. Angle weight is pi/data_size.
double log_likelihood1(const SingleModeParams& candidate,
                       std::span<const std::pair<double, BinnedDistribution>> data);

/// Relative entropy D(P_D || P_E) >= 0 of binned data against a smooth
/// Gaussian marginal.
double relative_entropy(const BinnedDistribution& pd, const GaussianMarginal& pe);

/// Same against an arbitrary density, by per-bin quadrature. Serves as the
/// oracle for the closed form and lets P_E be a piecewise-flat mixture.
double relative_entropy_density(const BinnedDistribution& pd,
                                const std::function<double(double)>& pe_density);

struct MleResult1 {
    SingleModeParams params;
    double log_likelihood = 0.0;
    bool converged = false;
};

struct MleResult2 {
    TwoModeParams params;
    double log_likelihood = 0.0;
    bool converged = false;
};

/// Maximum-likelihood estimate from the full angle set of coarse-grained
/// marginals of `input`. Derivative-free simplex search in unconstrained
/// coordinates (softplus maps keep nbar, r >= 0); best of cfg.restarts
/// multistarts seeded at the truth, the direct-reconstruction estimate,
/// truth perturbations and random draws.
MleResult1 mle_estimate_single(const SingleModeParams& input, double sigma,
                               const MleConfig& cfg = {});

/// Two-mode analogue over a pair_grid x pair_grid set of joint phases.
MleResult2 mle_estimate_two(const TwoModeParams& input, double sigma,
                            const MleConfig& cfg = {});

}  // namespace cgtomo
