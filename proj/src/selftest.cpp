#include <cmath>
#include <cstdio>
#include <random>

#include "cgtomo/metrics.hpp"
#include "cgtomo/reconstruct_direct.hpp"
#include "cgtomo/reconstruct_mle.hpp"
#include "cgtomo/sweep.hpp"

namespace cgtomo {

namespace {

// Bin masses by composite Simpson integration of the Gaussian pdf; shares
// nothing with the erf-based path it validates.
double simpson_bin_mass(double lo, double hi, double mean, double var) {
    const int n = 64;  // even
    const double h = (hi - lo) / n;
    auto pdf = [&](double x) {
        return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * kPi * var);
    };
    double s = pdf(lo) + pdf(hi);
    for (int i = 1; i < n; ++i) s += pdf(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Variance of the piecewise-flat density on a dense grid (midpoint rule).
double dense_grid_variance(const BinnedDistribution& b) {
    const int points = 1000000;
    const double lo = (b.m_min() - 0.5) * b.sigma();
    const double hi = (b.m_max() + 0.5) * b.sigma();
    const double h = (hi - lo) / points;
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (i + 0.5) * h;
        const double p = coarse_pdf_eval(b, x) * h;
        mass += p;
        m1 += x * p;
        m2 += x * x * p;
    }
    return m2 - m1 * m1 * 2.0 + m1 * m1;  // m2 - m1^2 with mass ~= 1
}

struct Reporter {
    int failures = 0;

    void check(const char* name, bool ok, double detail) {
        std::printf("[%s] %s (max dev %.3e)\n", ok ? "PASS" : "FAIL", name, detail);
        if (!ok) ++failures;
    }
};

}  // namespace

int selftest() {
    Reporter rep;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    {
        // erf closed form vs numeric binning.
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double var = 0.05 + 4.95 * u01(rng);
            const double sigma = 0.05 + 1.95 * u01(rng);
            const BinnedDistribution bins = bin_gaussian(GaussianMarginal{0.0, var}, sigma);
            for (int m = bins.m_min(); m <= bins.m_max(); ++m) {
                const double oracle =
                    simpson_bin_mass((m - 0.5) * sigma, (m + 0.5) * sigma, 0.0, var);
                worst = std::max(worst, std::abs(oracle - bins.mass(m)));
            }
        }
        rep.check("bin_gaussian matches Simpson bin masses", worst < 1e-12, worst);
    }
    {
        // Variance decomposition vs dense-grid oracle.
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const double var = 0.05 + 4.95 * u01(rng);
            const double sigma = 0.05 + 1.95 * u01(rng);
            const BinnedDistribution bins = bin_gaussian(GaussianMarginal{0.0, var}, sigma);
            worst = std::max(worst,
                             std::abs(coarse_variance(bins) - dense_grid_variance(bins)));
        }
        rep.check("coarse_variance matches dense-grid oracle", worst < 1e-8, worst);
    }
    {
        // Generic partial-transpose spectrum vs the TMST closed form.
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const TwoModeParams p(3.0 * u01(rng), 3.0 * u01(rng), 2.0 * u01(rng),
                                  2.0 * kPi * u01(rng));
            const PtSpectrum generic = symplectic_eigs_pt(cov_from_params2(p));
            const PtSpectrum closed = symplectic_eigs_pt_tmst(p);
            worst = std::max({worst, std::abs(generic.nu_minus - closed.nu_minus),
                              std::abs(generic.nu_plus - closed.nu_plus)});
        }
        rep.check("partial-transpose spectrum: generic vs closed form", worst < 1e-10,
                  worst);
    }
    {
        // Closed-form likelihood bin integrals vs Simpson quadrature.
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double var_d = 0.1 + 2.0 * u01(rng);
            const double sigma = 0.2 + 1.3 * u01(rng);
            const SingleModeParams cand(2.0 * u01(rng), 1.5 * u01(rng), kPi * u01(rng));
            const double angle = kPi * u01(rng);
            const BinnedDistribution bins =
                bin_gaussian(GaussianMarginal{0.0, var_d}, sigma);
            const std::vector<std::pair<double, BinnedDistribution>> data{{angle, bins}};
            const double closed = log_likelihood1(cand, data);
            // Simpson integral of P_D ln P_E across the support.
            const double var_e = std::max(homodyne_marginal1(cand, angle).variance, 1e-12);
            double quad = 0.0;
            for (int m = bins.m_min(); m <= bins.m_max(); ++m) {
                const int n = 32;
                const double lo = (m - 0.5) * sigma, h = sigma / n;
                auto f = [&](double x) {
                    return (bins.mass(m) / sigma) *
                           (-0.5 * std::log(2.0 * kPi * var_e) - x * x / (2.0 * var_e));
                };
                double s = f(lo) + f(lo + sigma);
                for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
                quad += s * h / 3.0;
            }
            quad *= kPi;  // single-angle weight
            worst = std::max(worst, std::abs(closed - quad));
        }
        rep.check("likelihood bin integrals: closed form vs quadrature", worst < 1e-10,
                  worst);
    }
    {
        // Fixed-point angles of the squeezing-axis rotation.
        double worst = 0.0;
        for (double sigma : {0.1, 0.5, 1.0, 2.0})
            for (int k : {1, 2, 3, 5, 6, 7})
                worst = std::max(
                    worst, angle_deviation(SingleModeParams(0.0, 1.0, k * kPi / 8.0), sigma));
        rep.check("angle deviation vanishes at k*pi/8 fixed points", worst < 1e-9, worst);
    }
    {
        // sigma -> 0 limits.
        double worst = 0.0;
        for (double var : {0.05, 0.25, 1.0, 5.0}) {
            const BinnedDistribution bins =
                bin_gaussian(GaussianMarginal{0.0, var}, 1e-3);
            worst = std::max(worst, std::abs(coarse_variance(bins) - var));
        }
        rep.check("coarse variance recovers the input as sigma -> 0", worst < 1e-6, worst);
    }
    {
        // Single-bin limit: variance collapses to sigma^2/12.
        const double var = 0.25;
        const double sigma = 20.0 * std::sqrt(var);
        const BinnedDistribution bins = bin_gaussian(GaussianMarginal{0.0, var}, sigma);
        const double dev = std::abs(coarse_variance(bins) - sigma * sigma / 12.0);
        rep.check("single-bin limit gives sigma^2/12", dev < 1e-10, dev);
    }

    std::printf("%s (%d failure%s)\n", rep.failures == 0 ? "selftest OK" : "selftest FAILED",
                rep.failures, rep.failures == 1 ? "" : "s");
    return rep.failures;
}

}  // namespace cgtomo
