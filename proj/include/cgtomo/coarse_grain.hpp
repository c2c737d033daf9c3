#pragma once

#include <vector>

#include "cgtomo/gaussian.hpp"

namespace cgtomo {

/// Piecewise-flat distribution on bins of width sigma centered at x_m = m*sigma.
/// masses[i] is the probability mass of bin m = m_min + i; the density on that
/// bin is masses[i] / sigma. Bins outside [m_min, m_max] carry < 1e-12 total.
class BinnedDistribution {
public:
    BinnedDistribution(double sigma, int m_min, std::vector<double> masses);

    double sigma() const { return sigma_; }
    int m_min() const { return m_min_; }
    int m_max() const { return m_min_ + static_cast<int>(masses_.size()) - 1; }
    int truncation() const { return std::max(std::abs(m_min()), std::abs(m_max())); }
    double mass(int m) const;
    double center(int m) const { return m * sigma_; }
    const std::vector<double>& masses() const { return masses_; }
    double total_mass() const;

private:
    double sigma_;
    int m_min_;
    std::vector<double> masses_;
};

/// 2D analogue on sigma x sigma cells centered at (m*sigma, n*sigma).
class BinnedJoint {
public:
    BinnedJoint(double sigma, int mx_min, int my_min, int nx, int ny,
                std::vector<double> masses);

    double sigma() const { return sigma_; }
    int mx_min() const { return mx_min_; }
    int my_min() const { return my_min_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double mass(int m, int n) const;
    double total_mass() const;

    /// Marginal over the other axis; axis 0 sums over n, axis 1 over m.
    BinnedDistribution marginal(int axis) const;

private:
    double sigma_;
    int mx_min_, my_min_;
    int nx_, ny_;
    std::vector<double> masses_;  // row-major, nx * ny
};

/// Moments of a binned distribution needed by the reconstruction and
/// likelihood paths. second_moment includes the within-bin sigma^2/12 term.
struct BinnedStats {
    double mass = 0.0;
    double mean = 0.0;
    double second_moment = 0.0;
};

struct JointBinnedStats {
    double mass = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double second_x = 0.0;  // sum mass*(x_m^2 + sigma^2/12)
    double second_y = 0.0;
    double cross = 0.0;     // sum mass*x_m*y_n
};

/// Bin a Gaussian marginal: mass of bin m is the erf difference
/// Phi((m+1/2)sigma) - Phi((m-1/2)sigma), truncated where the tail mass
/// drops below 1e-12. Throws InvalidSigmaError for sigma <= 0.
BinnedDistribution bin_gaussian(const GaussianMarginal& marg, double sigma);

/// Bin a bivariate Gaussian: cell masses by per-cell Gauss-Legendre
/// quadrature with adaptive order (relative tolerance 1e-10).
BinnedJoint bin_bivariate(const BivariateMarginal& marg, double sigma);

/// Coarse-grained variance sigma^2/12 + discrete variance of the bin masses.
double coarse_variance(const BinnedDistribution& b);

/// First moment of the binned distribution (equals the discrete mean).
double coarse_mean(const BinnedDistribution& b);

/// Cross moment sum x_m y_n P(x_m, y_n); the flat within-cell parts
/// contribute nothing.
double coarse_cross_moment(const BinnedJoint& b);

/// Density value P_sigma[m] of the bin containing x. A point exactly on a
/// bin edge belongs to both neighbours; the one with smaller |m| wins.
double coarse_pdf_eval(const BinnedDistribution& b, double x);

BinnedStats binned_stats(const BinnedDistribution& b);

/// Same stats as binned_stats(bin_gaussian(marg, sigma)) computed without
/// materializing the bins.
BinnedStats binned_gaussian_stats(const GaussianMarginal& marg, double sigma);

/// Stats of the binned bivariate Gaussian. Equals the moments of
/// bin_bivariate(marg, sigma) but stays cheap for small sigma: below
/// sigma <= sqrt(min variance)/2 (zero-mean case) the lattice sums are
/// evaluated by their Poisson-resummed closed form instead of per cell.
JointBinnedStats joint_binned_stats(const BivariateMarginal& marg, double sigma);

}  // namespace cgtomo
