#include "cgtomo/coarse_grain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cgtomo {

namespace {

constexpr double kQuadRelTol = 1e-10;
constexpr double kTailBound = 8.0;  // tail mass beyond 8 std devs < 1e-12

double gaussian_cdf(double x, double mean, double var) {
    return 0.5 * (1.0 + std::erf((x - mean) / std::sqrt(2.0 * var)));
}

struct GlRule {
    std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

GlRule gauss_legendre(int n) {
    GlRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        rule.x[i] = -t;
        rule.x[n - 1 - i] = t;
        rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return rule;
}

}  // namespace

BinnedDistribution::BinnedDistribution(double sigma, int m_min, std::vector<double> masses)
    : sigma_(sigma), m_min_(m_min), masses_(std::move(masses)) {
    if (!(sigma_ > 0.0)) throw InvalidSigmaError("BinnedDistribution: sigma must be > 0");
    for (double& m : masses_) {
        if (m < -1e-12) throw std::invalid_argument("BinnedDistribution: negative mass");
        m = std::max(m, 0.0);
    }
}

double BinnedDistribution::mass(int m) const {
    const int i = m - m_min_;
    if (i < 0 || i >= static_cast<int>(masses_.size())) return 0.0;
    return masses_[i];
}

double BinnedDistribution::total_mass() const {
    return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

BinnedJoint::BinnedJoint(double sigma, int mx_min, int my_min, int nx, int ny,
                         std::vector<double> masses)
    : sigma_(sigma), mx_min_(mx_min), my_min_(my_min), nx_(nx), ny_(ny),
      masses_(std::move(masses)) {
    if (!(sigma_ > 0.0)) throw InvalidSigmaError("BinnedJoint: sigma must be > 0");
    if (static_cast<int>(masses_.size()) != nx_ * ny_)
        throw std::invalid_argument("BinnedJoint: mass vector has the wrong size");
}

double BinnedJoint::mass(int m, int n) const {
    const int i = m - mx_min_;
    const int j = n - my_min_;
    if (i < 0 || i >= nx_ || j < 0 || j >= ny_) return 0.0;
    return masses_[static_cast<size_t>(i) * ny_ + j];
}

double BinnedJoint::total_mass() const {
    return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

BinnedDistribution BinnedJoint::marginal(int axis) const {
    if (axis == 0) {
        std::vector<double> row(nx_, 0.0);
        for (int i = 0; i < nx_; ++i)
            for (int j = 0; j < ny_; ++j) row[i] += masses_[static_cast<size_t>(i) * ny_ + j];
        return BinnedDistribution(sigma_, mx_min_, std::move(row));
    }
    std::vector<double> col(ny_, 0.0);
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) col[j] += masses_[static_cast<size_t>(i) * ny_ + j];
    return BinnedDistribution(sigma_, my_min_, std::move(col));
}

BinnedDistribution bin_gaussian(const GaussianMarginal& marg, double sigma) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("bin_gaussian: sigma must be > 0");
    if (!(marg.variance > 0.0)) throw std::invalid_argument("bin_gaussian: variance must be > 0");
    const double spread = kTailBound * std::sqrt(marg.variance);
    const int m_min = static_cast<int>(std::floor((marg.mean - spread) / sigma)) - 1;
    const int m_max = static_cast<int>(std::ceil((marg.mean + spread) / sigma)) + 1;
    std::vector<double> masses;
    masses.reserve(m_max - m_min + 1);
    double lo_cdf = gaussian_cdf((m_min - 0.5) * sigma, marg.mean, marg.variance);
    for (int m = m_min; m <= m_max; ++m) {
        const double hi_cdf = gaussian_cdf((m + 0.5) * sigma, marg.mean, marg.variance);
        masses.push_back(std::max(0.0, hi_cdf - lo_cdf));
        lo_cdf = hi_cdf;
    }
    return BinnedDistribution(sigma, m_min, std::move(masses));
}

namespace {

struct BivariateDensity {
    double mx, my;
    double inv_xx, inv_xy, inv_yy;
    double norm;

    explicit BivariateDensity(const BivariateMarginal& marg) {
        const double vx = marg.cov(0, 0), vy = marg.cov(1, 1), c = marg.cov(0, 1);
        const double det = vx * vy - c * c;
        if (!(vx > 0.0) || !(det > 0.0))
            throw std::invalid_argument("bivariate marginal is not positive definite");
        mx = marg.mean_x;
        my = marg.mean_y;
        inv_xx = vy / det;
        inv_yy = vx / det;
        inv_xy = -c / det;
        norm = 1.0 / (2.0 * kPi * std::sqrt(det));
    }

    double operator()(double x, double y) const {
        const double dx = x - mx, dy = y - my;
        const double q = inv_xx * dx * dx + 2.0 * inv_xy * dx * dy + inv_yy * dy * dy;
        return norm * std::exp(-0.5 * q);
    }
};

// Composite tensor Gauss-Legendre integral of the density over
// [x0, x0+sigma] x [y0, y0+sigma], px x py panels per axis.
double cell_integral(const BivariateDensity& pdf, double x0, double y0, double sigma,
                     int px, int py, const GlRule& rule) {
    const double hx = sigma / px, hy = sigma / py;
    double sum = 0.0;
    for (int a = 0; a < px; ++a) {
        for (int b = 0; b < py; ++b) {
            const double cx = x0 + (a + 0.5) * hx;
            const double cy = y0 + (b + 0.5) * hy;
            double s = 0.0;
            for (size_t i = 0; i < rule.x.size(); ++i) {
                const double x = cx + 0.5 * hx * rule.x[i];
                double row = 0.0;
                for (size_t j = 0; j < rule.x.size(); ++j)
                    row += rule.w[j] * pdf(x, cy + 0.5 * hy * rule.x[j]);
                s += rule.w[i] * row;
            }
            sum += s * 0.25 * hx * hy;
        }
    }
    return sum;
}

}  // namespace

BinnedJoint bin_bivariate(const BivariateMarginal& marg, double sigma) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("bin_bivariate: sigma must be > 0");
    const BivariateDensity pdf(marg);
    const double sx = std::sqrt(marg.cov(0, 0)), sy = std::sqrt(marg.cov(1, 1));
    const int mx_min = static_cast<int>(std::floor((marg.mean_x - kTailBound * sx) / sigma)) - 1;
    const int mx_max = static_cast<int>(std::ceil((marg.mean_x + kTailBound * sx) / sigma)) + 1;
    const int my_min = static_cast<int>(std::floor((marg.mean_y - kTailBound * sy) / sigma)) - 1;
    const int my_max = static_cast<int>(std::ceil((marg.mean_y + kTailBound * sy) / sigma)) + 1;
    const int nx = mx_max - mx_min + 1, ny = my_max - my_min + 1;

    // Panels keep each sub-interval below one standard deviation so a fixed
    // order stays accurate when the cells are wide.
    const int px = std::max(1, static_cast<int>(std::ceil(sigma / sx)));
    const int py = std::max(1, static_cast<int>(std::ceil(sigma / sy)));

    const GlRule r8 = gauss_legendre(8);
    GlRule cur = r8;
    std::vector<double> masses(static_cast<size_t>(nx) * ny, 0.0);
    for (int m = mx_min; m <= mx_max; ++m) {
        for (int n = my_min; n <= my_max; ++n) {
            const double x0 = (m - 0.5) * sigma, y0 = (n - 0.5) * sigma;
            double prev = cell_integral(pdf, x0, y0, sigma, px, py, r8);
            double val = prev;
            for (int order = 16; order <= 64; order *= 2) {
                if (static_cast<int>(cur.x.size()) != order) cur = gauss_legendre(order);
                val = cell_integral(pdf, x0, y0, sigma, px, py, cur);
                if (std::abs(val - prev) <= kQuadRelTol * std::max(std::abs(val), 1e-300)) break;
                prev = val;
            }
            masses[static_cast<size_t>(m - mx_min) * ny + (n - my_min)] = std::max(0.0, val);
        }
    }
    return BinnedJoint(sigma, mx_min, my_min, nx, ny, std::move(masses));
}

double coarse_mean(const BinnedDistribution& b) {
    double s = 0.0;
    for (int m = b.m_min(); m <= b.m_max(); ++m) s += b.center(m) * b.mass(m);
    return s;
}

double coarse_variance(const BinnedDistribution& b) {
    double s1 = 0.0, s2 = 0.0;
    for (int m = b.m_min(); m <= b.m_max(); ++m) {
        const double x = b.center(m), p = b.mass(m);
        s1 += x * p;
        s2 += x * x * p;
    }
    return b.sigma() * b.sigma() / 12.0 + (s2 - s1 * s1);
}

double coarse_cross_moment(const BinnedJoint& b) {
    double s = 0.0;
    for (int m = b.mx_min(); m < b.mx_min() + b.nx(); ++m)
        for (int n = b.my_min(); n < b.my_min() + b.ny(); ++n)
            s += (m * b.sigma()) * (n * b.sigma()) * b.mass(m, n);
    return s;
}

double coarse_pdf_eval(const BinnedDistribution& b, double x) {
    const double t = x / b.sigma();
    int m;
    const double frac = t - std::floor(t);
    if (frac == 0.5) {
        // Edge point: both neighbours contain it, lower |m| wins.
        const int lo = static_cast<int>(std::floor(t));
        m = std::abs(lo) <= std::abs(lo + 1) ? lo : lo + 1;
    } else {
        m = static_cast<int>(std::lround(t));
    }
    return b.mass(m) / b.sigma();
}

BinnedStats binned_stats(const BinnedDistribution& b) {
    BinnedStats s;
    const double w = b.sigma() * b.sigma() / 12.0;
    for (int m = b.m_min(); m <= b.m_max(); ++m) {
        const double x = b.center(m), p = b.mass(m);
        s.mass += p;
        s.mean += x * p;
        s.second_moment += (x * x + w) * p;
    }
    return s;
}

BinnedStats binned_gaussian_stats(const GaussianMarginal& marg, double sigma) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("binned_gaussian_stats: sigma must be > 0");
    const double spread = kTailBound * std::sqrt(marg.variance);
    const int m_min = static_cast<int>(std::floor((marg.mean - spread) / sigma)) - 1;
    const int m_max = static_cast<int>(std::ceil((marg.mean + spread) / sigma)) + 1;
    BinnedStats s;
    const double w = sigma * sigma / 12.0;
    double lo_cdf = gaussian_cdf((m_min - 0.5) * sigma, marg.mean, marg.variance);
    for (int m = m_min; m <= m_max; ++m) {
        const double hi_cdf = gaussian_cdf((m + 0.5) * sigma, marg.mean, marg.variance);
        const double p = std::max(0.0, hi_cdf - lo_cdf);
        lo_cdf = hi_cdf;
        const double x = m * sigma;
        s.mass += p;
        s.mean += x * p;
        s.second_moment += (x * x + w) * p;
    }
    return s;
}

namespace {

// Lattice sums of the rounded coordinates by Poisson resummation. The
// sawtooth x - sigma*round(x/sigma) has Fourier coefficients
// a_k = (-1)^{k+1} sigma/(pi k); all expectations against a zero-mean
// Gaussian reduce to the sums below. Valid tails: every dropped term
// carries exp(-2 pi^2 V / sigma^2) <= exp(-78) at the switching point.
JointBinnedStats poisson_joint_stats(double vx, double vy, double c, double sigma) {
    const double w = 2.0 * kPi * kPi / (sigma * sigma);
    const double scale = std::max({std::abs(c), vx, vy, sigma * sigma});
    const double cutoff = 1e-22 * std::max(scale, 1e-300);

    double x_saw_y = 0.0;   // E[X saw(Y)] + E[Y saw(X)]
    double x_saw_x = 0.0;   // E[X saw(X)]
    double y_saw_y = 0.0;
    double saw2_x = 0.0;    // E[saw(X)^2] - sigma^2/12
    double saw2_y = 0.0;
    for (int k = 1; k <= 512; ++k) {
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double ex = w * k * k * vx, ey = w * k * k * vy;
        const double tx = ex < 700.0 ? std::exp(-ex) : 0.0;
        const double ty = ey < 700.0 ? std::exp(-ey) : 0.0;
        x_saw_y += sign * 2.0 * c * (tx + ty);
        x_saw_x += sign * 2.0 * vx * tx;
        y_saw_y += sign * 2.0 * vy * ty;
        const double ak2 = sigma * sigma / (kPi * kPi * k * k);
        saw2_x -= 0.5 * ak2 * (4.0 * ex < 700.0 ? std::exp(-4.0 * ex) : 0.0);
        saw2_y -= 0.5 * ak2 * (4.0 * ey < 700.0 ? std::exp(-4.0 * ey) : 0.0);
        if (2.0 * (std::abs(c) + vx + vy) * std::max(tx, ty) < cutoff && k >= 4) break;
    }

    double saw_saw = 0.0;  // E[saw(X) saw(Y)]
    for (int k = 1; k <= 512; ++k) {
        double row_max = 0.0;
        for (int l = 1; l <= 512; ++l) {
            const double em = w * (k * k * vx + l * l * vy - 2.0 * k * l * c);
            const double ep = w * (k * k * vx + l * l * vy + 2.0 * k * l * c);
            if (em > 120.0 && ep > 120.0) {
                if (l > k + 4 && row_max > 0.0) break;
                continue;
            }
            const double sign = ((k + l) % 2 == 0) ? 1.0 : -1.0;
            const double amp = 0.5 * sign * sigma * sigma / (kPi * kPi * k * l);
            const double term = amp * ((em < 700.0 ? std::exp(-em) : 0.0) -
                                       (ep < 700.0 ? std::exp(-ep) : 0.0));
            saw_saw += term;
            row_max = std::max(row_max, std::abs(term));
        }
        if (row_max < cutoff && k >= 4) break;
    }

    JointBinnedStats s;
    s.mass = 1.0;
    s.mean_x = 0.0;
    s.mean_y = 0.0;
    s.second_x = vx + sigma * sigma / 6.0 - 2.0 * x_saw_x + saw2_x;
    s.second_y = vy + sigma * sigma / 6.0 - 2.0 * y_saw_y + saw2_y;
    s.cross = c - x_saw_y + saw_saw;
    return s;
}

}  // namespace

JointBinnedStats joint_binned_stats(const BivariateMarginal& marg, double sigma) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("joint_binned_stats: sigma must be > 0");
    const double vmin = std::min(marg.cov(0, 0), marg.cov(1, 1));
    const bool zero_mean = marg.mean_x == 0.0 && marg.mean_y == 0.0;
    if (zero_mean && sigma <= 0.5 * std::sqrt(vmin))
        return poisson_joint_stats(marg.cov(0, 0), marg.cov(1, 1), marg.cov(0, 1), sigma);

    const BinnedJoint joint = bin_bivariate(marg, sigma);
    JointBinnedStats s;
    const double w = sigma * sigma / 12.0;
    for (int m = joint.mx_min(); m < joint.mx_min() + joint.nx(); ++m) {
        for (int n = joint.my_min(); n < joint.my_min() + joint.ny(); ++n) {
            const double p = joint.mass(m, n);
            const double x = m * sigma, y = n * sigma;
            s.mass += p;
            s.mean_x += x * p;
            s.mean_y += y * p;
            s.second_x += (x * x + w) * p;
            s.second_y += (y * y + w) * p;
            s.cross += x * y * p;
        }
    }
    return s;
}

}  // namespace cgtomo
