#include "cgtomo/reconstruct_mle.hpp"

#include <cmath>
#include <random>

#include "cgtomo/nelder_mead.hpp"
#include "cgtomo/reconstruct_direct.hpp"

namespace cgtomo {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

double softplus(double u) { return u > 30.0 ? u : std::log1p(std::exp(u)); }

double softplus_inv(double x) {
    x = std::max(x, 1e-8);
    return x > 30.0 ? x : std::log(std::expm1(x));
}

// Closed form of the per-bin integral of P_D against ln of a Gaussian:
// mass * [ -ln(2 pi V)/2 - ((x_m - mu)^2 + sigma^2/12) / (2V) ].
double bin_loglike(double mass, double x_center, double sigma, double mean, double var) {
    return mass * (-0.5 * (kLog2Pi + std::log(var)) -
                   ((x_center - mean) * (x_center - mean) + sigma * sigma / 12.0) /
                       (2.0 * var));
}

struct BestRun {
    double value = std::numeric_limits<double>::infinity();  // minimized -L
    std::vector<double> x;
    bool converged = false;

    void offer(const NelderMeadResult& r) {
        if (r.value < value) {
            value = r.value;
            x = r.x;
            converged = r.converged;
        }
    }
};

}  // namespace

AngleSet AngleSet::uniform(int count) {
    if (count < 3) throw std::invalid_argument("AngleSet: need at least 3 angles");
    AngleSet s;
    s.angles.reserve(count);
    for (int k = 0; k < count; ++k) s.angles.push_back(k * kPi / count);
    return s;
}

void AngleSet::validate() const {
    if (angles.empty()) throw std::invalid_argument("AngleSet: empty");
    for (size_t i = 0; i < angles.size(); ++i) {
        if (angles[i] < 0.0 || angles[i] >= kPi)
            throw std::invalid_argument("AngleSet: angles must lie in [0, pi)");
        if (i > 0 && angles[i] <= angles[i - 1])
            throw std::invalid_argument("AngleSet: angles must be strictly increasing");
    }
}

double log_likelihood1(const SingleModeParams& candidate,
                       std::span<const std::pair<double, BinnedDistribution>> data) {
    if (data.empty()) throw std::invalid_argument("log_likelihood1: empty data");
    const double w = kPi / static_cast<double>(data.size());
    double total = 0.0;
    for (const auto& [angle, dist] : data) {
        const GaussianMarginal marg = homodyne_marginal1(candidate, angle);
        const double var = std::max(marg.variance, kVarianceFloor);
        double sum = 0.0;
        for (int m = dist.m_min(); m <= dist.m_max(); ++m)
            sum += bin_loglike(dist.mass(m), dist.center(m), dist.sigma(), 0.0, var);
        total += w * sum;
    }
    return total;
}

double relative_entropy(const BinnedDistribution& pd, const GaussianMarginal& pe) {
    const double var = std::max(pe.variance, kVarianceFloor);
    double self_term = 0.0, cross_term = 0.0;
    for (int m = pd.m_min(); m <= pd.m_max(); ++m) {
        const double mass = pd.mass(m);
        if (mass > 0.0) self_term += mass * std::log(mass / pd.sigma());
        cross_term += bin_loglike(mass, pd.center(m), pd.sigma(), pe.mean, var);
    }
    return self_term - cross_term;
}

double relative_entropy_density(const BinnedDistribution& pd,
                                const std::function<double(double)>& pe_density) {
    // 32-point Gauss-Legendre nodes on [-1, 1] via Newton refinement.
    constexpr int kOrder = 32;
    static const auto rule = [] {
        std::array<std::array<double, kOrder>, 2> r{};
        for (int i = 0; i < kOrder; ++i) {
            double t = std::cos(kPi * (i + 0.75) / (kOrder + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int j = 2; j <= kOrder; ++j) {
                    const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = kOrder * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            r[0][i] = t;
            r[1][i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        return r;
    }();

    double self_term = 0.0, cross_term = 0.0;
    for (int m = pd.m_min(); m <= pd.m_max(); ++m) {
        const double mass = pd.mass(m);
        if (mass <= 0.0) continue;
        self_term += mass * std::log(mass / pd.sigma());
        double integral = 0.0;
        for (int i = 0; i < kOrder; ++i) {
            const double x = pd.center(m) + 0.5 * pd.sigma() * rule[0][i];
            integral += rule[1][i] * std::log(std::max(pe_density(x), 1e-300));
        }
        cross_term += (mass / pd.sigma()) * 0.5 * pd.sigma() * integral;
    }
    return self_term - cross_term;
}

namespace {

struct SingleObjective {
    std::vector<double> angles;
    std::vector<double> mass, m2;
    double w = 0.0;
    double sigma = 0.0;
    bool coarse_candidate = false;
    std::vector<BinnedDistribution> bins;  // only for the coarse-candidate variant

    double neg_log_likelihood(const std::vector<double>& u) const {
        const SingleModeParams cand(softplus(u[0]), softplus(u[1]), wrap_pi(u[2]));
        double total = 0.0;
        if (!coarse_candidate) {
            const double k = cand.nbar + 0.5;
            const double ch = std::cosh(2.0 * cand.r), sh = std::sinh(2.0 * cand.r);
            for (size_t i = 0; i < angles.size(); ++i) {
                const double var = std::max(
                    0.5 * k * (ch - sh * std::cos(2.0 * angles[i] - 2.0 * cand.phi)),
                    kVarianceFloor);
                total += w * (-0.5 * (kLog2Pi + std::log(var)) * mass[i] -
                              m2[i] / (2.0 * var));
            }
            return -total;
        }
        for (size_t i = 0; i < angles.size(); ++i) {
            const BinnedDistribution cand_bins =
                bin_gaussian(homodyne_marginal1(cand, angles[i]), sigma);
            double sum = 0.0;
            for (int m = bins[i].m_min(); m <= bins[i].m_max(); ++m) {
                const double pd_mass = bins[i].mass(m);
                if (pd_mass <= 0.0) continue;
                sum += pd_mass * std::log(std::max(cand_bins.mass(m), 1e-300) / sigma);
            }
            total += w * sum;
        }
        return -total;
    }
};

std::vector<std::vector<double>> restart_seeds(const std::vector<double>& truth,
                                               const std::vector<double>& direct,
                                               int restarts, std::uint64_t seed,
                                               double angle_span) {
    std::vector<std::vector<double>> seeds{truth, direct};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.3);
    std::uniform_real_distribution<double> u_box(-3.0, 1.5);
    std::uniform_real_distribution<double> u_angle(0.0, angle_span);
    while (static_cast<int>(seeds.size()) < restarts) {
        std::vector<double> s(truth.size());
        if (seeds.size() % 2 == 0) {
            for (size_t i = 0; i < s.size(); ++i) s[i] = truth[i] + jitter(rng);
        } else {
            for (size_t i = 0; i + 1 < s.size(); ++i) s[i] = u_box(rng);
            s.back() = u_angle(rng);
        }
        seeds.push_back(std::move(s));
    }
    seeds.resize(std::max(restarts, 1));
    return seeds;
}

}  // namespace

MleResult1 mle_estimate_single(const SingleModeParams& input, double sigma,
                               const MleConfig& cfg) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("mle_estimate_single: sigma must be > 0");
    const AngleSet set = AngleSet::uniform(cfg.angle_count);

    SingleObjective obj;
    obj.angles = set.angles;
    obj.w = kPi / cfg.angle_count;
    obj.sigma = sigma;
    obj.coarse_candidate = cfg.coarse_grained_candidate;
    for (double a : set.angles) {
        const GaussianMarginal marg = homodyne_marginal1(input, a);
        if (obj.coarse_candidate) {
            obj.bins.push_back(bin_gaussian(marg, sigma));
        } else {
            const BinnedStats s = binned_gaussian_stats(marg, sigma);
            obj.mass.push_back(s.mass);
            obj.m2.push_back(s.second_moment);
        }
    }

    const std::vector<double> truth{softplus_inv(input.nbar), softplus_inv(input.r),
                                    input.phi};
    const SingleModeParams direct =
        reconstruct_single(input, sigma, FramePolicy::unknown()).params;
    const std::vector<double> direct_seed{softplus_inv(direct.nbar),
                                          softplus_inv(direct.r), direct.phi};

    NelderMeadOptions opts;
    opts.tol = cfg.tol;
    opts.max_iters = cfg.max_iters;
    const auto f = [&obj](const std::vector<double>& u) { return obj.neg_log_likelihood(u); };

    BestRun best;
    for (const auto& seed :
         restart_seeds(truth, direct_seed, cfg.restarts, cfg.seed, kPi))
        best.offer(nelder_mead_minimize(f, seed, opts));

    MleResult1 out;
    out.params = SingleModeParams(softplus(best.x[0]), softplus(best.x[1]),
                                  wrap_pi(best.x[2]));
    out.log_likelihood = -best.value;
    out.converged = best.converged;
    return out;
}

namespace {

struct TwoObjective {
    std::vector<double> cos_s, sin_s;  // cos/sin of (phi1 + phi2) per pair
    std::vector<JointBinnedStats> data;
    double w = 0.0;

    double neg_log_likelihood(const std::vector<double>& u) const {
        const double n1 = softplus(u[0]), n2 = softplus(u[1]), r = softplus(u[2]);
        const double phi = u[3];
        const double ch2 = std::cosh(r) * std::cosh(r), sh2 = std::sinh(r) * std::sinh(r);
        const double a = n1 * ch2 + n2 * sh2 + 0.5 * std::cosh(2.0 * r);
        const double b = n1 * sh2 + n2 * ch2 + 0.5 * std::cosh(2.0 * r);
        const double amp = -0.5 * (n1 + n2 + 1.0) * std::sinh(2.0 * r);
        const double re_c = amp * std::cos(phi), im_c = amp * std::sin(phi);
        const double vx = std::max(0.5 * a, kVarianceFloor);
        const double vy = std::max(0.5 * b, kVarianceFloor);
        double total = 0.0;
        for (size_t i = 0; i < data.size(); ++i) {
            const double cc = 0.5 * (re_c * cos_s[i] + im_c * sin_s[i]);
            const double det = std::max(vx * vy - cc * cc, 1e-24);
            const double inv_xx = vy / det, inv_yy = vx / det, inv_xy = -cc / det;
            const JointBinnedStats& s = data[i];
            total += w * (-(kLog2Pi + 0.5 * std::log(det)) * s.mass -
                          0.5 * (inv_xx * s.second_x + inv_yy * s.second_y +
                                 2.0 * inv_xy * s.cross));
        }
        return -total;
    }
};

}  // namespace

MleResult2 mle_estimate_two(const TwoModeParams& input, double sigma, const MleConfig& cfg) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("mle_estimate_two: sigma must be > 0");
    if (cfg.pair_grid < 2)
        throw std::invalid_argument("mle_estimate_two: pair_grid must be >= 2");

    TwoObjective obj;
    obj.w = (kPi / cfg.pair_grid) * (kPi / cfg.pair_grid);
    for (int i = 0; i < cfg.pair_grid; ++i) {
        for (int j = 0; j < cfg.pair_grid; ++j) {
            const double p1 = i * kPi / cfg.pair_grid, p2 = j * kPi / cfg.pair_grid;
            obj.cos_s.push_back(std::cos(p1 + p2));
            obj.sin_s.push_back(std::sin(p1 + p2));
            obj.data.push_back(joint_binned_stats(homodyne_joint2(input, p1, p2), sigma));
        }
    }

    const std::vector<double> truth{softplus_inv(input.nbar1), softplus_inv(input.nbar2),
                                    softplus_inv(input.r), input.phi};
    const TwoModeParams direct =
        reconstruct_two(input, sigma, FramePolicy::unknown()).params;
    const std::vector<double> direct_seed{softplus_inv(direct.nbar1),
                                          softplus_inv(direct.nbar2),
                                          softplus_inv(direct.r), direct.phi};

    NelderMeadOptions opts;
    opts.tol = cfg.tol;
    opts.max_iters = cfg.max_iters;
    const auto f = [&obj](const std::vector<double>& u) { return obj.neg_log_likelihood(u); };

    BestRun best;
    for (const auto& seed :
         restart_seeds(truth, direct_seed, cfg.restarts, cfg.seed, 2.0 * kPi))
        best.offer(nelder_mead_minimize(f, seed, opts));

    MleResult2 out;
    out.params = TwoModeParams(softplus(best.x[0]), softplus(best.x[1]),
                               softplus(best.x[2]), wrap_2pi(best.x[3]));
    out.log_likelihood = -best.value;
    out.converged = best.converged;
    return out;
}

}  // namespace cgtomo
