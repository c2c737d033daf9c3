#include "cgtomo/reconstruct_direct.hpp"

#include <array>
#include <cmath>

#include "cgtomo/metrics.hpp"

namespace cgtomo {

namespace {

constexpr double kTmstResidualTol = 1e-6;

struct ThreeAngleMoments {
    std::array<double, 3> m1{};  // coarse means at {t, t+pi/4, t+pi/2}
    std::array<double, 3> m2{};  // coarse second moments
};

// Coarse moments of the marginals at {base, base+pi/4, base+pi/2}.
ThreeAngleMoments three_angle_moments(const SingleModeParams& input, double base,
                                      double sigma) {
    ThreeAngleMoments out;
    for (int i = 0; i < 3; ++i) {
        const GaussianMarginal marg = homodyne_marginal1(input, base + i * kPi / 4.0);
        const BinnedStats s = binned_gaussian_stats(marg, sigma);
        out.m1[i] = s.mean;
        out.m2[i] = s.second_moment;
    }
    return out;
}

// Covariance matrix from three-angle moments in the measurement frame:
//   G11 = 2<X_0^2> - 2<X_0>^2, G22 likewise at pi/2,
//   G12 = 2<X_{pi/4}^2> - <X_0^2> - <X_{pi/2}^2> - 2<X_0><X_{pi/2}>.
Eigen::Matrix2d assemble_cov(const ThreeAngleMoments& m) {
    Eigen::Matrix2d g;
    g(0, 0) = 2.0 * (m.m2[0] - m.m1[0] * m.m1[0]);
    g(1, 1) = 2.0 * (m.m2[2] - m.m1[2] * m.m1[2]);
    g(0, 1) = g(1, 0) = 2.0 * m.m2[1] - m.m2[0] - m.m2[2] - 2.0 * m.m1[0] * m.m1[2];
    return g;
}

}  // namespace

ReconResult1 reconstruct_single(const SingleModeParams& input, double sigma,
                                const FramePolicy& frame) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("reconstruct_single: sigma must be > 0");
    const double offset = frame.mode == FramePolicy::Mode::Known ? frame.offset : 0.0;
    const Eigen::Matrix2d g_meas = assemble_cov(three_angle_moments(input, offset, sigma));

    bool nonphysical = false;
    SingleModeInversion inv;
    try {
        inv = params_from_cov1(CovMatrix(g_meas));
    } catch (const NonPhysicalError&) {
        nonphysical = true;
        // Numerical pathology: invert with the determinant floored at 1/4.
        const double gamma = (g_meas(1, 1) - g_meas(0, 0)) * (g_meas(1, 1) - g_meas(0, 0)) +
                             4.0 * g_meas(0, 1) * g_meas(0, 1);
        inv.params = SingleModeParams(
            0.0, 0.5 * std::asinh(0.5 * std::sqrt(gamma / 0.25)),
            gamma < 1e-12 ? 0.0 : wrap_pi(0.5 * std::atan2(-2.0 * g_meas(0, 1),
                                                           g_meas(1, 1) - g_meas(0, 0))));
        inv.degenerate_angle = gamma < 1e-12;
    }

    double phi_lab = inv.params.phi;
    Eigen::Matrix2d g_lab = g_meas;
    if (offset != 0.0) {
        phi_lab = inv.degenerate_angle ? 0.0 : wrap_pi(inv.params.phi + offset);
        g_lab = rotate_cov1(g_meas, -offset);
    }
    const SingleModeParams est(inv.params.nbar, inv.params.r, phi_lab);
    const double dev =
        inv.degenerate_angle ? 0.0 : std::abs(wrap_half_pi(phi_lab - input.phi));
    return ReconResult1{est, CovMatrix(g_lab), dev, nonphysical, inv.degenerate_angle};
}

ReconResult2 reconstruct_two(const TwoModeParams& input, double sigma,
                             const FramePolicy& frame) {
    if (!(sigma > 0.0)) throw InvalidSigmaError("reconstruct_two: sigma must be > 0");
    const double offset = frame.mode == FramePolicy::Mode::Known ? frame.offset : 0.0;
    const CovMatrix g_in = cov_from_params2(input);

    // Local blocks, mode 1 measured in the offset frame.
    const SingleModeParams local1(std::sqrt(g_in(0, 0) * g_in(1, 1)) - 0.5, 0.0, 0.0);
    const SingleModeParams local2(std::sqrt(g_in(2, 2) * g_in(3, 3)) - 0.5, 0.0, 0.0);
    const Eigen::Matrix2d block1 = assemble_cov(three_angle_moments(local1, offset, sigma));
    const Eigen::Matrix2d block2 = assemble_cov(three_angle_moments(local2, 0.0, sigma));

    // Correlation elements from the four joint angle pairs.
    Eigen::Matrix2d corr;
    const std::array<double, 2> angles{0.0, 0.5 * kPi};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const BivariateMarginal marg =
                homodyne_joint2(input, offset + angles[i], angles[j]);
            const JointBinnedStats s = joint_binned_stats(marg, sigma);
            corr(i, j) = 2.0 * (s.cross - s.mean_x * s.mean_y);
        }
    }

    Eigen::Matrix4d g_meas = Eigen::Matrix4d::Zero();
    g_meas.block<2, 2>(0, 0) = block1;
    g_meas.block<2, 2>(2, 2) = block2;
    g_meas.block<2, 2>(0, 2) = corr;
    g_meas.block<2, 2>(2, 0) = corr.transpose();

    // Least-squares projection onto the TMST pattern.
    const double a = 0.5 * (g_meas(0, 0) + g_meas(1, 1));
    const double b = 0.5 * (g_meas(2, 2) + g_meas(3, 3));
    const double re_c = 0.5 * (corr(0, 0) - corr(1, 1));
    const double im_c = 0.5 * (corr(0, 1) + corr(1, 0));
    const double residual =
        std::max({std::abs(g_meas(0, 0) - a), std::abs(g_meas(2, 2) - b),
                  std::abs(g_meas(0, 1)), std::abs(g_meas(2, 3)),
                  std::abs(corr(0, 0) - re_c), std::abs(corr(0, 1) - im_c)});
    if (residual > kTmstResidualTol * std::max(1.0, std::abs(a) + std::abs(b)))
        throw NotTmstFormError("reconstruct_two: projection residual too large");

    Eigen::Matrix4d g_proj = Eigen::Matrix4d::Zero();
    g_proj(0, 0) = g_proj(1, 1) = a;
    g_proj(2, 2) = g_proj(3, 3) = b;
    g_proj(0, 2) = g_proj(2, 0) = re_c;
    g_proj(0, 3) = g_proj(3, 0) = im_c;
    g_proj(1, 2) = g_proj(2, 1) = im_c;
    g_proj(1, 3) = g_proj(3, 1) = -re_c;

    bool nonphysical = false;
    TwoModeInversion inv;
    try {
        inv = params_from_cov2(CovMatrix(g_proj));
    } catch (const NonPhysicalError&) {
        nonphysical = true;
        const double abs_c = std::hypot(re_c, im_c);
        const double gp = std::max((a + b) * (a + b) - 4.0 * abs_c * abs_c, 1e-12);
        inv.params = TwoModeParams(
            std::max(0.0, 0.5 * ((a - b) - 1.0 + std::sqrt(gp))),
            std::max(0.0, 0.5 * ((b - a) - 1.0 + std::sqrt(gp))),
            0.5 * std::asinh(2.0 * abs_c / std::sqrt(gp)),
            abs_c < 1e-12 ? 0.0 : wrap_2pi(std::atan2(-im_c, -re_c)));
        inv.degenerate_angle = abs_c < 1e-12;
    }

    double phi_lab = inv.params.phi;
    Eigen::Matrix4d g_lab = g_proj;
    if (offset != 0.0) {
        phi_lab = inv.degenerate_angle ? 0.0 : wrap_2pi(inv.params.phi + offset);
        Eigen::Matrix4d rot = Eigen::Matrix4d::Identity();
        rot(0, 0) = rot(1, 1) = std::cos(offset);
        rot(0, 1) = std::sin(offset);
        rot(1, 0) = -std::sin(offset);
        g_lab = rot.transpose() * g_proj * rot;
    }
    const TwoModeParams est(inv.params.nbar1, inv.params.nbar2, inv.params.r, phi_lab);
    const double dev =
        inv.degenerate_angle ? 0.0 : std::abs(std::remainder(phi_lab - input.phi, 2.0 * kPi));
    return ReconResult2{est, CovMatrix(g_lab), dev, nonphysical, inv.degenerate_angle};
}

double angle_deviation(const SingleModeParams& input, double sigma) {
    return reconstruct_single(input, sigma, FramePolicy::unknown()).angle_deviation;
}

FrameAveraged frame_averaged_metrics(double nbar, double r, double sigma, int grid_size) {
    if (grid_size < 4)
        throw std::invalid_argument("frame_averaged_metrics: grid_size must be >= 4");
    FrameAveraged acc;
    for (int j = 0; j < grid_size; ++j) {
        const SingleModeParams input(nbar, r, j * kPi / grid_size);
        const ReconResult1 rec = reconstruct_single(input, sigma, FramePolicy::unknown());
        acc.fidelity += fidelity1(cov_from_params1(input), cov_from_params1(rec.params));
        acc.r_nc += nonclassical_squeezing(rec.params).r_nc;
    }
    acc.fidelity /= grid_size;
    acc.r_nc /= grid_size;
    return acc;
}

FrameAveragedTwo frame_averaged_metrics_two(double nbar, double r, double sigma,
                                            int grid_size) {
    if (grid_size < 4)
        throw std::invalid_argument("frame_averaged_metrics_two: grid_size must be >= 4");
    FrameAveragedTwo acc;
    for (int j = 0; j < grid_size; ++j) {
        const TwoModeParams input(nbar, nbar, r, j * 2.0 * kPi / grid_size);
        const ReconResult2 rec = reconstruct_two(input, sigma, FramePolicy::unknown());
        acc.fidelity +=
            fidelity2(cov_from_params2(input), cov_from_params2(rec.params)).value;
        acc.log_negativity += log_negativity(rec.params);
    }
    acc.fidelity /= grid_size;
    acc.log_negativity /= grid_size;
    return acc;
}

}  // namespace cgtomo
