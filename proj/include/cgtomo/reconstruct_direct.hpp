#pragma once

#include "cgtomo/coarse_grain.hpp"
#include "cgtomo/gaussian.hpp"

namespace cgtomo {

/// Measurement-frame policy for the direct reconstruction.
/// Known: the three measurement angles are {offset, offset+pi/4, offset+pi/2};
/// aligning offset with the input squeezing axis is the informed choice.
/// Unknown: angles stay at {0, pi/4, pi/2}; figure pipelines average results
/// over a grid of input angles of the given size.
struct FramePolicy {
    enum class Mode { Known, Unknown };

    Mode mode = Mode::Unknown;
    double offset = 0.0;
    int grid_size = 36;

    static FramePolicy known(double offset_angle) {
        return FramePolicy{Mode::Known, offset_angle, 1};
    }
    static FramePolicy unknown(int grid = 36) {
        if (grid < 1) throw std::invalid_argument("FramePolicy: grid_size must be >= 1");
        return FramePolicy{Mode::Unknown, 0.0, grid};
    }
};

struct ReconResult1 {
    SingleModeParams params;
    CovMatrix cov;                // lab-frame reconstructed covariance
    double angle_deviation = 0.0; // |estimated phi - input phi| in (-pi/2, pi/2]
    bool nonphysical = false;
    bool degenerate_angle = false;
};

struct ReconResult2 {
    TwoModeParams params;
    CovMatrix cov;
    double angle_deviation = 0.0;
    bool nonphysical = false;
    bool degenerate_angle = false;
};

/// Direct covariance reconstruction from the coarse-grained moments of three
/// quadrature marginals, then parameter inversion.
ReconResult1 reconstruct_single(const SingleModeParams& input, double sigma,
                                const FramePolicy& frame);

/// Two-mode version: local blocks from three angles per mode, correlation
/// block from the four joint angle pairs, projection onto the TMST form.
ReconResult2 reconstruct_two(const TwoModeParams& input, double sigma,
                             const FramePolicy& frame);

/// Squeezing-axis rotation of the frame-ignorant reconstruction.
double angle_deviation(const SingleModeParams& input, double sigma);

struct FrameAveraged {
    double fidelity = 0.0;
    double r_nc = 0.0;
};

/// Fidelity and nonclassical squeezing of the frame-ignorant reconstruction,
/// averaged over a uniform grid of input squeezing angles in [0, pi).
FrameAveraged frame_averaged_metrics(double nbar, double r, double sigma, int grid_size);

struct FrameAveragedTwo {
    double fidelity = 0.0;
    double log_negativity = 0.0;
};

/// Two-mode analogue: average over the two-mode squeezing phase in [0, 2pi).
FrameAveragedTwo frame_averaged_metrics_two(double nbar, double r, double sigma,
                                            int grid_size);

}  // namespace cgtomo
