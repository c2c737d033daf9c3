#pragma once

#include <complex>
#include <span>

#include "cgtomo/gaussian.hpp"

namespace cgtomo {

/// Gaussian reservoir: mean thermal photon number N and complex squeezing M.
/// Physicality requires |M|^2 <= N(N+1).
struct ReservoirParams {
    double N = 0.0;
    std::complex<double> M{0.0, 0.0};

    ReservoirParams() = default;
    ReservoirParams(double N_, std::complex<double> M_);
};

/// Reservoir whose covariance equals that of a squeezed thermal state
/// (nbar, r) with squeezing axis at angle phi.
ReservoirParams reservoir_from_squeezed_thermal(double nbar, double r, double phi = 0.0);

/// 2x2 reservoir covariance [[1/2+N+Re M, Im M], [Im M, 1/2+N-Re M]].
CovMatrix reservoir_cov(const ReservoirParams& res);

/// Exact reservoir evolution G(t) = sqrt(G)(G0 - Gr)sqrt(G) + Gr with
/// G = (+) exp(-gamma_i t) per mode. One reservoir and one gamma*t per mode.
CovMatrix evolve_cov(const CovMatrix& g0, std::span<const ReservoirParams> reservoirs,
                     std::span<const double> gamma_t);

enum class MixingClass { InRange, AboveOne, BelowZero };

struct MixingFraction {
    double y = 0.0;
    MixingClass cls = MixingClass::InRange;
};

/// Fraction y solving the convex-sum decoherence form for a squeezed thermal
/// reservoir (nbar_r, r_r):
///   y = [(2ne+1)sinh 2re - (2nr+1)sinh 2rr] / [(2ni+1)sinh 2ri - (2nr+1)sinh 2rr].
/// Unclamped; classification records whether y lies in [0, 1].
MixingFraction mixing_fraction(const SingleModeParams& estimated,
                               const SingleModeParams& input, double nbar_r, double r_r);

/// Thermal-reservoir specialization: y = (2ne+1)sinh 2re / [(2ni+1)sinh 2ri].
MixingFraction mixing_fraction_isotropic(const SingleModeParams& estimated,
                                         const SingleModeParams& input);

/// Smallest reservoir squeezing admitting a solution y in [0, 1]:
/// the boundary of sinh 2rr > (2ne+1)sinh(2re)/(2nr+1).
double min_reservoir_squeezing(const SingleModeParams& estimated, double nbar_r);

}  // namespace cgtomo
