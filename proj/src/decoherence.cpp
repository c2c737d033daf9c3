#include "cgtomo/decoherence.hpp"

#include <cmath>

namespace cgtomo {

namespace {
constexpr double kReservoirTol = 1e-12;

double y_combo(const SingleModeParams& p) {
    return (2.0 * p.nbar + 1.0) * std::sinh(2.0 * p.r);
}

MixingClass classify(double y) {
    if (y > 1.0) return MixingClass::AboveOne;
    if (y < 0.0) return MixingClass::BelowZero;
    return MixingClass::InRange;
}
}  // namespace

ReservoirParams::ReservoirParams(double N_, std::complex<double> M_) : N(N_), M(M_) {
    if (!(N >= 0.0)) throw UnphysicalReservoirError("ReservoirParams: N must be >= 0");
    if (std::norm(M) > N * (N + 1.0) + kReservoirTol)
        throw UnphysicalReservoirError("ReservoirParams: |M|^2 exceeds N(N+1)");
}

ReservoirParams reservoir_from_squeezed_thermal(double nbar, double r, double phi) {
    const double k = nbar + 0.5;
    const double n = k * std::cosh(2.0 * r) - 0.5;
    const std::complex<double> m =
        -k * std::sinh(2.0 * r) * std::polar(1.0, 2.0 * phi);
    return ReservoirParams(n, m);
}

CovMatrix reservoir_cov(const ReservoirParams& res) {
    Eigen::Matrix2d g;
    g(0, 0) = 0.5 + res.N + res.M.real();
    g(1, 1) = 0.5 + res.N - res.M.real();
    g(0, 1) = g(1, 0) = res.M.imag();
    return CovMatrix(g);
}

CovMatrix evolve_cov(const CovMatrix& g0, std::span<const ReservoirParams> reservoirs,
                     std::span<const double> gamma_t) {
    const int n = g0.modes();
    if (static_cast<int>(reservoirs.size()) != n || static_cast<int>(gamma_t.size()) != n)
        throw DimensionError("evolve_cov: need one reservoir and one gamma*t per mode");

    Eigen::MatrixXd sqrt_g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::MatrixXd gr = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        if (!(gamma_t[i] >= 0.0)) throw std::invalid_argument("evolve_cov: gamma*t must be >= 0");
        const double s = std::exp(-0.5 * gamma_t[i]);
        sqrt_g(2 * i, 2 * i) = sqrt_g(2 * i + 1, 2 * i + 1) = s;
        gr.block<2, 2>(2 * i, 2 * i) = reservoir_cov(reservoirs[i]).mat();
    }
    const Eigen::MatrixXd out = sqrt_g * (g0.mat() - gr) * sqrt_g + gr;
    return CovMatrix(out);
}

MixingFraction mixing_fraction(const SingleModeParams& estimated,
                               const SingleModeParams& input, double nbar_r, double r_r) {
    const double res = (2.0 * nbar_r + 1.0) * std::sinh(2.0 * r_r);
    const double den = y_combo(input) - res;
    if (std::abs(den) < 1e-12)
        throw DegenerateDenominatorError("mixing_fraction: degenerate denominator");
    const double y = (y_combo(estimated) - res) / den;
    return MixingFraction{y, classify(y)};
}

MixingFraction mixing_fraction_isotropic(const SingleModeParams& estimated,
                                         const SingleModeParams& input) {
    return mixing_fraction(estimated, input, 0.0, 0.0);
}

double min_reservoir_squeezing(const SingleModeParams& estimated, double nbar_r) {
    if (!(nbar_r >= 0.0)) throw std::invalid_argument("min_reservoir_squeezing: nbar_r < 0");
    return 0.5 * std::asinh(y_combo(estimated) / (2.0 * nbar_r + 1.0));
}

}  // namespace cgtomo
