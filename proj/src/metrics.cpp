#include "cgtomo/metrics.hpp"

#include <cmath>
#include <complex>

namespace cgtomo {

namespace {
constexpr double kClampTol = 1e-12;

void require_physical(const CovMatrix& g, const char* who) {
    if (!is_physical(g).physical) throw NonPhysicalError(std::string(who) + ": unphysical input");
}
}  // namespace

double fidelity1(const CovMatrix& g1, const CovMatrix& g2) {
    if (g1.dim() != 2 || g2.dim() != 2) throw DimensionError("fidelity1: expected 2x2 matrices");
    require_physical(g1, "fidelity1");
    require_physical(g2, "fidelity1");
    const double delta = (g1.mat() + g2.mat()).determinant();
    double lambda = 4.0 * (g1.mat().determinant() - 0.25) * (g2.mat().determinant() - 0.25);
    lambda = std::max(lambda, 0.0);
    const double f2 = 1.0 / (std::sqrt(delta + lambda) - std::sqrt(lambda));
    double f = std::sqrt(f2);
    if (f > 1.0 && f < 1.0 + 1e-9) f = 1.0;
    return f;
}

TwoModeFidelity fidelity2(const CovMatrix& g1, const CovMatrix& g2) {
    if (g1.dim() != 4 || g2.dim() != 4) throw DimensionError("fidelity2: expected 4x4 matrices");
    require_physical(g1, "fidelity2");
    require_physical(g2, "fidelity2");
    const Eigen::MatrixXd j = symplectic_form(2);
    const std::complex<double> half_i(0.0, 0.5);
    const Eigen::Matrix4cd jc = j.cast<std::complex<double>>();

    const double delta = (g1.mat() + g2.mat()).determinant();
    const double d1 = (g1.mat().cast<std::complex<double>>() + half_i * jc).determinant().real();
    const double d2 = (g2.mat().cast<std::complex<double>>() + half_i * jc).determinant().real();
    double lambda = std::max(16.0 * d1 * d2, 0.0);
    double sigma =
        std::max(16.0 * (j * g1.mat() * j * g2.mat() - 0.25 * Eigen::Matrix4d::Identity())
                            .determinant(),
                 0.0);

    TwoModeFidelity out;
    const double root = std::sqrt(sigma) + std::sqrt(lambda);
    double rad = root * root - delta;
    if (rad < 0.0) {
        if (rad < -kClampTol * std::max(1.0, std::abs(delta)))
            throw NonPhysicalError("fidelity2: negative radicand beyond rounding");
        rad = 0.0;
        out.clamped_radicand = true;
    }
    const double f2 = 1.0 / (root - std::sqrt(rad));
    out.value = std::sqrt(f2);
    if (out.value > 1.0 && out.value < 1.0 + 1e-9) out.value = 1.0;
    return out;
}

double critical_squeezing(double nbar) {
    if (!(nbar >= 0.0)) throw std::invalid_argument("critical_squeezing: nbar must be >= 0");
    return 0.5 * std::log(2.0 * nbar + 1.0);
}

Nonclassicality nonclassical_squeezing(const SingleModeParams& p) {
    Nonclassicality out;
    out.r_nc = std::max(0.0, p.r - critical_squeezing(p.nbar));
    out.entanglement_potential = out.r_nc / std::log(2.0);
    return out;
}

PtSpectrum symplectic_eigs_pt(const CovMatrix& g) {
    if (g.dim() != 4) throw DimensionError("symplectic_eigs_pt: expected a 4x4 matrix");
    Eigen::Matrix4d flip = Eigen::Matrix4d::Identity();
    flip(3, 3) = -1.0;  // momentum sign flip on mode 2
    const SymplecticReport rep = is_physical(CovMatrix(flip * g.mat() * flip));
    return PtSpectrum{rep.eigenvalues[0], rep.eigenvalues[1]};
}

PtSpectrum symplectic_eigs_pt_tmst(const TwoModeParams& p) {
    const CovMatrix g = cov_from_params2(p);
    const double a = g(0, 0), b = g(2, 2);
    const double c2 = g(0, 2) * g(0, 2) + g(0, 3) * g(0, 3);
    const double f = a * a + b * b + 2.0 * c2;
    const double gg = a * b - c2;
    const double disc = std::sqrt(std::max(f * f - 4.0 * gg * gg, 0.0));
    return PtSpectrum{std::sqrt(0.5 * (f - disc)), std::sqrt(0.5 * (f + disc))};
}

double log_negativity(const TwoModeParams& p) {
    const double nu = symplectic_eigs_pt_tmst(p).nu_minus;
    return std::max(0.0, -std::log2(2.0 * nu));
}

}  // namespace cgtomo
