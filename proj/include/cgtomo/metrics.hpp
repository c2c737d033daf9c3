#pragma once

#include "cgtomo/gaussian.hpp"

namespace cgtomo {

/// Uhlmann fidelity between zero-mean single-mode Gaussian states:
/// F^2 = 1 / (sqrt(D + L) - sqrt(L)), D = det(G1+G2),
/// L = 4 det(G1 + iJ/2) det(G2 + iJ/2) = 4 (det G1 - 1/4)(det G2 - 1/4).
double fidelity1(const CovMatrix& g1, const CovMatrix& g2);

struct TwoModeFidelity {
    double value = 0.0;
    bool clamped_radicand = false;  // inner square root hit a tiny negative
};

/// Fidelity between zero-mean two-mode Gaussian states.
TwoModeFidelity fidelity2(const CovMatrix& g1, const CovMatrix& g2);

/// Squeezing threshold for nonclassicality: r_c = ln(2 nbar + 1) / 2.
double critical_squeezing(double nbar);

struct Nonclassicality {
    double r_nc = 0.0;                  // max(0, r - r_c)
    double entanglement_potential = 0.0;  // r_nc / ln 2
};

Nonclassicality nonclassical_squeezing(const SingleModeParams& p);

struct PtSpectrum {
    double nu_minus = 0.0;
    double nu_plus = 0.0;
};

/// Symplectic spectrum of the partially transposed covariance matrix
/// (momentum sign flip on mode 2), generic eigenvalue path.
PtSpectrum symplectic_eigs_pt(const CovMatrix& g);

/// Closed form for two-mode squeezed thermal states:
/// 2 nu-^2 = f - sqrt(f^2 - 4 g^2), f = a^2 + b^2 + 2|c|^2, g = ab - |c|^2.
PtSpectrum symplectic_eigs_pt_tmst(const TwoModeParams& p);

/// Logarithmic negativity E_N = max(0, -log2(2 nu-)) via the closed form.
double log_negativity(const TwoModeParams& p);

}  // namespace cgtomo
