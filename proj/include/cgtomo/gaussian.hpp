#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cgtomo/angles.hpp"
#include "cgtomo/errors.hpp"

namespace cgtomo {

/// Zero-mean squeezed thermal state: thermal occupation nbar, squeezing
/// strength r along the axis at angle phi (phi enters only through 2*phi,
/// so it is kept in [0, pi)).
struct SingleModeParams {
    double nbar = 0.0;
    double r = 0.0;
    double phi = 0.0;

    SingleModeParams() = default;
    SingleModeParams(double nbar_, double r_, double phi_);
};

/// Two-mode squeezed thermal state: thermal occupations nbar1, nbar2,
/// two-mode squeezing strength r and phase phi in [0, 2*pi).
struct TwoModeParams {
    double nbar1 = 0.0;
    double nbar2 = 0.0;
    double r = 0.0;
    double phi = 0.0;

    TwoModeParams() = default;
    TwoModeParams(double nbar1_, double nbar2_, double r_, double phi_);
};

/// Real symmetric covariance matrix of (q1, p1, ...) quadratures in the
/// convention where the vacuum is (1/2) * Identity. Dim is 2 or 4.
class CovMatrix {
public:
    explicit CovMatrix(const Eigen::MatrixXd& m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    int modes() const { return dim() / 2; }
    const Eigen::MatrixXd& mat() const { return mat_; }
    double operator()(int i, int j) const { return mat_(i, j); }

private:
    Eigen::MatrixXd mat_;
};

/// 1D homodyne marginal: Gaussian in x_phi with the given mean and variance.
/// Coherent-state variance is 1/4 in these units.
struct GaussianMarginal {
    double mean = 0.0;
    double variance = 0.25;
};

/// Joint distribution of two quadratures (one per mode): zero-mean (by
/// default) bivariate Gaussian with positive-definite 2x2 covariance.
struct BivariateMarginal {
    double mean_x = 0.0;
    double mean_y = 0.0;
    Eigen::Matrix2d cov = 0.25 * Eigen::Matrix2d::Identity();
};

struct SymplecticReport {
    bool physical = false;
    std::vector<double> eigenvalues;  // ascending, one per mode
};

struct SingleModeInversion {
    SingleModeParams params;
    bool degenerate_angle = false;  // isotropic state, angle undefined
};

struct TwoModeInversion {
    TwoModeParams params;
    bool degenerate_angle = false;  // |c| = 0, phase undefined
};

/// Block-diagonal symplectic form, [[0,1],[-1,0]] per mode.
Eigen::MatrixXd symplectic_form(int nmodes);

/// Symplectic spectrum (|eigenvalues of i*J*G|) and the physicality test
/// nu_k >= 1/2 - 1e-10 for all k.
SymplecticReport is_physical(const CovMatrix& g);

/// 2x2 covariance matrix of a squeezed thermal state:
///   G11 = (nbar+1/2)(cosh 2r - sinh 2r cos 2phi)
///   G22 = (nbar+1/2)(cosh 2r + sinh 2r cos 2phi)
///   G12 = -(nbar+1/2) sinh 2r sin 2phi
CovMatrix cov_from_params1(const SingleModeParams& p);

/// Invert cov_from_params1: nbar = sqrt(det G) - 1/2,
/// r = arcsinh(sqrt(gamma/det G)/2)/2 with gamma = (G22-G11)^2 + 4 G12^2,
/// and the two-branch angle rule on G11 vs G22.
/// Throws NonPhysicalError when det G < 1/4 - 1e-10.
SingleModeInversion params_from_cov1(const CovMatrix& g);

/// 4x4 covariance matrix of a two-mode squeezed thermal state, blocks
/// a*I, b*I and the correlation block [[Re c, Im c], [Im c, -Re c]] with
/// c = -(nbar1+nbar2+1) exp(i phi) sinh(2r) / 2.
CovMatrix cov_from_params2(const TwoModeParams& p);

/// Invert cov_from_params2. Requires the matrix to have the two-mode
/// squeezed thermal structure (throws NotTmstFormError otherwise) and to be
/// physical (throws NonPhysicalError).
TwoModeInversion params_from_cov2(const CovMatrix& g);

/// Homodyne marginal of a squeezed thermal state at local-oscillator phase
/// phi_lo: zero mean, 2*Var = (nbar+1/2)[cosh 2r - sinh 2r cos(2phi_lo - 2phi)].
GaussianMarginal homodyne_marginal1(const SingleModeParams& p, double phi_lo);

/// Joint homodyne marginal of a two-mode squeezed thermal state at phases
/// (phi1, phi2): the 4x4 covariance projected onto the quadrature pair.
BivariateMarginal homodyne_joint2(const TwoModeParams& p, double phi1, double phi2);

/// Variance of the quadrature X_theta for a state with covariance g (2x2):
/// Var = u^T G u / 2 with u = (cos theta, sin theta).
double quadrature_variance(const CovMatrix& g, double theta);

/// Rotate a single-mode covariance into the frame whose q axis points along
/// `theta`: G' = R G R^T with R = [[cos, sin], [-sin, cos]].
Eigen::Matrix2d rotate_cov1(const Eigen::Matrix2d& g, double theta);

}  // namespace cgtomo
