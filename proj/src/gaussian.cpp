#include "cgtomo/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

namespace cgtomo {

namespace {
constexpr double kSymmetryTol = 1e-12;
constexpr double kPhysicalTol = 1e-10;
constexpr double kDegenerateTol = 1e-12;
constexpr double kTmstFormTol = 1e-9;
}  // namespace

SingleModeParams::SingleModeParams(double nbar_, double r_, double phi_)
    : nbar(nbar_), r(r_), phi(wrap_pi(phi_)) {
    if (!(nbar >= 0.0)) throw std::invalid_argument("SingleModeParams: nbar must be >= 0");
    if (!(r >= 0.0)) throw std::invalid_argument("SingleModeParams: r must be >= 0");
}

TwoModeParams::TwoModeParams(double nbar1_, double nbar2_, double r_, double phi_)
    : nbar1(nbar1_), nbar2(nbar2_), r(r_), phi(wrap_2pi(phi_)) {
    if (!(nbar1 >= 0.0) || !(nbar2 >= 0.0))
        throw std::invalid_argument("TwoModeParams: thermal numbers must be >= 0");
    if (!(r >= 0.0)) throw std::invalid_argument("TwoModeParams: r must be >= 0");
}

CovMatrix::CovMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4))
        throw DimensionError("CovMatrix: expected a 2x2 or 4x4 matrix");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol)
        throw std::invalid_argument("CovMatrix: matrix is not symmetric");
    mat_ = 0.5 * (m + m.transpose());
}

Eigen::MatrixXd symplectic_form(int nmodes) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * nmodes, 2 * nmodes);
    for (int i = 0; i < nmodes; ++i) {
        j(2 * i, 2 * i + 1) = 1.0;
        j(2 * i + 1, 2 * i) = -1.0;
    }
    return j;
}

SymplecticReport is_physical(const CovMatrix& g) {
    const int n = g.modes();
    const Eigen::MatrixXd jg = symplectic_form(n) * g.mat();
    Eigen::EigenSolver<Eigen::MatrixXd> es(jg, /*computeEigenvectors=*/false);
    std::vector<double> nu;
    nu.reserve(2 * n);
    for (int i = 0; i < 2 * n; ++i) nu.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(nu.begin(), nu.end());
    // Eigenvalues of J*G come in +-i*nu pairs; keep one per mode.
    SymplecticReport rep;
    for (int i = 0; i < n; ++i) rep.eigenvalues.push_back(0.5 * (nu[2 * i] + nu[2 * i + 1]));
    rep.physical = rep.eigenvalues.front() >= 0.5 - kPhysicalTol;
    return rep;
}

CovMatrix cov_from_params1(const SingleModeParams& p) {
    const double k = p.nbar + 0.5;
    const double ch = std::cosh(2.0 * p.r);
    const double sh = std::sinh(2.0 * p.r);
    Eigen::Matrix2d g;
    g(0, 0) = k * (ch - sh * std::cos(2.0 * p.phi));
    g(1, 1) = k * (ch + sh * std::cos(2.0 * p.phi));
    g(0, 1) = g(1, 0) = -k * sh * std::sin(2.0 * p.phi);
    return CovMatrix(g);
}

SingleModeInversion params_from_cov1(const CovMatrix& g) {
    if (g.dim() != 2) throw DimensionError("params_from_cov1: expected a 2x2 matrix");
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
    if (det < 0.25 - kPhysicalTol)
        throw NonPhysicalError("params_from_cov1: det(G) < 1/4");
    const double gamma = (g(1, 1) - g(0, 0)) * (g(1, 1) - g(0, 0)) + 4.0 * g(0, 1) * g(0, 1);

    SingleModeInversion out;
    const double nbar = std::max(0.0, std::sqrt(det) - 0.5);
    const double r = 0.5 * std::asinh(0.5 * std::sqrt(gamma / det));
    double phi = 0.0;
    if (gamma < kDegenerateTol) {
        out.degenerate_angle = true;
    } else {
        // atan2 form of the two-branch arcsin rule: both resolve
        // 2*phi from (cos, sin) = (G22-G11, -2 G12)/sqrt(gamma).
        phi = wrap_pi(0.5 * std::atan2(-2.0 * g(0, 1), g(1, 1) - g(0, 0)));
    }
    out.params = SingleModeParams(nbar, r, phi);
    return out;
}

CovMatrix cov_from_params2(const TwoModeParams& p) {
    const double ch2 = std::cosh(p.r) * std::cosh(p.r);
    const double sh2 = std::sinh(p.r) * std::sinh(p.r);
    const double a = p.nbar1 * ch2 + p.nbar2 * sh2 + 0.5 * std::cosh(2.0 * p.r);
    const double b = p.nbar1 * sh2 + p.nbar2 * ch2 + 0.5 * std::cosh(2.0 * p.r);
    const std::complex<double> c =
        -0.5 * (p.nbar1 + p.nbar2 + 1.0) * std::polar(1.0, p.phi) * std::sinh(2.0 * p.r);
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g(0, 0) = g(1, 1) = a;
    g(2, 2) = g(3, 3) = b;
    g(0, 2) = g(2, 0) = c.real();
    g(0, 3) = g(3, 0) = c.imag();
    g(1, 2) = g(2, 1) = c.imag();
    g(1, 3) = g(3, 1) = -c.real();
    return CovMatrix(g);
}

TwoModeInversion params_from_cov2(const CovMatrix& g) {
    if (g.dim() != 4) throw DimensionError("params_from_cov2: expected a 4x4 matrix");
    const double scale = std::max(1.0, g.mat().cwiseAbs().maxCoeff());
    const double tol = kTmstFormTol * scale;
    const double dev = std::max({std::abs(g(0, 0) - g(1, 1)), std::abs(g(2, 2) - g(3, 3)),
                                 std::abs(g(0, 1)), std::abs(g(2, 3)),
                                 std::abs(g(0, 2) + g(1, 3)), std::abs(g(0, 3) - g(1, 2))});
    if (dev > tol)
        throw NotTmstFormError("params_from_cov2: matrix lacks the TMST structure");

    const double a = 0.5 * (g(0, 0) + g(1, 1));
    const double b = 0.5 * (g(2, 2) + g(3, 3));
    const double re_c = 0.5 * (g(0, 2) - g(1, 3));
    const double im_c = 0.5 * (g(0, 3) + g(1, 2));
    const double abs_c = std::hypot(re_c, im_c);

    const SymplecticReport rep = is_physical(g);
    if (!rep.physical) throw NonPhysicalError("params_from_cov2: below the vacuum bound");

    const double gp = (a + b) * (a + b) - 4.0 * abs_c * abs_c;
    const double sq = std::sqrt(gp);
    TwoModeInversion out;
    const double n1 = std::max(0.0, 0.5 * ((a - b) - 1.0 + sq));
    const double n2 = std::max(0.0, 0.5 * ((b - a) - 1.0 + sq));
    const double r = 0.5 * std::asinh(2.0 * abs_c / sq);
    double phi = 0.0;
    if (abs_c < kDegenerateTol) {
        out.degenerate_angle = true;
    } else {
        // c = -|c| e^{i phi}: recover phi from the reversed components.
        phi = wrap_2pi(std::atan2(-im_c, -re_c));
    }
    out.params = TwoModeParams(n1, n2, r, phi);
    return out;
}

GaussianMarginal homodyne_marginal1(const SingleModeParams& p, double phi_lo) {
    const double k = p.nbar + 0.5;
    const double two_var =
        k * (std::cosh(2.0 * p.r) - std::sinh(2.0 * p.r) * std::cos(2.0 * phi_lo - 2.0 * p.phi));
    return GaussianMarginal{0.0, 0.5 * two_var};
}

BivariateMarginal homodyne_joint2(const TwoModeParams& p, double phi1, double phi2) {
    const CovMatrix g = cov_from_params2(p);
    Eigen::Matrix<double, 2, 4> proj = Eigen::Matrix<double, 2, 4>::Zero();
    proj(0, 0) = std::cos(phi1);
    proj(0, 1) = std::sin(phi1);
    proj(1, 2) = std::cos(phi2);
    proj(1, 3) = std::sin(phi2);
    BivariateMarginal out;
    out.cov = 0.5 * proj * g.mat() * proj.transpose();
    return out;
}

double quadrature_variance(const CovMatrix& g, double theta) {
    if (g.dim() != 2) throw DimensionError("quadrature_variance: expected a 2x2 matrix");
    const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    return 0.5 * u.dot(g.mat() * u);
}

Eigen::Matrix2d rotate_cov1(const Eigen::Matrix2d& g, double theta) {
    Eigen::Matrix2d rot;
    rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return rot * g * rot.transpose();
}

}  // namespace cgtomo
