#include "cgtomo/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cgtomo {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(d2);
}

}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const NelderMeadOptions& opts) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> verts(n + 1, x0);
    for (size_t i = 0; i < n; ++i) verts[i + 1][i] += opts.step;
    std::vector<double> vals(n + 1);
    for (size_t i = 0; i <= n; ++i) vals[i] = f(verts[i]);

    std::vector<size_t> order(n + 1);
    NelderMeadResult res;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return vals[a] < vals[b]; });
        const size_t best = order[0], worst = order[n], second = order[n - 1];

        double diameter = 0.0;
        for (size_t i = 0; i <= n; ++i)
            diameter = std::max(diameter, distance(verts[i], verts[best]));
        if (diameter < opts.tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (size_t k = 0; k < n; ++k) centroid[k] += verts[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + t * (centroid[k] - verts[worst][k]);
            return p;
        };

        const std::vector<double> refl = blend(1.0);
        const double f_refl = f(refl);
        if (f_refl < vals[best]) {
            const std::vector<double> exp_pt = blend(2.0);
            const double f_exp = f(exp_pt);
            if (f_exp < f_refl) {
                verts[worst] = exp_pt;
                vals[worst] = f_exp;
            } else {
                verts[worst] = refl;
                vals[worst] = f_refl;
            }
        } else if (f_refl < vals[second]) {
            verts[worst] = refl;
            vals[worst] = f_refl;
        } else {
            const bool outside = f_refl < vals[worst];
            const std::vector<double> contr = blend(outside ? 0.5 : -0.5);
            const double f_contr = f(contr);
            if (f_contr < (outside ? f_refl : vals[worst])) {
                verts[worst] = contr;
                vals[worst] = f_contr;
            } else {
                for (size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (size_t k = 0; k < n; ++k)
                        verts[i][k] = verts[best][k] + 0.5 * (verts[i][k] - verts[best][k]);
                    vals[i] = f(verts[i]);
                }
            }
        }
    }

    const size_t best =
        std::distance(vals.begin(), std::min_element(vals.begin(), vals.end()));
    res.x = verts[best];
    res.value = vals[best];
    res.iterations = iter;
    return res;
}

}  // namespace cgtomo
