#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bsdist/linalg.hpp"

namespace bsdist {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead simplex minimizer. Robust default for the low-dimensional
// profile likelihoods in this library.
inline OptimResult nelder_mead(const ObjectiveFn& f, std::vector<double> x0,
                               double xtol = 1e-10, double ftol = 1e-12,
                               int max_iter = 20000, double initial_step = 0.05) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double step = initial_step * std::max(1.0, std::fabs(x0[i]));
        pts[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    OptimResult out;
    int it = 0;
    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> f2;
        for (auto i : idx) { p2.push_back(pts[i]); f2.push_back(fv[i]); }
        pts.swap(p2); fv.swap(f2);
    };
    order();
    for (; it < max_iter; ++it) {
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::fabs(pts[n][i] - pts[0][i]) / std::max(1.0, std::fabs(pts[0][i])));
        if (spread < xtol && std::fabs(fv[n] - fv[0]) < ftol * (std::fabs(fv[0]) + ftol)) {
            out.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);
        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (centroid[j] - pts[n][j]);
            return p;
        };
        auto xr = blend(1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            auto xe = blend(2.0);
            double fe = f(xe);
            if (fe < fr) { pts[n] = xe; fv[n] = fe; } else { pts[n] = xr; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr; fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? 0.5 : -0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc; fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) pts[i][j] = 0.5 * (pts[i][j] + pts[0][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    out.x = pts[0];
    out.value = fv[0];
    out.iterations = it;
    return out;
}

inline std::vector<double> numerical_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                              double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = h * std::max(1.0, std::fabs(x[i]));
        auto xp = x, xm = x;
        xp[i] += hi;
        xm[i] -= hi;
        g[i] = (f(xp) - f(xm)) / (2.0 * hi);
    }
    return g;
}

inline Matrix numerical_hessian(const ObjectiveFn& f, const std::vector<double>& x,
                                double h = 1e-5) {
    const std::size_t n = x.size();
    Matrix H(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double hi = h * std::max(1.0, std::fabs(x[i]));
            const double hj = h * std::max(1.0, std::fabs(x[j]));
            auto xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += hi; xpp[j] += hj;
            xpm[i] += hi; xpm[j] -= hj;
            xmp[i] -= hi; xmp[j] += hj;
            xmm[i] -= hi; xmm[j] -= hj;
            H(i, j) = H(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hi * hj);
        }
    }
    return H;
}

// BFGS with numerical gradients and backtracking line search.
inline OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0,
                                 double gtol = 1e-8, int max_iter = 500) {
    const std::size_t n = x0.size();
    Matrix Hinv = Matrix::identity(n);
    std::vector<double> x = std::move(x0);
    double fx = f(x);
    std::vector<double> g = numerical_gradient(f, x);
    OptimResult out;
    for (int it = 0; it < max_iter; ++it) {
        double gnorm = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
        if (gnorm < gtol) {
            out.converged = true;
            out.iterations = it;
            break;
        }
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= Hinv(i, j) * g[j];
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += d[i] * g[i];
        if (slope >= 0.0) {  // reset on loss of descent direction
            Hinv = Matrix::identity(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += d[i] * g[i];
        }
        double step = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
            fn = f(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) { ok = true; break; }
            step *= 0.5;
        }
        if (!ok) {
            out.iterations = it;
            break;
        }
        auto gn = numerical_gradient(f, xn);
        std::vector<double> s(n), y(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-14) {
            // BFGS inverse update
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += Hinv(i, j) * y[j];
            double yHy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yHy += y[i] * Hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    Hinv(i, j) += ((sy + yHy) * s[i] * s[j]) / (sy * sy) -
                                  (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
        }
        x = xn;
        fx = fn;
        g = gn;
        out.iterations = it + 1;
    }
    out.x = x;
    out.value = fx;
    if (!out.converged) {
        double gnorm = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
        out.converged = gnorm < 100 * gtol;
    }
    return out;
}

}  // namespace bsdist
