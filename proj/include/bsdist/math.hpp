#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

namespace bsdist {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811045253;

// ---------------------------------------------------------------------------
// Standard normal density, CDF, survival and quantile.
// ---------------------------------------------------------------------------

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// 1 - Phi(x) without cancellation in the upper tail.
inline double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// phi(x) / (1 - Phi(x)); smooth far into the tail where both factors underflow.
inline double mills_hazard(double x) {
    if (x < 30.0) return norm_pdf(x) / norm_sf(x);
    const double x2 = x * x;
    return x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2));
}

// Wichura's AS241 (PPND16); relative error below 1e-15 on (0,1).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
               4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
               4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
               2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
               5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
               5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -v : v;
}

// ---------------------------------------------------------------------------
// Root finding: safeguarded bisection/secant on a sign-changing bracket.
// ---------------------------------------------------------------------------

struct RootBracket {
    double lo;
    double hi;
    double tol = 1e-10;
    int max_iter = 200;
};

template <class F>
inline double solve_root(const F& f, RootBracket br) {
    if (!(br.lo < br.hi)) throw std::invalid_argument("solve_root: empty bracket");
    double a = br.lo, b = br.hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("solve_root: no sign change on bracket");
    for (int it = 0; it < br.max_iter; ++it) {
        // secant proposal, clipped into the open bracket
        double m = 0.5 * (a + b);
        double x = m;
        const double denom = fb - fa;
        if (denom != 0.0) {
            const double s = b - fb * (b - a) / denom;
            if (s > a && s < b) x = s;
        }
        // keep a minimum bisection share so the bracket provably shrinks
        if (std::fabs(x - a) < 0.01 * (b - a) || std::fabs(b - x) < 0.01 * (b - a)) x = m;
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fa * fx < 0.0) { b = x; fb = fx; } else { a = x; fa = fx; }
        if (b - a <= br.tol * std::max(1.0, std::fabs(a))) return 0.5 * (a + b);
    }
    throw std::runtime_error("solve_root: max iterations exceeded");
}

// Expands [lo, hi] geometrically until f changes sign, then solves.
template <class F>
inline double solve_root_expand(const F& f, double lo, double hi,
                                double tol = 1e-12, int max_expand = 200) {
    double flo = f(lo), fhi = f(hi);
    int k = 0;
    while (flo * fhi > 0.0 && k++ < max_expand) {
        hi *= 2.0;
        fhi = f(hi);
    }
    if (flo * fhi > 0.0) throw std::runtime_error("solve_root_expand: no sign change found");
    return solve_root(f, RootBracket{lo, hi, tol, 400});
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7-15 quadrature.
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 18;
};

namespace detail {

inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGK15WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGK15WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fk[15];
    for (int i = 0; i < 7; ++i) {
        fk[i] = f(c - h * kGK15Nodes[i]);
        fk[14 - i] = f(c + h * kGK15Nodes[i]);
    }
    fk[7] = f(c);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 7; ++i) resk += kGK15WK[i] * (fk[i] + fk[14 - i]);
    resk += kGK15WK[7] * fk[7];
    for (int i = 0; i < 3; ++i) resg += kGK15WG[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
    resg += kGK15WG[3] * fk[7];
    result = resk * h;
    err = std::fabs((resk - resg) * h);
}

template <class F>
inline double adapt(const F& f, double a, double b, double tol, int depth, int max_depth) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= tol || depth >= max_depth) return r;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

template <class F>
inline double integrate(const F& f, double a, double b, QuadratureSpec spec = {}) {
    double r, e;
    detail::gk15(f, a, b, r, e);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(r));
    if (e <= tol) return r;
    return detail::adapt(f, a, b, tol, 0, spec.max_depth);
}

// Integral over (0, inf) through x = t/(1-t).
template <class F>
inline double integrate_semi_infinite(const F& f, QuadratureSpec spec = {}) {
    return integrate(
        [&f](double t) {
            const double om = 1.0 - t;
            const double x = t / om;
            return f(x) / (om * om);
        },
        0.0, 1.0, spec);
}

// E[g(Z)] for Z ~ N(0,1), integrating the effective support.
template <class F>
inline double normal_expectation(const F& g, QuadratureSpec spec = {}, double zmax = 10.0) {
    return integrate([&g](double z) { return g(z) * norm_pdf(z); }, -zmax, zmax, spec);
}

// ---------------------------------------------------------------------------
// Modified Bessel function of the third kind, via its integral representation
// K_l(w) = (1/2)(w/2)^l Int_0^inf y^{-l-1} exp(-y - w^2/(4y)) dy  (y = e^u).
// ---------------------------------------------------------------------------

inline double bessel_k(double lambda, double w) {
    if (!(w > 0.0)) throw std::domain_error("bessel_k: w must be positive");
    const double w2 = 0.25 * w * w;
    const auto integrand = [&](double u) {
        const double eu = std::exp(u);
        return std::exp(-lambda * u - eu - w2 / eu);
    };
    const double v = integrate(integrand, -45.0, 45.0, QuadratureSpec{1e-16, 1e-13, 20});
    return 0.5 * std::pow(0.5 * w, lambda) * v;
}

}  // namespace bsdist
