#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdist/math.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

struct SampleStats {
    std::size_t n = 0;
    double arith_mean = 0.0;     // s
    double harmonic_mean = 0.0;  // r
    double variance = 0.0;       // v, 1/n convention
    double median = 0.0;
    std::vector<double> sorted;

    static SampleStats from(const std::vector<double>& data) {
        if (data.empty()) throw std::invalid_argument("SampleStats: empty sample");
        SampleStats st;
        st.n = data.size();
        double s = 0.0, inv = 0.0;
        for (double t : data) {
            if (!(t > 0.0)) throw std::domain_error("SampleStats: data must be positive");
            s += t;
            inv += 1.0 / t;
        }
        st.arith_mean = s / st.n;
        st.harmonic_mean = st.n / inv;
        double v = 0.0;
        for (double t : data) v += (t - st.arith_mean) * (t - st.arith_mean);
        st.variance = v / st.n;
        st.sorted = data;
        std::sort(st.sorted.begin(), st.sorted.end());
        st.median = st.n % 2 == 1 ? st.sorted[st.n / 2]
                                  : 0.5 * (st.sorted[st.n / 2 - 1] + st.sorted[st.n / 2]);
        return st;
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0;
};

struct FitResult {
    double alpha = 0.0;
    double beta = 0.0;
    std::string method;
    std::optional<double> se_alpha;
    std::optional<double> se_beta;
    std::optional<Interval> ci_alpha;
    std::optional<Interval> ci_beta;
    int iterations = 0;
    bool converged = false;

    BsParams params() const { return BsParams(alpha, beta); }
};

// ---------------------------------------------------------------------------
// Point estimators (complete sample).
// ---------------------------------------------------------------------------

// K(x) = harmonic mean of (x + t_i).
inline double harmonic_shift(const std::vector<double>& data, double x) {
    double s = 0.0;
    for (double t : data) s += 1.0 / (x + t);
    return data.size() / s;
}

inline FitResult mle(const std::vector<double>& data) {
    const auto st = SampleStats::from(data);
    if (st.n < 2 || st.sorted.front() == st.sorted.back())
        throw std::domain_error("mle: needs n >= 2 with at least two distinct values");
    const double s = st.arith_mean, r = st.harmonic_mean;
    const auto g = [&](double b) {
        const double K = harmonic_shift(data, b);
        return b * b - b * (2.0 * r + K) + r * (s + K);
    };
    // the root is guaranteed to lie strictly between the harmonic and
    // arithmetic means
    FitResult fit;
    fit.method = "ml";
    fit.beta = solve_root(g, RootBracket{r, s, 1e-13, 400});
    // Newton polish on the quadratic-form equation
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-7 * fit.beta;
        const double d = (g(fit.beta + h) - g(fit.beta - h)) / (2.0 * h);
        if (d == 0.0) break;
        const double step = g(fit.beta) / d;
        const double next = fit.beta - step;
        if (next > r && next < s) fit.beta = next;
    }
    fit.alpha = std::sqrt(s / fit.beta + fit.beta / r - 2.0);
    fit.converged = true;
    return fit;
}

inline FitResult moment_est(const std::vector<double>& data) {
    const auto st = SampleStats::from(data);
    const double s = st.arith_mean, v = st.variance;
    if (v >= 5.0 * s * s)
        throw std::domain_error("moment_est: sample coefficient of variation >= sqrt(5)");
    FitResult fit;
    fit.method = "moment";
    const double s2 = s * s;
    const double a2 = (-2.0 * (s2 - v) + 2.0 * std::sqrt((s2 - v) * (s2 - v) + v * (5.0 * s2 - v))) /
                      (5.0 * s2 - v);
    fit.alpha = std::sqrt(a2);
    fit.beta = 2.0 * s / (a2 + 2.0);
    fit.converged = true;
    return fit;
}

inline FitResult mm_est(const std::vector<double>& data) {
    const auto st = SampleStats::from(data);
    FitResult fit;
    fit.method = "mm";
    fit.alpha = std::sqrt(2.0 * (std::sqrt(st.arith_mean / st.harmonic_mean) - 1.0));
    fit.beta = std::sqrt(st.arith_mean * st.harmonic_mean);
    fit.converged = true;
    return fit;
}

inline FitResult from_li(const std::vector<double>& data, int variant, int n1 = -1, int n2 = -1) {
    const auto st = SampleStats::from(data);
    const int n = static_cast<int>(st.n);
    FitResult fit;
    fit.method = "fl" + std::to_string(variant);
    fit.converged = true;
    switch (variant) {
        case 1: {
            double num = 0.0, den = 0.0;
            for (double t : data) {
                num += std::sqrt(t);
                den += 1.0 / std::sqrt(t);
            }
            fit.beta = num / den;
            double a2 = 0.0;
            for (double t : data) a2 += t / fit.beta + fit.beta / t - 2.0;
            fit.alpha = std::sqrt(a2 / n);
            return fit;
        }
        case 2: {
            fit.beta = st.median;
            const double v = st.variance;
            fit.alpha = std::sqrt((-2.0 + 2.0 * std::sqrt(1.0 + 5.0 * v / (fit.beta * fit.beta))) / 5.0);
            return fit;
        }
        case 3: {
            fit.beta = st.median;
            std::vector<double> a;
            for (int i = 1; i <= n; ++i) {
                const double z = norm_quantile(double(i) / (n + 1));
                if (std::fabs(z) < 1e-12) continue;  // midpoint of odd n: ratio undefined
                a.push_back(xi::value(st.sorted[i - 1] / fit.beta) / z);
            }
            std::sort(a.begin(), a.end());
            fit.alpha = a.size() % 2 == 1 ? a[a.size() / 2]
                                          : 0.5 * (a[a.size() / 2 - 1] + a[a.size() / 2]);
            return fit;
        }
        case 4: {
            if (n1 < 0) n1 = static_cast<int>(std::ceil(0.25 * n));
            if (n2 < 0) n2 = static_cast<int>(std::floor(0.75 * n));
            if (!(n1 >= 1 && n2 <= n && double(n1) / n < 0.5 && double(n2) / n > 0.5))
                throw std::domain_error("from_li: variant 4 needs n1/n < 0.5 < n2/n");
            double num = 0.0, den = 0.0, e2 = 0.0, z2 = 0.0;
            for (int i = n1; i <= n2; ++i) {
                num += std::sqrt(st.sorted[i - 1]);
                den += 1.0 / std::sqrt(st.sorted[i - 1]);
            }
            fit.beta = num / den;
            for (int i = n1; i <= n2; ++i) {
                const double e = xi::value(st.sorted[i - 1] / fit.beta);
                const double z = norm_quantile(double(i) / (n + 1));
                e2 += e * e;
                z2 += z * z;
            }
            fit.alpha = std::sqrt(e2 / z2);
            return fit;
        }
        default:
            throw std::invalid_argument("from_li: variant must be 1..4");
    }
}

struct BzEstimate {
    double alpha = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double zbar = 1.0;
};

inline BzEstimate bz_est(const std::vector<double>& data) {
    const auto st = SampleStats::from(data);
    const std::size_t n = st.n;
    if (n < 2) throw std::domain_error("bz_est: needs n >= 2");
    // mean over ordered pairs of t_i/t_j equals (sum t)(sum 1/t) - n over n(n-1)
    double sum = 0.0, sinv = 0.0;
    for (double t : data) {
        sum += t;
        sinv += 1.0 / t;
    }
    BzEstimate e;
    e.zbar = (sum * sinv - n) / (double(n) * (n - 1));
    const double root = std::sqrt(e.zbar);
    e.alpha = std::sqrt(std::max(0.0, 2.0 * (root - 1.0)));
    e.beta1 = st.arith_mean / root;
    e.beta2 = st.harmonic_mean * root;
    return e;
}

inline FitResult new_est(const std::vector<double>& data) {
    const auto st = SampleStats::from(data);
    FitResult fit;
    fit.method = "new";
    fit.beta = st.median;
    double u2 = 0.0;
    for (double t : data) {
        const double u = xi::value(t / fit.beta);
        u2 += u * u;
    }
    fit.alpha = std::sqrt(u2 / st.n);
    fit.converged = true;
    return fit;
}

enum class BiasKind { UML, UMM };

inline FitResult bias_correct(const FitResult& fit, std::size_t n, BiasKind kind) {
    if (kind == BiasKind::UML && fit.method != "ml")
        throw std::invalid_argument("bias_correct: UML requires an ML fit");
    if (kind == BiasKind::UMM && fit.method != "mm")
        throw std::invalid_argument("bias_correct: UMM requires an MM fit");
    FitResult out = fit;
    out.method = kind == BiasKind::UML ? "uml" : "umm";
    out.alpha = fit.alpha * double(n) / double(n - 1);
    out.beta = fit.beta / (1.0 + out.alpha * out.alpha / (4.0 * n));
    return out;
}

// Leave-one-out jackknife bias correction on top of any base estimator.
template <class Estimator>
inline FitResult jackknife_correct(const std::vector<double>& data, const Estimator& base) {
    const std::size_t n = data.size();
    if (n < 3) throw std::domain_error("jackknife_correct: needs n >= 3");
    const FitResult full = base(data);
    double asum = 0.0, bsum = 0.0;
    std::vector<double> loo(data.begin() + 1, data.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) loo[i - 1] = data[i - 1];
        const FitResult f = base(loo);
        asum += f.alpha;
        bsum += f.beta;
    }
    FitResult out = full;
    out.method = full.method + "+jackknife";
    out.alpha = n * full.alpha - (n - 1.0) * asum / n;
    out.beta = n * full.beta - (n - 1.0) * bsum / n;
    return out;
}

// ---------------------------------------------------------------------------
// Fisher information and asymptotics.
// ---------------------------------------------------------------------------

// h(a) = a sqrt(pi/2) - pi e^{2/a^2} (1 - Phi(2/a)); enters the (beta,beta)
// information entry. Evaluated through the scaled complementary error
// function to survive small a where e^{2/a^2} overflows.
inline double fisher_h(double alpha) {
    const double x = 2.0 / alpha;
    double tail;  // e^{x^2/2} (1 - Phi(x))
    if (x < 25.0) {
        tail = std::exp(0.5 * x * x) * norm_sf(x);
    } else {
        // Mills ratio expansion; erfc underflows past x ~ 27
        const double x2 = x * x;
        tail = (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2)) / (x * kSqrt2Pi);
    }
    return alpha * std::sqrt(kPi / 2.0) - kPi * tail;
}

// I(a) = 2 Int_0^inf {(1+g(ax))^{-1} - 1/2}^2 dPhi(x).
inline double i_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("i_alpha: alpha must be positive");
    const auto g = [](double y) { return 1.0 + 0.5 * y * y + y * std::sqrt(1.0 + 0.25 * y * y); };
    const auto f = [&](double x) {
        const double b = 1.0 / (1.0 + g(alpha * x)) - 0.5;
        return b * b * norm_pdf(x);
    };
    return 2.0 * integrate(f, 0.0, 12.0, QuadratureSpec{1e-15, 1e-12, 20});
}

inline double h1_factor(double alpha) { return 0.25 + 1.0 / (alpha * alpha) + i_alpha(alpha); }

inline double h2_factor(double alpha) {
    const double a2 = alpha * alpha;
    const double d = 1.0 + 0.5 * a2;
    return (1.0 + 0.75 * a2) / (d * d);
}

struct FisherInfo {
    double i_aa = 0.0;  // 2n/alpha^2
    double i_bb = 0.0;  // n/(alpha^2 beta^2) (1 + alpha h(alpha)/sqrt(2 pi))
    double h_alpha = 0.0;
    double i_alpha = 0.0;
};

inline FisherInfo fisher_info(const BsParams& p, std::size_t n) {
    FisherInfo fi;
    fi.h_alpha = fisher_h(p.alpha);
    fi.i_alpha = bsdist::i_alpha(p.alpha);
    fi.i_aa = 2.0 * n / (p.alpha * p.alpha);
    fi.i_bb = n / (p.alpha * p.alpha * p.beta * p.beta) *
              (1.0 + p.alpha * fi.h_alpha / kSqrt2Pi);
    return fi;
}

// ---------------------------------------------------------------------------
// Normal-theory confidence intervals.
//
// Two published constructions are provided. The ratio style divides the
// estimate by (1 -+ z * relSE); the wald style adds +- z * SE. The beta
// relative SE is 1/sqrt(n h1(alpha)) under the ratio style and
// sqrt(alpha h2(alpha)/n) under the wald style.
// ---------------------------------------------------------------------------

enum class CiStyle { Ratio, Wald };

struct CiPair {
    Interval alpha;
    Interval beta;
};

inline CiPair asymp_ci(const FitResult& fit, std::size_t n, double level,
                       CiStyle style = CiStyle::Ratio) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("asymp_ci: level must lie in (0,1)");
    const double z = norm_quantile(0.5 + 0.5 * level);
    const bool corrected = fit.method == "uml" || fit.method == "umm";
    const double rel_a =
        corrected ? z * double(n) / ((n - 1.0) * std::sqrt(2.0 * n)) : z / std::sqrt(2.0 * n);
    CiPair out;
    if (style == CiStyle::Ratio) {
        const double rel_b = z / std::sqrt(n * h1_factor(fit.alpha));
        out.alpha = {fit.alpha / (1.0 + rel_a), fit.alpha / (1.0 - rel_a), level};
        out.beta = {fit.beta / (1.0 + rel_b), fit.beta / (1.0 - rel_b), level};
    } else {
        const double rel_b = z * std::sqrt(fit.alpha * h2_factor(fit.alpha) / n);
        out.alpha = {fit.alpha * (1.0 - rel_a), fit.alpha * (1.0 + rel_a), level};
        out.beta = {fit.beta * (1.0 - rel_b), fit.beta * (1.0 + rel_b), level};
    }
    if (out.alpha.lo < 0.0) out.alpha.lo = 0.0;
    if (out.beta.lo < 0.0) out.beta.lo = 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Modified signed log-likelihood ratio interval for beta (r* pivot).
// ---------------------------------------------------------------------------

namespace detail_rstar {

// d/dt_i of the complete log-likelihood.
inline double dl_dt(const BsParams& p, double t) {
    const double x = t / p.beta;
    return -1.5 / t + 1.0 / (t + p.beta) -
           xi::value(x) * xi::deriv(x) / (p.alpha * p.alpha * p.beta);
}

inline double constrained_alpha(const SampleStats& st, double beta) {
    return std::sqrt(st.arith_mean / beta + beta / st.harmonic_mean - 2.0);
}

}  // namespace detail_rstar

struct RStarWorkspace {
    std::vector<double> data;
    SampleStats st;
    FitResult ml;
    std::vector<double> v1, v2;  // pivot-based directional vectors at the MLE
    double ll_hat = 0.0;

    explicit RStarWorkspace(const std::vector<double>& d)
        : data(d), st(SampleStats::from(d)), ml(mle(d)) {
        const BsParams hat = ml.params();
        ll_hat = bs::loglik(hat, data);
        v1.resize(data.size());
        v2.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double x = data[i] / hat.beta;
            const double A = std::sqrt(x) + 1.0 / std::sqrt(x);
            v1[i] = 2.0 * data[i] * xi::value(x) / (hat.alpha * A);
            v2[i] = data[i] / hat.beta;
        }
    }

    double signed_root(double beta) const {
        const double a_b = detail_rstar::constrained_alpha(st, beta);
        const double ll_b = bs::loglik(BsParams(a_b, beta), data);
        const double arg = std::max(0.0, 2.0 * (ll_hat - ll_b));
        return (ml.beta >= beta ? 1.0 : -1.0) * std::sqrt(arg);
    }

    // l_{;V} evaluated at arbitrary parameter values.
    std::pair<double, double> l_v(const BsParams& p) const {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double d = detail_rstar::dl_dt(p, data[i]);
            a += d * v1[i];
            b += d * v2[i];
        }
        return {a, b};
    }

    double q_stat(double beta) const {
        const BsParams hat = ml.params();
        const double a_b = detail_rstar::constrained_alpha(st, beta);
        const BsParams con(a_b, beta);
        const auto [lv1_hat, lv2_hat] = l_v(hat);
        const auto [lv1_con, lv2_con] = l_v(con);

        // rows of l_{theta;V} by central differences in (alpha, beta)
        const auto lv_row = [&](const BsParams& p, int which) {
            const double h = 1e-6;
            if (which == 0) {
                const auto up = l_v(BsParams(p.alpha * (1 + h), p.beta));
                const auto dn = l_v(BsParams(p.alpha * (1 - h), p.beta));
                return std::pair<double, double>{(up.first - dn.first) / (2 * h * p.alpha),
                                                 (up.second - dn.second) / (2 * h * p.alpha)};
            }
            const auto up = l_v(BsParams(p.alpha, p.beta * (1 + h)));
            const auto dn = l_v(BsParams(p.alpha, p.beta * (1 - h)));
            return std::pair<double, double>{(up.first - dn.first) / (2 * h * p.beta),
                                             (up.second - dn.second) / (2 * h * p.beta)};
        };
        const auto da_con = lv_row(con, 0);

        // |top row: l_:V(hat)-l_:V(con); bottom row: l_alpha;V(con)|,
        // oriented so that q/r -> +1 at the unconstrained MLE
        const double num = (lv2_hat - lv2_con) * da_con.first - (lv1_hat - lv1_con) * da_con.second;

        const auto da_hat = lv_row(hat, 0);
        const auto db_hat = lv_row(hat, 1);
        const double den = da_hat.first * db_hat.second - da_hat.second * db_hat.first;

        const double n = double(data.size());
        // analytic entries at the MLE / constrained fit
        const double j_aa_con = 2.0 * n / (a_b * a_b);
        const double j_det_hat = observed_info_det(hat);
        const double adj = std::sqrt(std::max(1e-300, j_det_hat) / j_aa_con);
        return num / den * adj;
    }

    double observed_info_det(const BsParams& p) const {
        const double h = 1e-5;
        const auto f = [&](double a, double b) { return bs::loglik(BsParams(a, b), data); };
        const double fa = h * p.alpha, fb = h * p.beta;
        const double haa =
            (f(p.alpha + fa, p.beta) - 2 * f(p.alpha, p.beta) + f(p.alpha - fa, p.beta)) / (fa * fa);
        const double hbb =
            (f(p.alpha, p.beta + fb) - 2 * f(p.alpha, p.beta) + f(p.alpha, p.beta - fb)) / (fb * fb);
        const double hab = (f(p.alpha + fa, p.beta + fb) - f(p.alpha + fa, p.beta - fb) -
                            f(p.alpha - fa, p.beta + fb) + f(p.alpha - fa, p.beta - fb)) /
                           (4 * fa * fb);
        return haa * hbb - hab * hab;  // det(-H) = det(H) in 2x2
    }

    // r*(beta) = r + log(q/r)/r, interpolated across the removable
    // singularity at r = 0 (beta near the MLE).
    double r_star(double beta) const {
        const double r = signed_root(beta);
        if (std::fabs(r) < 1e-4) {
            const double d = 2e-3 * ml.beta;
            return 0.5 * (r_star_raw(beta - d) + r_star_raw(beta + d));
        }
        return r_star_raw(beta);
    }

    double r_star_raw(double beta) const {
        const double r = signed_root(beta);
        const double q = q_stat(beta);
        if (r == 0.0 || q / r <= 0.0) return r;
        return r + std::log(q / r) / r;
    }
};

inline Interval r_star_ci(const std::vector<double>& data, double level) {
    if (data.size() < 2) throw std::domain_error("r_star_ci: needs n >= 2");
    RStarWorkspace ws(data);
    const double z = norm_quantile(0.5 + 0.5 * level);
    const double bhat = ws.ml.beta;
    // r* decreases in beta; bracket outward from the MLE, staying positive
    auto lo_f = [&](double b) { return ws.r_star(b) - z; };
    auto hi_f = [&](double b) { return ws.r_star(b) + z; };
    double lo = bhat;
    while (lo_f(lo) < 0.0 && lo > 1e-8 * bhat) lo *= 0.85;
    double hi = bhat;
    while (hi_f(hi) > 0.0 && hi < 1e4 * bhat) hi *= 1.15;
    Interval out;
    out.level = level;
    out.lo = solve_root(lo_f, RootBracket{std::max(1e-8 * bhat, lo), bhat, 1e-9 * bhat, 300});
    out.hi = solve_root(hi_f, RootBracket{bhat, hi, 1e-9 * bhat, 300});
    return out;
}

}  // namespace bsdist
