#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdist/estimators.hpp"
#include "bsdist/math.hpp"
#include "bsdist/optimize.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

// ---------------------------------------------------------------------------
// Type-II right censoring: observe the first r of n ordered lifetimes.
// ---------------------------------------------------------------------------

struct Type2Sample {
    std::vector<double> times;  // t_{1:n} .. t_{r:n}, strictly increasing
    std::size_t n = 0;

    std::size_t r() const { return times.size(); }

    static Type2Sample from(std::vector<double> observed, std::size_t n_total,
                            bool jitter_ties = false) {
        Type2Sample s;
        std::sort(observed.begin(), observed.end());
        if (observed.empty() || observed.size() > n_total)
            throw std::invalid_argument("Type2Sample: need 1 <= r <= n");
        if (!(observed.front() > 0.0))
            throw std::domain_error("Type2Sample: lifetimes must be positive");
        for (std::size_t i = 1; i < observed.size(); ++i) {
            if (observed[i] <= observed[i - 1]) {
                if (!jitter_ties) throw std::invalid_argument("Type2Sample: tied observations");
                observed[i] = observed[i - 1] * (1.0 + 1e-9);
            }
        }
        s.times = std::move(observed);
        s.n = n_total;
        return s;
    }
};

inline double type2_loglik(const BsParams& p, const Type2Sample& s) {
    const std::size_t r = s.r();
    double ll = double(s.n - r) * std::log(std::max(1e-300, bs::survival(p, s.times.back())));
    ll -= double(r) * (std::log(p.alpha) + std::log(p.beta));
    double q = 0.0, lx = 0.0;
    for (double t : s.times) {
        const double x = t / p.beta;
        lx += std::log(xi::deriv(x));
        const double e = xi::value(x);
        q += e * e;
    }
    return ll + lx - q / (2.0 * p.alpha * p.alpha);
}

enum class Type2Strategy { Direct, Root, RootPhiRatio };

namespace detail_censored {

// alpha solving the alpha-score equation at fixed beta.
inline double type2_alpha_given_beta(const Type2Sample& s, double beta) {
    const std::size_t r = s.r();
    double se2 = 0.0;
    for (double t : s.times) {
        const double e = xi::value(t / beta);
        se2 += e * e;
    }
    const double er = xi::value(s.times.back() / beta);
    if (s.n == r) return std::sqrt(se2 / r);
    // r/a - S/a^3 - (n-r) H(e_r/a) e_r / a^2 = 0, H = phi/(1-Phi);
    // negative near zero, approaches 0+ for large a
    const auto score = [&](double a) {
        return double(r) / a - se2 / (a * a * a) -
               double(s.n - r) * mills_hazard(er / a) * er / (a * a);
    };
    const double scale = std::sqrt(se2 / r);
    double lo = scale * 1e-3, hi = scale;
    while (score(hi) <= 0.0 && hi < 1e6 * scale) hi *= 1.4;
    return solve_root(score, RootBracket{lo, hi, 1e-12, 400});
}

inline double type2_beta_score(const Type2Sample& s, double beta, double alpha,
                               bool phi_ratio_variant) {
    const std::size_t r = s.r();
    const double a2 = alpha * alpha;
    double sum = 0.0;
    for (double t : s.times) {
        const double x = t / beta;
        sum += -xi::deriv2(x) * x / xi::deriv(x) / beta;
        sum += xi::value(x) * xi::deriv(x) * x / (a2 * beta);
    }
    sum -= double(r) / beta;
    const double xr = s.times.back() / beta;
    const double zr = xi::value(xr) / alpha;
    const double H = phi_ratio_variant ? norm_pdf(zr) / norm_cdf(zr) : mills_hazard(zr);
    sum += double(s.n - r) * H * xi::deriv(xr) * xr / (alpha * beta);
    return sum;
}

}  // namespace detail_censored

inline FitResult type2_mle(const Type2Sample& s, Type2Strategy strategy = Type2Strategy::Direct) {
    if (s.r() <= 1) throw std::domain_error("type2_mle: estimators do not exist for r <= 1");
    FitResult fit;
    fit.method = "type2-ml";
    // start from the complete-sample fit of the observed part
    const auto init = mm_est(s.times);
    const double a0 = std::max(1e-3, init.alpha), b0 = init.beta;
    if (strategy == Type2Strategy::Direct) {
        const auto obj = [&](const std::vector<double>& lp) {
            return -type2_loglik(BsParams(std::exp(lp[0]), std::exp(lp[1])), s);
        };
        auto r = nelder_mead(obj, {std::log(a0), std::log(b0)}, 1e-12, 1e-13);
        fit.alpha = std::exp(r.x[0]);
        fit.beta = std::exp(r.x[1]);
        fit.iterations = r.iterations;
        fit.converged = r.converged;
        if (!fit.converged) throw std::runtime_error("type2_mle: direct maximization failed");
        return fit;
    }
    const bool phi_ratio = strategy == Type2Strategy::RootPhiRatio;
    const auto profile_score = [&](double b) {
        const double a = detail_censored::type2_alpha_given_beta(s, b);
        return detail_censored::type2_beta_score(s, b, a, phi_ratio);
    };
    double lo = 0.3 * b0, hi = 1.2 * b0;
    while (profile_score(lo) < 0.0 && lo > 1e-6 * b0) lo *= 0.7;
    while (profile_score(hi) > 0.0 && hi < 1e4 * b0) hi *= 1.3;
    fit.beta = solve_root(profile_score, RootBracket{lo, hi, 1e-12, 400});
    fit.alpha = detail_censored::type2_alpha_given_beta(s, fit.beta);
    fit.converged = true;
    return fit;
}

// alpha* = alpha / (1 - (1 + 2.5 (1 - r/n))/n).
inline double type2_bias_corrected_alpha(const FitResult& fit, const Type2Sample& s) {
    const double frac = 1.0 - double(s.r()) / double(s.n);
    return fit.alpha / (1.0 - (1.0 + 2.5 * frac) / double(s.n));
}

struct CensoredCi {
    Interval alpha;
    Interval beta;
    double se_alpha = 0.0;
    double se_beta = 0.0;
    double alpha_used = 0.0;  // centre used for the alpha interval
};

// Normal-theory intervals from the observed information (numerical Hessian of
// the censored log-likelihood). The corrected variant applies the bias factor
// to alpha first and evaluates the Hessian at (alpha*, beta-hat). Alpha
// intervals are symmetric; beta intervals use the ratio construction.
inline CensoredCi type2_ci(const FitResult& fit, const Type2Sample& s, double level,
                           bool corrected = false) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("type2_ci: bad level");
    const double a0 = corrected ? type2_bias_corrected_alpha(fit, s) : fit.alpha;
    const double b0 = fit.beta;
    const auto ll = [&](const std::vector<double>& th) {
        return type2_loglik(BsParams(th[0], th[1]), s);
    };
    const Matrix H = numerical_hessian(ll, {a0, b0});
    Matrix info(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) info(i, j) = -H(i, j);
    const Matrix cov = inverse_spd(info);
    if (!(cov(0, 0) > 0.0) || !(cov(1, 1) > 0.0))
        throw std::runtime_error("type2_ci: singular observed information");
    CensoredCi out;
    out.alpha_used = a0;
    out.se_alpha = std::sqrt(cov(0, 0));
    out.se_beta = std::sqrt(cov(1, 1));
    const double z = norm_quantile(0.5 + 0.5 * level);
    out.alpha = {a0 - z * out.se_alpha, a0 + z * out.se_alpha, level};
    const double cb = z * out.se_beta / b0;
    out.beta = {b0 / (1.0 + cb), b0 / (1.0 - cb), level};
    return out;
}

// ---------------------------------------------------------------------------
// Progressive Type-II censoring.
// ---------------------------------------------------------------------------

struct ProgressiveSample {
    std::vector<double> times;     // t_{1:m:n} .. t_{m:m:n}
    std::vector<int> removals;     // R_1 .. R_m
    std::size_t n = 0;

    std::size_t m() const { return times.size(); }

    static ProgressiveSample from(std::vector<double> times, std::vector<int> removals,
                                  std::size_t n_total) {
        if (times.size() != removals.size() || times.empty())
            throw std::invalid_argument("ProgressiveSample: times/removals mismatch");
        long total = 0;
        for (int r : removals) {
            if (r < 0) throw std::invalid_argument("ProgressiveSample: negative removal");
            total += r;
        }
        if (static_cast<std::size_t>(total) + times.size() != n_total)
            throw std::invalid_argument("ProgressiveSample: removals must sum to n - m");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] < times[i + 1]))
                throw std::invalid_argument("ProgressiveSample: times must increase");
        if (!(times.front() > 0.0))
            throw std::domain_error("ProgressiveSample: lifetimes must be positive");
        ProgressiveSample s;
        s.times = std::move(times);
        s.removals = std::move(removals);
        s.n = n_total;
        return s;
    }
};

inline double progressive_loglik(const BsParams& p, const ProgressiveSample& s) {
    double ll = 0.0;
    for (std::size_t i = 0; i < s.m(); ++i) {
        ll += bs::log_pdf(p, s.times[i]);
        if (s.removals[i] > 0)
            ll += s.removals[i] * std::log(std::max(1e-300, bs::survival(p, s.times[i])));
    }
    return ll;
}

enum class ProgressiveStrategy { Direct, Em };

struct ProgressiveFit : FitResult {
    std::vector<double> loglik_trace;  // EM path, observed-data log-likelihood
};

namespace detail_censored {

// E[g(T) | T > c] style integrals under BS(alpha, beta) via the normal
// substitution t = quantile(Phi(z)).
template <class G>
inline double truncated_mean(const BsParams& p, double c, const G& g) {
    const double zc = bs::z_value(p, c);
    const double S = norm_sf(zc);
    const double val = integrate(
        [&](double z) {
            const double az = p.alpha * z;
            const double rt = 0.5 * (az + std::sqrt(az * az + 4.0));
            return g(p.beta * rt * rt) * norm_pdf(z);
        },
        zc, std::max(zc + 14.0, 12.0), QuadratureSpec{1e-13, 1e-11, 20});
    return val / S;
}

}  // namespace detail_censored

inline ProgressiveFit progressive_fit(const ProgressiveSample& s,
                                      ProgressiveStrategy strategy = ProgressiveStrategy::Direct,
                                      double tol = 1e-9, int max_iter = 5000) {
    if (s.m() < 2) throw std::domain_error("progressive_fit: needs m >= 2");
    ProgressiveFit fit;
    const auto init = mm_est(s.times);
    double a = std::max(1e-3, init.alpha), b = init.beta;

    if (strategy == ProgressiveStrategy::Direct) {
        fit.method = "progressive-ml";
        const auto obj = [&](const std::vector<double>& lp) {
            return -progressive_loglik(BsParams(std::exp(lp[0]), std::exp(lp[1])), s);
        };
        auto r = nelder_mead(obj, {std::log(a), std::log(b)}, 1e-12, 1e-13);
        if (!r.converged)
            throw std::runtime_error("progressive_fit: direct maximization failed after " +
                                     std::to_string(r.iterations) + " iterations");
        fit.alpha = std::exp(r.x[0]);
        fit.beta = std::exp(r.x[1]);
        fit.iterations = r.iterations;
        fit.converged = true;
    } else {
        fit.method = "progressive-em";
        // latent complete data: every censored unit carries an unobserved
        // lifetime above its censor time plus the two-sided mixture
        // membership of the inverse-Gaussian bridge
        double prev_ll = progressive_loglik(BsParams(a, b), s);
        fit.loglik_trace.push_back(prev_ll);
        const double n = double(s.n);
        int it = 0;
        for (; it < max_iter; ++it) {
            const BsParams cur(a, b);
            const double mu = b;
            double sum_y = 0.0, sum_inv = 0.0, sum_v = 0.0;
            for (std::size_t i = 0; i < s.m(); ++i) {
                const double t = s.times[i];
                sum_y += t;
                sum_inv += 1.0 / t;
                sum_v += t / (mu + t);
                if (s.removals[i] > 0) {
                    const double R = s.removals[i];
                    sum_y += R * detail_censored::truncated_mean(cur, t, [](double y) { return y; });
                    sum_inv +=
                        R * detail_censored::truncated_mean(cur, t, [](double y) { return 1.0 / y; });
                    sum_v += R * detail_censored::truncated_mean(
                                     cur, t, [mu](double y) { return y / (mu + y); });
                }
            }
            const double A = sum_v, B = 0.5 * n;
            const double C = 0.5 * sum_y, D = 0.5 * sum_inv;
            const double disc = B * B * (A - B) * (A - B) + A * C * D * (2.0 * B - A);
            const double mu_new = (B * (A - B) + std::sqrt(disc)) / (D * A);
            const double lam_new =
                n * mu_new * mu_new / (sum_y - 2.0 * n * mu_new + mu_new * mu_new * sum_inv);
            const double a_new = std::sqrt(mu_new / lam_new);
            const double b_new = mu_new;
            const double ll = progressive_loglik(BsParams(a_new, b_new), s);
            if (ll < fit.loglik_trace.back() - 1e-10)
                throw std::runtime_error("progressive_fit: EM log-likelihood decreased");
            fit.loglik_trace.push_back(ll);
            const double rel = std::max(std::fabs(a_new - a) / a, std::fabs(b_new - b) / b);
            a = a_new;
            b = b_new;
            if (rel < tol) break;
        }
        if (it == max_iter) throw std::runtime_error("progressive_fit: EM did not converge");
        fit.alpha = a;
        fit.beta = b;
        fit.iterations = it + 1;
        fit.converged = true;
    }
    // observed-information standard errors
    const auto ll = [&](const std::vector<double>& th) {
        return progressive_loglik(BsParams(th[0], th[1]), s);
    };
    const Matrix H = numerical_hessian(ll, {fit.alpha, fit.beta});
    Matrix info(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) info(i, j) = -H(i, j);
    const Matrix cov = inverse_spd(info);
    fit.se_alpha = std::sqrt(cov(0, 0));
    fit.se_beta = std::sqrt(cov(1, 1));
    const double z = norm_quantile(0.975);
    fit.ci_alpha = Interval{fit.alpha - z * *fit.se_alpha, fit.alpha + z * *fit.se_alpha, 0.95};
    fit.ci_beta = Interval{fit.beta - z * *fit.se_beta, fit.beta + z * *fit.se_beta, 0.95};
    return fit;
}

// Generates a progressively censored sample under scheme R from BS(p).
inline ProgressiveSample progressive_sample(const BsParams& p, const std::vector<int>& removals,
                                            std::size_t n, std::uint64_t seed) {
    std::size_t m = removals.size();
    long total = 0;
    for (int r : removals) total += r;
    if (static_cast<std::size_t>(total) + m != n)
        throw std::invalid_argument("progressive_sample: removals must sum to n - m");
    auto pool = bs::sample(p, n, seed);
    std::sort(pool.begin(), pool.end());
    Rng rng(seed ^ 0xabcdef12345ull);
    std::vector<double> times;
    std::vector<double> alive(pool);
    for (std::size_t i = 0; i < m; ++i) {
        times.push_back(alive.front());
        alive.erase(alive.begin());
        for (int rm = 0; rm < removals[i]; ++rm) {
            const std::size_t k = std::size_t(rng.uniform() * alive.size());
            alive.erase(alive.begin() + std::min(k, alive.size() - 1));
        }
    }
    return ProgressiveSample::from(std::move(times), removals, n);
}

}  // namespace bsdist
