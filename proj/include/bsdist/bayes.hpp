#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bsdist/estimators.hpp"
#include "bsdist/math.hpp"
#include "bsdist/optimize.hpp"
#include "bsdist/rng.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

enum class PriorKind { Jeffreys, Reference };  // 1/(a b H(a^2)) and 1/(a b)

namespace bayes {

// H(a^2) = (1/a^2 + 1/4)^(-1/2); the Jeffreys prior divides by it.
inline double jeffreys_h(double alpha) {
    return 1.0 / std::sqrt(1.0 / (alpha * alpha) + 0.25);
}

inline double a_factor(const SampleStats& st, double beta) {
    const double n = double(st.n);
    return 0.5 * n * st.arith_mean / beta + 0.5 * n * beta / st.harmonic_mean - n;
}

// Joint log-posterior (unnormalized).
inline double log_posterior(const std::vector<double>& data, PriorKind prior, double alpha,
                            double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) return -1e300;
    const auto st = SampleStats::from(data);
    const double n = double(st.n);
    double lp = -(n + 1.0) * std::log(alpha) - (0.5 * n + 1.0) * std::log(beta) -
                a_factor(st, beta) / (alpha * alpha);
    for (double t : data) lp += std::log(beta + t);
    if (prior == PriorKind::Jeffreys) lp -= std::log(jeffreys_h(alpha * alpha));
    return lp;
}

// Approximate marginal posteriors (unnormalized log densities).
inline double log_marginal_alpha(const std::vector<double>& data, PriorKind prior, double alpha) {
    if (!(alpha > 0.0)) return -1e300;
    const auto st = SampleStats::from(data);
    const double n = double(st.n);
    const double core = -n / (alpha * alpha) * (std::sqrt(st.arith_mean / st.harmonic_mean) - 1.0);
    if (prior == PriorKind::Jeffreys)
        return -(n + 1.0) * std::log(alpha) + 0.5 * std::log(4.0 + alpha * alpha) + core;
    return -n * std::log(alpha) + core;
}

inline double log_marginal_beta(const std::vector<double>& data, PriorKind prior, double beta) {
    if (!(beta > 0.0)) return -1e300;
    const auto st = SampleStats::from(data);
    const double n = double(st.n);
    const double g = st.arith_mean / (2.0 * beta) + beta / (2.0 * st.harmonic_mean) - 1.0;
    if (!(g > 0.0)) return -1e300;
    double lp = 0.0;
    for (double t : data) lp += std::log(beta + t);
    if (prior == PriorKind::Jeffreys) {
        lp += 0.5 * std::log(4.0 + (2.0 * n / (n + 2.0)) * g);
        lp -= (0.5 * n + 1.0) * std::log(beta);
        lp -= 0.5 * (n + 1.0) * std::log(g);
    } else {
        lp -= (0.5 * n + 1.0) * std::log(beta);
        lp -= 0.5 * n * std::log(g);
    }
    return lp;
}

struct PosteriorSummary {
    double mode_alpha = 0.0;
    double mode_beta = 0.0;
    double mean_alpha = 0.0;
    double mean_beta = 0.0;
    Interval cred_alpha;
    Interval cred_beta;
    std::size_t chain_length = 0;
    double acceptance_alpha = 0.0;
    double acceptance_beta = 0.0;
};

// Modes of the approximate marginal posteriors by golden-section refinement
// of a coarse log-grid.
inline PosteriorSummary posterior_mode(const std::vector<double>& data, PriorKind prior) {
    const auto st = SampleStats::from(data);
    PosteriorSummary out;
    const auto argmax1d = [](const std::function<double(double)>& f, double lo, double hi) {
        double a = std::log(lo), b = std::log(hi);
        double best = a, bestv = f(std::exp(a));
        for (int i = 0; i <= 400; ++i) {
            const double x = a + (b - a) * i / 400.0;
            const double v = f(std::exp(x));
            if (v > bestv) { bestv = v; best = x; }
        }
        double l = best - (b - a) / 400.0, r = best + (b - a) / 400.0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 120; ++it) {
            const double m1 = r - gr * (r - l), m2 = l + gr * (r - l);
            if (f(std::exp(m1)) < f(std::exp(m2))) l = m1; else r = m2;
        }
        return std::exp(0.5 * (l + r));
    };
    const double a0 = std::max(1e-3, mm_est(data).alpha);
    out.mode_alpha = argmax1d(
        [&](double a) { return log_marginal_alpha(data, prior, a); }, a0 * 0.05, a0 * 20.0);
    out.mode_beta = argmax1d(
        [&](double b) { return log_marginal_beta(data, prior, b); },
        st.harmonic_mean * 0.2, st.arith_mean * 5.0);
    return out;
}

// Lindley's approximate posterior means under the reference prior: standard
// two-parameter expansion with expected-information sigmas and analytic
// third derivatives of the complete log-likelihood at the MLE.
inline std::pair<double, double> lindley_estimates(const std::vector<double>& data) {
    const auto fit = mle(data);
    const double a = fit.alpha, b = fit.beta;
    const double n = double(data.size());
    const double kappa = 1.0 + a * fisher_h(a) / kSqrt2Pi;
    const double saa = a * a / (2.0 * n);
    const double sbb = a * a * b * b / (n * kappa);
    double sum_t = 0.0, sum_inv = 0.0, sum3 = 0.0;
    for (double t : data) {
        sum_t += t;
        sum_inv += 1.0 / t;
        sum3 += 1.0 / ((t + b) * (t + b) * (t + b));
    }
    const double L30 = 10.0 * n / (a * a * a);
    const double L12 = 2.0 * sum_t / (b * b * b * a * a * a);
    const double L21 = -3.0 * (sum_inv - sum_t / (b * b)) / (a * a * a * a);
    const double L03 = -n / (b * b * b) + 2.0 * sum3 + 3.0 * sum_t / (a * a * b * b * b * b);
    const double rho_a = -1.0 / a, rho_b = -1.0 / b;
    const double alpha_b = a + rho_a * saa + 0.5 * (L30 * saa * saa + L12 * sbb * saa);
    const double beta_b = b + rho_b * sbb + 0.5 * (L03 * sbb * sbb + L21 * saa * sbb);
    return {alpha_b, beta_b};
}

struct Chains {
    std::vector<double> alpha;
    std::vector<double> beta;
};

struct PosteriorSampleResult {
    Chains chains;  // post burn-in
    PosteriorSummary summary;
};

// Metropolis-within-Gibbs on (log alpha, log beta) with step adaptation
// during burn-in targeting 30-45% acceptance.
inline PosteriorSampleResult posterior_sample(const std::vector<double>& data, PriorKind prior,
                                              std::size_t chain, std::uint64_t seed,
                                              double level = 0.95) {
    if (chain < 1000) throw std::domain_error("posterior_sample: chain must be >= 1000");
    const auto st = SampleStats::from(data);
    if (st.sorted.front() == st.sorted.back())
        throw std::domain_error("posterior_sample: degenerate data");
    Rng rng(seed);
    const auto fit = mle(data);
    double la = std::log(fit.alpha), lb = std::log(fit.beta);
    double lp = log_posterior(data, prior, std::exp(la), std::exp(lb));
    double step_a = 1.2 / std::sqrt(2.0 * double(st.n));
    double step_b = 1.2 * fit.alpha / std::sqrt(double(st.n));
    const std::size_t burn = chain / 5;
    std::size_t acc_a = 0, acc_b = 0, tries = 0;
    PosteriorSampleResult out;
    out.chains.alpha.reserve(chain - burn);
    out.chains.beta.reserve(chain - burn);
    for (std::size_t it = 0; it < chain; ++it) {
        {
            const double prop = la + step_a * rng.normal();
            const double lpp = log_posterior(data, prior, std::exp(prop), std::exp(lb));
            if (std::log(rng.uniform()) < lpp - lp + prop - la) {  // log-scale Jacobian
                la = prop;
                lp = lpp;
                ++acc_a;
            }
        }
        {
            const double prop = lb + step_b * rng.normal();
            const double lpp = log_posterior(data, prior, std::exp(la), std::exp(prop));
            if (std::log(rng.uniform()) < lpp - lp + prop - lb) {
                lb = prop;
                lp = lpp;
                ++acc_b;
            }
        }
        ++tries;
        if (it < burn && tries == 200) {
            const double ra = double(acc_a) / 200.0, rb = double(acc_b) / 200.0;
            if (ra < 0.30) step_a *= 0.8;
            if (ra > 0.45) step_a *= 1.25;
            if (rb < 0.30) step_b *= 0.8;
            if (rb > 0.45) step_b *= 1.25;
            acc_a = acc_b = 0;
            tries = 0;
        }
        if (it == burn) {
            acc_a = acc_b = 0;
            tries = 0;
        }
        if (it >= burn) {
            out.chains.alpha.push_back(std::exp(la));
            out.chains.beta.push_back(std::exp(lb));
        }
    }
    auto& s = out.summary;
    s.chain_length = out.chains.alpha.size();
    s.acceptance_alpha = double(acc_a) / double(tries);
    s.acceptance_beta = double(acc_b) / double(tries);
    const auto summarize = [&](std::vector<double> v, double& mean, Interval& ci) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        std::sort(v.begin(), v.end());
        const double t = 0.5 * (1.0 - level);
        ci.lo = v[std::size_t(t * (v.size() - 1))];
        ci.hi = v[std::size_t((1.0 - t) * (v.size() - 1))];
        ci.level = level;
    };
    summarize(out.chains.alpha, s.mean_alpha, s.cred_alpha);
    summarize(out.chains.beta, s.mean_beta, s.cred_beta);
    const auto modes = posterior_mode(data, prior);
    s.mode_alpha = modes.mode_alpha;
    s.mode_beta = modes.mode_beta;
    return out;
}

// Geweke-style z-score between the first 10% and last 50% of a chain.
inline double geweke_z(const std::vector<double>& chain) {
    const std::size_t n = chain.size();
    const std::size_t n1 = n / 10, n2 = n / 2;
    double m1 = 0, m2 = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < n1; ++i) m1 += chain[i];
    m1 /= n1;
    for (std::size_t i = n - n2; i < n; ++i) m2 += chain[i];
    m2 /= n2;
    for (std::size_t i = 0; i < n1; ++i) v1 += (chain[i] - m1) * (chain[i] - m1);
    v1 /= n1 * n1;
    for (std::size_t i = n - n2; i < n; ++i) v2 += (chain[i] - m2) * (chain[i] - m2);
    v2 /= n2 * n2;
    // crude variance inflation for autocorrelation
    return (m1 - m2) / std::sqrt(8.0 * (v1 + v2));
}

}  // namespace bayes

}  // namespace bsdist
