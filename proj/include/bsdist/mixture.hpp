#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdist/estimators.hpp"
#include "bsdist/math.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

struct IgParams {
    double mu;
    double lambda;
    IgParams(double m, double l) : mu(m), lambda(l) {
        if (!(m > 0.0) || !(l > 0.0)) throw std::domain_error("IgParams: mu, lambda must be positive");
    }
};

inline double ig_pdf(const IgParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("ig_pdf: t must be positive");
    const double d = t - p.mu;
    return std::sqrt(p.lambda / (2.0 * kPi * t * t * t)) *
           std::exp(-p.lambda * d * d / (2.0 * p.mu * p.mu * t));
}

// Length-biased companion: f2(t) = t f1(t) / mu; its reciprocal is IG.
inline double lb_ig_pdf(const IgParams& p, double t) { return t * ig_pdf(p, t) / p.mu; }

// BS(alpha, beta) as the equal-weight mixture of IG(mu, lambda) and the
// length-biased reciprocal component, with alpha = sqrt(mu/lambda), beta = mu.
inline IgParams bs_as_ig_mixture(const BsParams& p) {
    return IgParams(p.beta, p.beta / (p.alpha * p.alpha));
}

inline double bs_mixture_pdf(const BsParams& p, double t) {
    const IgParams ig = bs_as_ig_mixture(p);
    return 0.5 * ig_pdf(ig, t) + 0.5 * lb_ig_pdf(ig, t);
}

// MGF of BS(alpha, beta), valid for t < lambda/(2 mu^2).
inline double bs_mgf(const BsParams& p, double t) {
    const IgParams ig = bs_as_ig_mixture(p);
    const double ratio = ig.lambda / ig.mu;
    const double disc = ratio * ratio - 2.0 * ig.lambda * t;
    const double branch = 1.0 - 2.0 * ig.mu * ig.mu * t / ig.lambda;
    if (!(disc >= 0.0) || !(branch > 0.0))
        throw std::domain_error("bs_mgf: t at or above the branch point lambda/(2 mu^2)");
    return 0.5 * std::exp(ratio - std::sqrt(disc)) * (1.0 + 1.0 / std::sqrt(branch));
}

// ---------------------------------------------------------------------------
// Two-component mixture.
// ---------------------------------------------------------------------------

struct MixtureParams {
    double alpha1, beta1;
    double alpha2, beta2;
    double p;

    MixtureParams(double a1, double b1, double a2, double b2, double w)
        : alpha1(a1), beta1(b1), alpha2(a2), beta2(b2), p(w) {
        if (!(a1 > 0) || !(b1 > 0) || !(a2 > 0) || !(b2 > 0))
            throw std::domain_error("MixtureParams: component parameters must be positive");
        if (!(w >= 0.0 && w <= 1.0)) throw std::domain_error("MixtureParams: weight outside [0,1]");
    }
};

inline double mixture_pdf(const MixtureParams& mp, double t) {
    if (!(t > 0.0)) throw std::domain_error("mixture_pdf: t must be positive");
    return mp.p * bs::pdf(BsParams(mp.alpha1, mp.beta1), t) +
           (1.0 - mp.p) * bs::pdf(BsParams(mp.alpha2, mp.beta2), t);
}

// First two raw moments in closed form; the second moment per component is
// beta^2 (1 + 2 a^2 + (3/2) a^4).
inline std::pair<double, double> mixture_moments(const MixtureParams& mp) {
    const double a1 = mp.alpha1 * mp.alpha1, a2 = mp.alpha2 * mp.alpha2;
    const double m1 = mp.p * mp.beta1 * (1.0 + 0.5 * a1) + (1.0 - mp.p) * mp.beta2 * (1.0 + 0.5 * a2);
    const double m2 =
        mp.p * mp.beta1 * mp.beta1 * (1.0 + 2.0 * a1 + 1.5 * a1 * a1) +
        (1.0 - mp.p) * mp.beta2 * mp.beta2 * (1.0 + 2.0 * a2 + 1.5 * a2 * a2);
    return {m1, m2};
}

inline std::vector<double> mixture_sample(const MixtureParams& mp, std::size_t n,
                                          std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    const BsParams c1(mp.alpha1, mp.beta1), c2(mp.alpha2, mp.beta2);
    for (auto& v : out) {
        const bool first = rng.uniform() < mp.p;
        v = bs::sample_one(first ? c1 : c2, rng);
    }
    return out;
}

struct EmTrace {
    std::vector<double> loglik;             // observed-data log-likelihood per iteration
    std::vector<MixtureParams> path;
    bool flagged_fallback = false;          // quadratic M-step replaced by direct search
};

struct MixtureFit {
    MixtureParams params{0.1, 1.0, 0.1, 1.0, 0.5};
    EmTrace trace;
    int iterations = 0;
    bool converged = false;
};

inline double mixture_loglik(const MixtureParams& mp, const std::vector<double>& data) {
    double ll = 0.0;
    for (double t : data) ll += std::log(std::max(1e-300, mixture_pdf(mp, t)));
    return ll;
}

// Default initialization: split around the log-median, pooled MM alpha.
inline MixtureParams mixture_default_init(const std::vector<double>& data) {
    auto sorted = data;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    const std::vector<double> lowhalf(sorted.begin(), sorted.begin() + h);
    const std::vector<double> highhalf(sorted.begin() + h, sorted.end());
    const auto m1 = mm_est(lowhalf), m2 = mm_est(highhalf);
    const auto pooled = mm_est(data);
    const double a = std::max(0.05, pooled.alpha);
    return MixtureParams(a, m1.beta, a, m2.beta, 0.5);
}

inline MixtureFit em_fit(const std::vector<double>& data, const MixtureParams& init,
                         double tol = 1e-10, int max_iter = 5000) {
    if (data.size() < 10) throw std::domain_error("em_fit: needs n >= 10");
    MixtureFit fit;
    double mu[2] = {init.beta1, init.beta2};
    double lam[2] = {init.beta1 / (init.alpha1 * init.alpha1),
                     init.beta2 / (init.alpha2 * init.alpha2)};
    double pw[2] = {init.p, 1.0 - init.p};
    const std::size_t n = data.size();
    fit.trace.loglik.push_back(mixture_loglik(init, data));
    int it = 0;
    for (; it < max_iter; ++it) {
        // E-step: responsibilities over the four latent cells
        double a_dot[2] = {0, 0}, b_dot[2] = {0, 0};
        double sum_y[2] = {0, 0}, sum_inv[2] = {0, 0};
        // accumulators: per component j, sums of (a_ij + b_ij) y and /y
        for (double y : data) {
            double f1[2], f2[2];
            double denom = 0.0;
            for (int j = 0; j < 2; ++j) {
                const IgParams ig(mu[j], lam[j]);
                f1[j] = pw[j] * ig_pdf(ig, y);
                f2[j] = pw[j] * lb_ig_pdf(ig, y);
                denom += f1[j] + f2[j];
            }
            if (!(denom > 0.0)) denom = 1e-300;
            for (int j = 0; j < 2; ++j) {
                const double aij = f1[j] / denom;
                const double bij = f2[j] / denom;
                a_dot[j] += aij;
                b_dot[j] += bij;
                sum_y[j] += (aij + bij) * y;
                sum_inv[j] += (aij + bij) / y;
            }
        }
        // M-step
        double mu_new[2], lam_new[2], pw_new[2];
        for (int j = 0; j < 2; ++j) {
            pw_new[j] = (a_dot[j] + b_dot[j]) / double(n);
            const double A = b_dot[j];
            const double B = 0.5 * (a_dot[j] + b_dot[j]);
            const double C = 0.5 * sum_y[j];
            const double D = 0.5 * sum_inv[j];
            const double disc = B * B * (A - B) * (A - B) + A * C * D * (2.0 * B - A);
            if (disc >= 0.0 && A > 0.0) {
                mu_new[j] = (B * (A - B) + std::sqrt(disc)) / (D * A);
            } else {
                // pathological responsibilities: fall back to a direct search
                fit.trace.flagged_fallback = true;
                const double Nj = a_dot[j] + b_dot[j];
                const auto q = [&](double m) {
                    // component complete-data objective in mu with lambda profiled
                    const double denom = sum_y[j] - 2.0 * Nj * m + m * m * sum_inv[j];
                    if (!(denom > 0.0)) return 1e300;
                    const double lamm = Nj * m * m / denom;
                    return -(0.5 * Nj * std::log(lamm) - 0.5 * Nj - A * std::log(m));
                };
                double best = mu[j], bestv = q(mu[j]);
                for (int k = -40; k <= 40; ++k) {
                    const double cand = mu[j] * std::exp(0.05 * k);
                    const double v = q(cand);
                    if (v < bestv) { bestv = v; best = cand; }
                }
                mu_new[j] = best;
            }
            const double denom = sum_y[j] - 2.0 * (a_dot[j] + b_dot[j]) * mu_new[j] +
                                 mu_new[j] * mu_new[j] * sum_inv[j];
            lam_new[j] = (a_dot[j] + b_dot[j]) * mu_new[j] * mu_new[j] / denom;
            if (pw_new[j] < 1e-6 || !(lam_new[j] > 0.0) || !std::isfinite(lam_new[j]))
                throw std::runtime_error("em_fit: component collapsed at iteration " +
                                         std::to_string(it));
        }
        double rel = 0.0;
        for (int j = 0; j < 2; ++j) {
            rel = std::max(rel, std::fabs(mu_new[j] - mu[j]) / mu[j]);
            rel = std::max(rel, std::fabs(lam_new[j] - lam[j]) / lam[j]);
            mu[j] = mu_new[j];
            lam[j] = lam_new[j];
            pw[j] = pw_new[j];
        }
        const MixtureParams cur(std::sqrt(mu[0] / lam[0]), mu[0], std::sqrt(mu[1] / lam[1]), mu[1],
                                pw[0]);
        const double ll = mixture_loglik(cur, data);
        if (ll < fit.trace.loglik.back() - 1e-10)
            throw std::runtime_error("em_fit: log-likelihood decreased");
        fit.trace.loglik.push_back(ll);
        fit.trace.path.push_back(cur);
        const double gain = ll - *(fit.trace.loglik.end() - 2);
        if (rel < tol || std::fabs(gain) < tol * (std::fabs(ll) + 1.0)) {
            ++it;
            fit.converged = true;
            break;
        }
    }
    fit.iterations = it;
    fit.params = MixtureParams(std::sqrt(mu[0] / lam[0]), mu[0], std::sqrt(mu[1] / lam[1]), mu[1],
                               pw[0]);
    if (!fit.converged && it >= max_iter)
        throw std::runtime_error("em_fit: no convergence in " + std::to_string(max_iter) +
                                 " iterations");
    return fit;
}

// Complete-data M-step with known memberships; the oracle target for the
// closed forms used inside em_fit.
struct CompleteDataMle {
    double mu, lambda, p;
};

inline CompleteDataMle mixture_complete_mstep(const std::vector<double>& y,
                                              const std::vector<double>& a_w,
                                              const std::vector<double>& b_w, std::size_t n) {
    double a_dot = 0, b_dot = 0, sum_y = 0, sum_inv = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        a_dot += a_w[i];
        b_dot += b_w[i];
        sum_y += (a_w[i] + b_w[i]) * y[i];
        sum_inv += (a_w[i] + b_w[i]) / y[i];
    }
    const double A = b_dot, B = 0.5 * (a_dot + b_dot);
    const double C = 0.5 * sum_y, D = 0.5 * sum_inv;
    const double disc = B * B * (A - B) * (A - B) + A * C * D * (2.0 * B - A);
    CompleteDataMle out;
    out.mu = (B * (A - B) + std::sqrt(disc)) / (D * A);
    out.lambda = (a_dot + b_dot) * out.mu * out.mu /
                 (sum_y - 2.0 * (a_dot + b_dot) * out.mu + out.mu * out.mu * sum_inv);
    out.p = (a_dot + b_dot) / double(n);
    return out;
}

}  // namespace bsdist
