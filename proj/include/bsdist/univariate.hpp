#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bsdist/math.hpp"
#include "bsdist/rng.hpp"

namespace bsdist {

struct BsParams {
    double alpha;
    double beta;

    BsParams(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0) || !(b > 0.0))
            throw std::domain_error("BsParams: alpha and beta must be positive");
    }
};

// xi(t) = sqrt(t) - 1/sqrt(t) and its derivatives; the transform that maps
// the distribution onto the standard normal.
namespace xi {

inline double value(double t) {
    const double s = std::sqrt(t);
    return s - 1.0 / s;
}
inline double deriv(double t) {
    const double s = std::sqrt(t);
    return 0.5 * (1.0 / s + 1.0 / (t * s));
}
inline double deriv2(double t) {
    const double s = std::sqrt(t);
    return -0.25 / (t * t) * (s + 3.0 / s);
}

}  // namespace xi

namespace bs {

inline double z_value(const BsParams& p, double t) { return xi::value(t / p.beta) / p.alpha; }

inline double log_pdf(const BsParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("bs::pdf: t must be positive");
    const double x = t / p.beta;
    const double e = xi::value(x);
    return std::log(xi::deriv(x)) - std::log(kSqrt2Pi * p.alpha * p.beta) -
           e * e / (2.0 * p.alpha * p.alpha);
}

inline double pdf(const BsParams& p, double t) { return std::exp(log_pdf(p, t)); }

inline double cdf(const BsParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("bs::cdf: t must be positive");
    return norm_cdf(z_value(p, t));
}

inline double survival(const BsParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("bs::survival: t must be positive");
    return norm_sf(z_value(p, t));
}

inline double quantile(const BsParams& p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("bs::quantile: q must lie in (0,1)");
    const double az = p.alpha * norm_quantile(q);
    const double root = 0.5 * (az + std::sqrt(az * az + 4.0));
    return p.beta * root * root;
}

inline double hazard(const BsParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("bs::hazard: t must be positive");
    const double z = z_value(p, t);
    const double x = t / p.beta;
    return xi::deriv(x) / (p.alpha * p.beta) * mills_hazard(z);
}

// Unique positive root of t^3 + t^2(a^2+1) + t(3a^2-1) - 1 = 0, scaled by beta.
inline double mode(const BsParams& p) {
    const double a2 = p.alpha * p.alpha;
    const auto cubic = [a2](double t) {
        return ((t + a2 + 1.0) * t + (3.0 * a2 - 1.0)) * t - 1.0;
    };
    const double m = solve_root(cubic, RootBracket{1e-12, 1.0, 1e-14, 400});
    return p.beta * m;
}

// Change point of the hazard. Exact mode solves the stationarity equation of
// the unit-scale hazard; the approximation is 1/(-0.4604 + 1.8417 a)^2.
inline double hazard_change_point(const BsParams& p, bool approximate = false) {
    if (approximate) {
        if (!(p.alpha > 0.25))
            throw std::domain_error("hazard_change_point: approximation needs alpha > 0.25");
        const double d = -0.4604 + 1.8417 * p.alpha;
        return p.beta / (d * d);
    }
    const double a = p.alpha;
    const auto stat = [a](double t) {
        const double e = xi::value(t), e1 = xi::deriv(t), e2 = xi::deriv2(t);
        return norm_cdf(-e / a) * (-(e1 * e1) * e + a * a * e2) +
               a * norm_pdf(e / a) * e1 * e1;
    };
    // the stationary point sits above the density mode and below ~1e3
    double lo = 1e-6, hi = 1.0;
    while (stat(hi) > 0.0 && hi < 1e9) hi *= 2.0;
    if (stat(hi) > 0.0) throw std::runtime_error("hazard_change_point: bracketing failed");
    const double c = solve_root(stat, RootBracket{lo, hi, 1e-12, 400});
    return p.beta * c;
}

inline double sample_one(const BsParams& p, Rng& rng) {
    const double az = p.alpha * rng.normal();
    const double root = 0.5 * (az + std::sqrt(az * az + 4.0));
    return p.beta * root * root;
}

inline std::vector<double> sample(const BsParams& p, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("bs::sample: n must be >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = sample_one(p, rng);
    return out;
}

// Alternate generator through W = Z^2 ~ chi^2_1; distributionally identical.
inline std::vector<double> sample_chisq_route(const BsParams& p, std::size_t n,
                                              std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("bs::sample_chisq_route: n must be >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    const double a2 = p.alpha * p.alpha;
    for (auto& v : out) {
        const double w = rng.chisq1();
        const double t1 = 1.0 + a2 * w / 2.0;
        const double disc = std::sqrt(t1 * t1 - 1.0);
        // the two roots multiply to beta^2; pick each with probability 1/2
        v = rng.uniform() < 0.5 ? p.beta * (t1 - disc) : p.beta * (t1 + disc);
    }
    return out;
}

// E(T^r) for integer r != 0 via the double binomial sum; negative orders use
// the reciprocal law T^-1 ~ BS(alpha, 1/beta).
inline double moment(const BsParams& p, int r) {
    if (r == 0) return 1.0;
    if (r < 0) return moment(BsParams(p.alpha, 1.0 / p.beta), -r);
    auto binom = [](int n, int k) {
        double v = 1.0;
        for (int i = 1; i <= k; ++i) v *= double(n - k + i) / double(i);
        return v;
    };
    auto fact = [](int n) {
        double v = 1.0;
        for (int i = 2; i <= n; ++i) v *= i;
        return v;
    };
    const double half_a = 0.5 * p.alpha;
    double total = 0.0;
    for (int j = 0; j <= r; ++j) {
        for (int i = 0; i <= j; ++i) {
            const int m = r - j + i;
            total += binom(2 * r, 2 * j) * binom(j, i) * fact(2 * m) /
                     (std::pow(2.0, m) * fact(m)) * std::pow(half_a, 2 * m);
        }
    }
    return std::pow(p.beta, r) * total;
}

struct MomentsSummary {
    double mean;
    double variance;
    double cv;
    double skewness;
    double kurtosis;
};

inline MomentsSummary describe(const BsParams& p) {
    const double a2 = p.alpha * p.alpha;
    MomentsSummary s{};
    s.mean = 0.5 * p.beta * (a2 + 2.0);
    s.variance = 0.25 * p.beta * p.beta * (5.0 * a2 * a2 + 4.0 * a2);
    s.cv = std::sqrt(5.0 * a2 * a2 + 4.0 * a2) / (a2 + 2.0);
    s.skewness = (44.0 * a2 * p.alpha + 24.0 * p.alpha) / std::pow(5.0 * a2 + 4.0, 1.5);
    s.kurtosis = 3.0 + (558.0 * a2 * a2 + 240.0 * a2) / ((5.0 * a2 + 4.0) * (5.0 * a2 + 4.0));
    return s;
}

inline BsParams reciprocal(const BsParams& p) { return BsParams(p.alpha, 1.0 / p.beta); }

// Complete-sample log-likelihood without additive constants.
inline double loglik(const BsParams& p, const std::vector<double>& data) {
    double s = 0.0;
    for (double t : data) s += log_pdf(p, t);
    return s;
}

}  // namespace bs

}  // namespace bsdist
