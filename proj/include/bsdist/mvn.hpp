#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bsdist/linalg.hpp"
#include "bsdist/math.hpp"
#include "bsdist/rng.hpp"

namespace bsdist {

// Bivariate standard normal CDF through the single-integral identity
// Phi2(h,k;rho) = Phi(h)Phi(k) + (1/2pi) Int_0^{asin rho} exp(-(h^2+k^2-2hk sin t)/(2cos^2 t)) dt.
inline double bvn_cdf(double h, double k, double rho) {
    if (!(std::fabs(rho) < 1.0)) throw std::domain_error("bvn_cdf: |rho| must be < 1");
    const double base = norm_cdf(h) * norm_cdf(k);
    if (rho == 0.0) return base;
    const double a = std::asin(rho);
    const double corr = integrate(
        [h, k](double t) {
            const double c = std::cos(t);
            return std::exp(-(h * h + k * k - 2.0 * h * k * std::sin(t)) / (2.0 * c * c));
        },
        0.0, a, QuadratureSpec{1e-15, 1e-13, 20});
    double v = base + corr / (2.0 * kPi);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

struct MvnResult {
    double value = 0.0;
    double std_error = 0.0;
};

// P(Z <= u) for Z ~ N(0, Gamma). p <= 2 is deterministic; p >= 3 uses
// randomized quasi-Monte Carlo (Richtmyer sequence) after Cholesky reduction,
// with the Monte Carlo standard error reported.
inline MvnResult mvn_cdf(const std::vector<double>& u, const Matrix& gamma,
                         std::uint64_t seed = 20240901ull, int points = 1 << 13,
                         int replicates = 12) {
    const std::size_t p = u.size();
    if (gamma.rows() != p || gamma.cols() != p)
        throw std::invalid_argument("mvn_cdf: dimension mismatch");
    if (p == 0) throw std::invalid_argument("mvn_cdf: empty input");
    if (p == 1) return {norm_cdf(u[0]), 0.0};
    if (p == 2) return {bvn_cdf(u[0], u[1], gamma(0, 1)), 0.0};

    const Matrix L = cholesky(gamma);
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<double> lattice(p - 1);
    for (std::size_t j = 0; j + 1 < p; ++j) lattice[j] = std::sqrt(primes[j % 12]);

    Rng rng(seed);
    std::vector<double> shift(p - 1);
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> y(p);
    for (int r = 0; r < replicates; ++r) {
        for (auto& s : shift) s = rng.uniform();
        double acc = 0.0;
        for (int k = 1; k <= points; ++k) {
            double prob = norm_cdf(u[0] / L(0, 0));
            if (prob <= 0.0) continue;
            double w = prob;
            bool dead = false;
            for (std::size_t j = 1; j < p; ++j) {
                double frac = k * lattice[j - 1] + shift[j - 1];
                frac -= std::floor(frac);
                // symmetrized (tent) point for lower variance
                const double point = std::fabs(2.0 * frac - 1.0);
                const double q = std::min(1.0 - 1e-16, std::max(1e-16, point * prob));
                y[j - 1] = norm_quantile(q);
                double dot = 0.0;
                for (std::size_t m = 0; m < j; ++m) dot += L(j, m) * y[m];
                prob = norm_cdf((u[j] - dot) / L(j, j));
                if (prob <= 0.0) { dead = true; break; }
                w *= prob;
            }
            acc += dead ? 0.0 : w;
        }
        const double est = acc / points;
        sum += est;
        sumsq += est * est;
    }
    MvnResult out;
    out.value = sum / replicates;
    const double var = std::max(0.0, (sumsq / replicates - out.value * out.value) / (replicates - 1));
    out.std_error = std::sqrt(var);
    if (out.value < 0.0) out.value = 0.0;
    if (out.value > 1.0) out.value = 1.0;
    return out;
}

}  // namespace bsdist
