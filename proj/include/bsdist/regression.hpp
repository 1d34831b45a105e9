#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bsdist/linalg.hpp"
#include "bsdist/math.hpp"
#include "bsdist/optimize.hpp"
#include "bsdist/rng.hpp"

namespace bsdist {

// Log-BS linear regression: y_i = x_i' theta + e_i with sinh-normal errors
// SN(alpha, 0, 2).
struct RegressionModel {
    Matrix design;              // n x p, full column rank
    std::vector<double> theta;  // p coefficients
    double alpha = 1.0;
};

namespace logbs_reg {

inline void check_dims(const Matrix& X, const std::vector<double>& y) {
    if (X.rows() != y.size() || X.rows() == 0)
        throw std::invalid_argument("logbs_reg: design/response dimension mismatch");
    if (X.cols() == 0 || X.rows() <= X.cols())
        throw std::invalid_argument("logbs_reg: need n > p >= 1");
}

inline double wz_loglik(const Matrix& X, const std::vector<double>& y,
                        const std::vector<double>& theta, double alpha) {
    if (theta.size() != X.cols()) throw std::invalid_argument("logbs_reg: theta size mismatch");
    double ll = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < X.cols(); ++j) mu += X(i, j) * theta[j];
        const double u = 0.5 * (y[i] - mu);
        const double w = 2.0 / alpha * std::cosh(u);
        const double z = 2.0 / alpha * std::sinh(u);
        ll += std::log(w) - 0.5 * z * z;
    }
    return ll;
}

inline double alpha_given_theta(const Matrix& X, const std::vector<double>& y,
                                const std::vector<double>& theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < X.cols(); ++j) mu += X(i, j) * theta[j];
        const double sh = std::sinh(0.5 * (y[i] - mu));
        s += sh * sh;
    }
    return 2.0 * std::sqrt(s / X.rows());
}

// Closed-form least squares; rank deficiency is rejected.
inline std::vector<double> lse(const Matrix& X, const std::vector<double>& y) {
    check_dims(X, y);
    const std::size_t p = X.cols();
    Matrix xtx(p, p);
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < p; ++j) {
            xty[j] += X(i, j) * y[i];
            for (std::size_t k = 0; k < p; ++k) xtx(j, k) += X(i, j) * X(i, k);
        }
    try {
        return solve_spd(xtx, xty);
    } catch (const std::domain_error&) {
        throw std::invalid_argument("logbs_reg: design matrix is rank deficient");
    }
}

inline double c_alpha(double alpha) {
    const double a2 = alpha * alpha;
    return 2.0 + 4.0 / a2 -
           std::sqrt(2.0 * kPi / a2) * std::erfc(std::sqrt(2.0 / a2)) * std::exp(2.0 / a2);
}

struct RegressionFit {
    std::vector<double> theta;
    double alpha = 0.0;
    Matrix cov_theta;          // 4 C(alpha)^-1 (sum x x')^-1
    double var_alpha = 0.0;    // alpha^2 / (2n)
    int iterations = 0;
    bool converged = false;
    bool multimodal_flag = false;  // multi-start disagreement at alpha > 2
};

inline RegressionFit reg_mle(const Matrix& X, const std::vector<double>& y,
                             const std::vector<double>* init = nullptr,
                             std::uint64_t seed = 1234) {
    check_dims(X, y);
    const std::size_t p = X.cols(), n = X.rows();
    std::vector<double> th0 = init ? *init : lse(X, y);
    const auto profile = [&](const std::vector<double>& th) {
        const double a = std::max(1e-8, alpha_given_theta(X, y, th));
        return -wz_loglik(X, y, th, a);
    };
    auto best = bfgs_minimize(profile, th0, 1e-8);
    {
        // simplex polish from the quasi-Newton point settles the last digits
        auto polish = nelder_mead(profile, best.x, 1e-11, 1e-12);
        if (polish.value <= best.value) {
            polish.converged = polish.converged || best.converged;
            polish.iterations += best.iterations;
            best = polish;
        } else {
            best.converged = best.converged || polish.converged;
        }
    }
    RegressionFit fit;
    fit.theta = best.x;
    fit.alpha = alpha_given_theta(X, y, best.x);
    fit.iterations = best.iterations;
    fit.converged = best.converged;

    // bimodality guard: the error law is bimodal for alpha > 2, so rerun from
    // jittered starts and keep the best
    if (fit.alpha > 2.0) {
        Rng rng(seed);
        double best_v = best.value;
        for (int k = 0; k < 5; ++k) {
            auto start = th0;
            for (auto& v : start) v += 0.5 * rng.normal() * (std::fabs(v) + 1.0);
            auto alt = nelder_mead(profile, start, 1e-12, 1e-13);
            if (alt.value < best_v - 1e-6) {
                fit.multimodal_flag = true;
                best_v = alt.value;
                fit.theta = alt.x;
                fit.alpha = alpha_given_theta(X, y, alt.x);
            }
        }
    }

    // asymptotic covariance: theta block 4 C(alpha)^-1 (X'X)^-1, alpha block a^2/(2n)
    Matrix xtx(p, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k) xtx(j, k) += X(i, j) * X(i, k);
    fit.cov_theta = inverse_spd(xtx);
    const double scale = 4.0 / c_alpha(fit.alpha);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) fit.cov_theta(j, k) *= scale;
    fit.var_alpha = fit.alpha * fit.alpha / (2.0 * double(n));
    if (!fit.converged) throw std::runtime_error("reg_mle: optimizer failed");
    return fit;
}

inline std::vector<double> residual_z(const Matrix& X, const std::vector<double>& y,
                                      const RegressionFit& fit) {
    std::vector<double> z(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < X.cols(); ++j) mu += X(i, j) * fit.theta[j];
        z[i] = 2.0 / fit.alpha * std::sinh(0.5 * (y[i] - mu));
    }
    return z;
}

}  // namespace logbs_reg

}  // namespace bsdist
