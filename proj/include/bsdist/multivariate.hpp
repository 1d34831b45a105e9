#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bsdist/estimators.hpp"
#include "bsdist/linalg.hpp"
#include "bsdist/math.hpp"
#include "bsdist/mvn.hpp"
#include "bsdist/optimize.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

struct MvBsParams {
    std::vector<double> alpha;
    std::vector<double> beta;
    Matrix gamma;  // p x p correlation matrix, unit diagonal, PD

    MvBsParams(std::vector<double> a, std::vector<double> b, Matrix g)
        : alpha(std::move(a)), beta(std::move(b)), gamma(std::move(g)) {
        const std::size_t p = alpha.size();
        if (p < 2 || beta.size() != p || gamma.rows() != p || gamma.cols() != p)
            throw std::invalid_argument("MvBsParams: inconsistent dimensions (p >= 2)");
        for (std::size_t i = 0; i < p; ++i) {
            if (!(alpha[i] > 0.0) || !(beta[i] > 0.0))
                throw std::domain_error("MvBsParams: parameters must be positive");
            if (std::fabs(gamma(i, i) - 1.0) > 1e-12)
                throw std::domain_error("MvBsParams: correlation matrix needs a unit diagonal");
            for (std::size_t j = 0; j < i; ++j)
                if (std::fabs(gamma(i, j) - gamma(j, i)) > 1e-12)
                    throw std::domain_error("MvBsParams: correlation matrix must be symmetric");
        }
        cholesky(gamma);  // positive definiteness
    }

    std::size_t dim() const { return alpha.size(); }
};

inline MvBsParams make_bivariate(double a1, double b1, double a2, double b2, double rho) {
    Matrix g(2, 2);
    g(0, 0) = g(1, 1) = 1.0;
    g(0, 1) = g(1, 0) = rho;
    return MvBsParams({a1, a2}, {b1, b2}, g);
}

namespace mvbs {

inline std::vector<double> transform(const MvBsParams& mp, const std::vector<double>& t) {
    if (t.size() != mp.dim()) throw std::invalid_argument("mvbs: dimension mismatch");
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw std::domain_error("mvbs: coordinates must be positive");
        v[i] = xi::value(t[i] / mp.beta[i]) / mp.alpha[i];
    }
    return v;
}

inline double log_pdf(const MvBsParams& mp, const std::vector<double>& t) {
    const auto v = transform(mp, t);
    const std::size_t p = mp.dim();
    const Matrix L = cholesky(mp.gamma);
    // solve L w = v to get v' Gamma^-1 v = |w|^2
    std::vector<double> w(v);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < i; ++k) w[i] -= L(i, k) * w[k];
        w[i] /= L(i, i);
    }
    double quad = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        quad += w[i] * w[i];
        logdet += 2.0 * std::log(L(i, i));
    }
    double jac = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double x = t[i] / mp.beta[i];
        jac += std::log(xi::deriv(x)) - std::log(mp.alpha[i] * mp.beta[i]);
    }
    return -0.5 * p * std::log(2.0 * kPi) - 0.5 * logdet - 0.5 * quad + jac;
}

inline double pdf(const MvBsParams& mp, const std::vector<double>& t) {
    return std::exp(log_pdf(mp, t));
}

inline MvnResult cdf(const MvBsParams& mp, const std::vector<double>& t,
                     std::uint64_t seed = 20240901ull) {
    return mvn_cdf(transform(mp, t), mp.gamma, seed);
}

struct DependenceMeasures {
    double blomqvist;
    double kendall;
    double spearman;
};

inline DependenceMeasures copula_measures(double rho) {
    if (!(std::fabs(rho) < 1.0)) throw std::domain_error("copula_measures: |rho| must be < 1");
    DependenceMeasures d{};
    d.blomqvist = 2.0 / kPi * std::asin(rho);
    d.kendall = d.blomqvist;
    d.spearman = 6.0 / kPi * std::asin(0.5 * rho);
    return d;
}

inline std::vector<std::vector<double>> sample(const MvBsParams& mp, std::size_t n,
                                               std::uint64_t seed) {
    const std::size_t p = mp.dim();
    const Matrix L = cholesky(mp.gamma);
    Rng rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(p));
    std::vector<double> u(p), z(p);
    for (std::size_t k = 0; k < n; ++k) {
        for (auto& v : u) v = rng.normal();
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += L(i, j) * u[j];
            z[i] = s;
        }
        for (std::size_t i = 0; i < p; ++i) {
            const double h = 0.5 * mp.alpha[i] * z[i];
            const double rt = h + std::sqrt(h * h + 1.0);
            out[k][i] = mp.beta[i] * rt * rt;
        }
    }
    return out;
}

// Explicit 2x2 mixing construction for the bivariate case.
inline std::vector<std::vector<double>> sample_bivariate_mixing(const MvBsParams& mp,
                                                                std::size_t n,
                                                                std::uint64_t seed) {
    if (mp.dim() != 2) throw std::invalid_argument("sample_bivariate_mixing: p must be 2");
    const double rho = mp.gamma(0, 1);
    const double cp = 0.5 * (std::sqrt(1.0 + rho) + std::sqrt(1.0 - rho));
    const double cm = 0.5 * (std::sqrt(1.0 + rho) - std::sqrt(1.0 - rho));
    Rng rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(2));
    for (std::size_t k = 0; k < n; ++k) {
        const double u1 = rng.normal(), u2 = rng.normal();
        const double z1 = cp * u1 + cm * u2;
        const double z2 = cm * u1 + cp * u2;
        const double h1 = 0.5 * mp.alpha[0] * z1, h2 = 0.5 * mp.alpha[1] * z2;
        const double r1 = h1 + std::sqrt(h1 * h1 + 1.0), r2 = h2 + std::sqrt(h2 * h2 + 1.0);
        out[k][0] = mp.beta[0] * r1 * r1;
        out[k][1] = mp.beta[1] * r2 * r2;
    }
    return out;
}

// Single-coordinate marginal: plain BS(alpha_i, beta_i).
inline BsParams marginal_univariate(const MvBsParams& mp, std::size_t i) {
    return BsParams(mp.alpha.at(i), mp.beta.at(i));
}

inline MvBsParams marginal(const MvBsParams& mp, const std::vector<std::size_t>& keep) {
    if (keep.size() == 1) throw std::invalid_argument("marginal: use marginal_univariate for q=1");
    if (keep.empty()) throw std::invalid_argument("marginal: empty index set");
    std::vector<double> a, b;
    Matrix g(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        a.push_back(mp.alpha.at(keep[i]));
        b.push_back(mp.beta.at(keep[i]));
        for (std::size_t j = 0; j < keep.size(); ++j) g(i, j) = mp.gamma(keep[i], keep[j]);
    }
    return MvBsParams(std::move(a), std::move(b), std::move(g));
}

// Conditional density of the complementary block given T[given_idx] = given_val.
inline double conditional_pdf(const MvBsParams& mp, const std::vector<std::size_t>& given_idx,
                              const std::vector<double>& given_val,
                              const std::vector<std::size_t>& free_idx,
                              const std::vector<double>& free_val) {
    const std::size_t q = free_idx.size(), pg = given_idx.size();
    if (q == 0 || pg == 0 || q + pg != mp.dim())
        throw std::invalid_argument("conditional_pdf: improper partition");
    // v blocks
    std::vector<double> v1(q), v2(pg);
    for (std::size_t i = 0; i < q; ++i)
        v1[i] = xi::value(free_val[i] / mp.beta[free_idx[i]]) / mp.alpha[free_idx[i]];
    for (std::size_t i = 0; i < pg; ++i)
        v2[i] = xi::value(given_val[i] / mp.beta[given_idx[i]]) / mp.alpha[given_idx[i]];
    Matrix g11(q, q), g12(q, pg), g22(pg, pg);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j < q; ++j) g11(i, j) = mp.gamma(free_idx[i], free_idx[j]);
        for (std::size_t j = 0; j < pg; ++j) g12(i, j) = mp.gamma(free_idx[i], given_idx[j]);
    }
    for (std::size_t i = 0; i < pg; ++i)
        for (std::size_t j = 0; j < pg; ++j) g22(i, j) = mp.gamma(given_idx[i], given_idx[j]);
    const auto g22inv_v2 = solve_spd(g22, v2);
    std::vector<double> w(q);
    for (std::size_t i = 0; i < q; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < pg; ++j) s += g12(i, j) * g22inv_v2[j];
        w[i] = v1[i] - s;
    }
    // Schur complement Gamma_11.2
    Matrix schur(q, q);
    for (std::size_t i = 0; i < q; ++i) {
        std::vector<double> col(pg);
        for (std::size_t j = 0; j < pg; ++j) col[j] = g12(i, j);
        const auto sol = solve_spd(g22, col);
        for (std::size_t j = 0; j < q; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < pg; ++k) s += g12(j, k) * sol[k];
            schur(i, j) = g11(i, j) - s;
        }
    }
    const Matrix L = cholesky(schur);
    std::vector<double> ww(w);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t k = 0; k < i; ++k) ww[i] -= L(i, k) * ww[k];
        ww[i] /= L(i, i);
    }
    double quad = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        quad += ww[i] * ww[i];
        logdet += 2.0 * std::log(L(i, i));
    }
    double jac = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        const double x = free_val[i] / mp.beta[free_idx[i]];
        jac += std::log(xi::deriv(x)) - std::log(mp.alpha[free_idx[i]] * mp.beta[free_idx[i]]);
    }
    return std::exp(-0.5 * q * std::log(2.0 * kPi) - 0.5 * logdet - 0.5 * quad + jac);
}

// Reciprocal of a coordinate block: beta -> 1/beta there and the cross-block
// correlation flips sign.
inline MvBsParams reciprocal_blocks(const MvBsParams& mp, const std::vector<bool>& invert) {
    if (invert.size() != mp.dim()) throw std::invalid_argument("reciprocal_blocks: mask mismatch");
    auto a = mp.alpha;
    auto b = mp.beta;
    Matrix g = mp.gamma;
    for (std::size_t i = 0; i < mp.dim(); ++i)
        if (invert[i]) b[i] = 1.0 / b[i];
    for (std::size_t i = 0; i < mp.dim(); ++i)
        for (std::size_t j = 0; j < mp.dim(); ++j)
            if (invert[i] != invert[j]) g(i, j) = -g(i, j);
    return MvBsParams(std::move(a), std::move(b), std::move(g));
}

// ---------------------------------------------------------------------------
// Estimation.
// ---------------------------------------------------------------------------

struct MvFitResult {
    MvBsParams params;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    Matrix cov_observed;  // inverse numerical Hessian over (a1,b1,...,ap,bp,offdiag...)
    Matrix cov_opg;       // inverse outer-product-of-gradients
};

inline double alpha_given_beta(const std::vector<double>& col, double beta) {
    double s = 0.0;
    for (double t : col) {
        const double e = xi::value(t / beta);
        s += e * e;
    }
    return std::sqrt(s / col.size());
}

// Profile pieces: alpha_j(beta) closed form and Gamma(beta) = P Q P'.
inline Matrix profile_gamma(const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& beta, const std::vector<double>& alpha) {
    const std::size_t p = beta.size(), n = rows.size();
    Matrix q(p, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j; k < p; ++k) {
                const double ej = xi::value(rows[i][j] / beta[j]);
                const double ek = xi::value(rows[i][k] / beta[k]);
                q(j, k) += ej * ek;
            }
    Matrix g(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) {
            const double v = q(j, k) / (double(n) * alpha[j] * alpha[k]);
            g(j, k) = g(k, j) = v;
        }
    for (std::size_t j = 0; j < p; ++j) g(j, j) = 1.0;
    return g;
}

inline double profile_loglik(const std::vector<std::vector<double>>& rows,
                             const std::vector<double>& beta) {
    const std::size_t p = beta.size(), n = rows.size();
    std::vector<double> alpha(p);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) cols[j][i] = rows[i][j];
    for (std::size_t j = 0; j < p; ++j) alpha[j] = alpha_given_beta(cols[j], beta[j]);
    const Matrix g = profile_gamma(rows, beta, alpha);
    const Matrix L = cholesky(g);
    double ll = -0.5 * double(n) * log_det_spd(g);
    for (std::size_t j = 0; j < p; ++j) ll -= double(n) * (std::log(alpha[j]) + std::log(beta[j]));
    // quadratic form sum_i v_i' G^-1 v_i
    std::vector<double> v(p), w(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) v[j] = xi::value(rows[i][j] / beta[j]) / alpha[j];
        w = v;
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < j; ++k) w[j] -= L(j, k) * w[k];
            w[j] /= L(j, j);
        }
        for (std::size_t j = 0; j < p; ++j) ll -= 0.5 * w[j] * w[j];
        for (std::size_t j = 0; j < p; ++j) {
            const double x = rows[i][j] / beta[j];
            ll += std::log(xi::deriv(x));
        }
    }
    return ll;
}

inline MvBsParams mv_mm(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("mv_mm: empty sample");
    const std::size_t p = rows.front().size(), n = rows.size();
    std::vector<double> alpha(p), beta(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = rows[i][j];
        const auto f = mm_est(col);
        alpha[j] = f.alpha;
        beta[j] = f.beta;
    }
    const Matrix g = profile_gamma(rows, beta, alpha);
    return MvBsParams(alpha, beta, g);
}

inline MvFitResult mv_mle(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n < 3) throw std::invalid_argument("mv_mle: needs n > p");
    const std::size_t p = rows.front().size();
    if (n <= p) throw std::invalid_argument("mv_mle: needs n > p");
    const MvBsParams init = mv_mm(rows);
    const auto obj = [&](const std::vector<double>& lb) {
        std::vector<double> beta(p);
        for (std::size_t j = 0; j < p; ++j) beta[j] = std::exp(lb[j]);
        return -profile_loglik(rows, beta);
    };
    std::vector<double> lb0(p);
    for (std::size_t j = 0; j < p; ++j) lb0[j] = std::log(init.beta[j]);
    auto r = nelder_mead(obj, lb0, 1e-11, 1e-12);
    std::vector<double> beta(p), alpha(p);
    for (std::size_t j = 0; j < p; ++j) beta[j] = std::exp(r.x[j]);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = rows[i][j];
        alpha[j] = alpha_given_beta(col, beta[j]);
    }
    const Matrix g = profile_gamma(rows, beta, alpha);
    MvFitResult fit{MvBsParams(alpha, beta, g), -r.value, r.iterations, r.converged, Matrix(), Matrix()};
    if (!r.converged) throw std::runtime_error("mv_mle: profile maximization failed");

    // covariance over theta = (a_1, b_1, ..., a_p, b_p, gamma_ij upper)
    const std::size_t q = 2 * p + p * (p - 1) / 2;
    const auto pack = [&](const MvBsParams& mp) {
        std::vector<double> th(q);
        for (std::size_t j = 0; j < p; ++j) {
            th[2 * j] = mp.alpha[j];
            th[2 * j + 1] = mp.beta[j];
        }
        std::size_t k = 2 * p;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) th[k++] = mp.gamma(i, j);
        return th;
    };
    const auto unpack = [&](const std::vector<double>& th) {
        std::vector<double> a(p), b(p);
        Matrix g2(p, p);
        for (std::size_t j = 0; j < p; ++j) {
            a[j] = th[2 * j];
            b[j] = th[2 * j + 1];
            g2(j, j) = 1.0;
        }
        std::size_t k = 2 * p;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) {
                g2(i, j) = g2(j, i) = th[k++];
            }
        return MvBsParams(a, b, g2);
    };
    const auto th0 = pack(fit.params);
    const auto ll_row = [&](const std::vector<double>& th, const std::vector<double>& row) {
        return mvbs::log_pdf(unpack(th), row);
    };
    // outer product of per-row gradients
    Matrix opg(q, q);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> grad(q);
        for (std::size_t k = 0; k < q; ++k) {
            const double h = 1e-6 * std::max(1.0, std::fabs(th0[k]));
            auto tp = th0, tm = th0;
            tp[k] += h;
            tm[k] -= h;
            grad[k] = (ll_row(tp, rows[i]) - ll_row(tm, rows[i])) / (2.0 * h);
        }
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b) opg(a, b) += grad[a] * grad[b];
    }
    fit.cov_opg = inverse_spd(opg);
    // observed information
    const auto total_ll = [&](const std::vector<double>& th) {
        double s = 0.0;
        for (const auto& row : rows) s += ll_row(th, row);
        return s;
    };
    const Matrix H = numerical_hessian(total_ll, th0, 1e-4);
    Matrix info(q, q);
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b) info(a, b) = -H(a, b);
    fit.cov_observed = inverse_spd(info);
    return fit;
}

}  // namespace mvbs

using mvbs::DependenceMeasures;

}  // namespace bsdist
