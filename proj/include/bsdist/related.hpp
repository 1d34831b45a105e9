#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bsdist/linalg.hpp"
#include "bsdist/math.hpp"
#include "bsdist/multivariate.hpp"
#include "bsdist/optimize.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

// ---------------------------------------------------------------------------
// Sinh-normal (log-BS) distribution SN(alpha, gamma, sigma).
// ---------------------------------------------------------------------------

struct SnParams {
    double alpha;
    double gamma;
    double sigma;
    SnParams(double a, double g, double s) : alpha(a), gamma(g), sigma(s) {
        if (!(a > 0.0) || !(s > 0.0)) throw std::domain_error("SnParams: alpha, sigma must be positive");
    }
};

namespace sn {

inline double z_value(const SnParams& p, double y) {
    return 2.0 / p.alpha * std::sinh((y - p.gamma) / p.sigma);
}

inline double pdf(const SnParams& p, double y) {
    const double u = (y - p.gamma) / p.sigma;
    return 2.0 / (p.alpha * p.sigma * kSqrt2Pi) * std::cosh(u) *
           std::exp(-2.0 / (p.alpha * p.alpha) * std::sinh(u) * std::sinh(u));
}

inline double cdf(const SnParams& p, double y) { return norm_cdf(z_value(p, y)); }

inline std::vector<double> sample(const SnParams& p, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = p.sigma * std::asinh(0.5 * p.alpha * rng.normal()) + p.gamma;
    return out;
}

// MGF through the Bessel-K ratio; all Bessel arguments are alpha^-2.
inline double mgf(const SnParams& p, double s) {
    const double arg = 1.0 / (p.alpha * p.alpha);
    if (std::fabs(s) * p.sigma > 60.0) throw std::domain_error("sn::mgf: outside convergence strip");
    const double a = 0.5 * (p.sigma * s + 1.0);
    const double b = 0.5 * (p.sigma * s - 1.0);
    return std::exp(p.gamma * s) * (bessel_k(a, arg) + bessel_k(b, arg)) /
           (2.0 * bessel_k(0.5, arg));
}

inline double alpha_given(const std::vector<double>& y, double gamma, double sigma) {
    double s = 0.0;
    for (double v : y) {
        const double sh = std::sinh((v - gamma) / sigma);
        s += sh * sh;
    }
    return 2.0 * std::sqrt(s / y.size());
}

inline double loglik(const SnParams& p, const std::vector<double>& y) {
    double ll = 0.0;
    for (double v : y) ll += std::log(pdf(p, v));
    return ll;
}

struct SnFit {
    SnParams params{1.0, 0.0, 1.0};
    int iterations = 0;
    bool converged = false;
};

// Profile ML: alpha has a closed form given (gamma, sigma).
inline SnFit sn_mle(const std::vector<double>& y, double sigma_fixed = -1.0) {
    if (y.size() < 3) throw std::domain_error("sn_mle: needs n >= 3");
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    for (double v : y) var += (v - mean) * (v - mean);
    var /= y.size();
    SnFit fit;
    if (sigma_fixed > 0.0) {
        const auto obj = [&](const std::vector<double>& th) {
            const double a = alpha_given(y, th[0], sigma_fixed);
            return -loglik(SnParams(a, th[0], sigma_fixed), y);
        };
        auto r = nelder_mead(obj, {mean}, 1e-12, 1e-13);
        fit.params = SnParams(alpha_given(y, r.x[0], sigma_fixed), r.x[0], sigma_fixed);
        fit.iterations = r.iterations;
        fit.converged = r.converged;
        return fit;
    }
    const auto obj = [&](const std::vector<double>& th) {
        const double sg = std::exp(th[1]);
        const double a = alpha_given(y, th[0], sg);
        return -loglik(SnParams(a, th[0], sg), y);
    };
    auto r = nelder_mead(obj, {mean, 0.5 * std::log(std::max(var, 1e-12))}, 1e-12, 1e-13);
    const double sg = std::exp(r.x[1]);
    fit.params = SnParams(alpha_given(y, r.x[0], sg), r.x[0], sg);
    fit.iterations = r.iterations;
    fit.converged = r.converged;
    return fit;
}

}  // namespace sn

// ---------------------------------------------------------------------------
// Bivariate sinh-normal.
// ---------------------------------------------------------------------------

struct BsnParams {
    SnParams m1;
    SnParams m2;
    double rho;
    BsnParams(SnParams a, SnParams b, double r) : m1(a), m2(b), rho(r) {
        if (!(std::fabs(r) < 1.0)) throw std::domain_error("BsnParams: |rho| must be < 1");
    }
};

namespace bsn {

inline double pdf(const BsnParams& p, double y1, double y2) {
    const double u1 = (y1 - p.m1.gamma) / p.m1.sigma;
    const double u2 = (y2 - p.m2.gamma) / p.m2.sigma;
    const double z1 = 2.0 / p.m1.alpha * std::sinh(u1);
    const double z2 = 2.0 / p.m2.alpha * std::sinh(u2);
    const double r = p.rho;
    const double phi2 = std::exp(-(z1 * z1 + z2 * z2 - 2.0 * r * z1 * z2) / (2.0 * (1.0 - r * r))) /
                        (2.0 * kPi * std::sqrt(1.0 - r * r));
    // |dz_i/dy_i| = (2 / (alpha_i sigma_i)) cosh(u_i)
    return phi2 * 4.0 / (p.m1.alpha * p.m2.alpha * p.m1.sigma * p.m2.sigma) * std::cosh(u1) *
           std::cosh(u2);
}

inline std::vector<std::array<double, 2>> sample(const BsnParams& p, std::size_t n,
                                                 std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 2>> out(n);
    const double cp = 0.5 * (std::sqrt(1.0 + p.rho) + std::sqrt(1.0 - p.rho));
    const double cm = 0.5 * (std::sqrt(1.0 + p.rho) - std::sqrt(1.0 - p.rho));
    for (auto& v : out) {
        const double u1 = rng.normal(), u2 = rng.normal();
        const double z1 = cp * u1 + cm * u2, z2 = cm * u1 + cp * u2;
        v[0] = p.m1.sigma * std::asinh(0.5 * p.m1.alpha * z1) + p.m1.gamma;
        v[1] = p.m2.sigma * std::asinh(0.5 * p.m2.alpha * z2) + p.m2.gamma;
    }
    return out;
}

}  // namespace bsn

// ---------------------------------------------------------------------------
// Length-biased BS.
// ---------------------------------------------------------------------------

struct LbsParams {
    double alpha;
    double beta;
    LbsParams(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("LbsParams: parameters must be positive");
    }
};

namespace lbs {

inline double pdf(const LbsParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("lbs::pdf: t must be positive");
    const double x = t / p.beta;
    const double e = xi::value(x);
    return norm_pdf(e / p.alpha) * (std::sqrt(x) + 1.0 / std::sqrt(x)) /
           ((p.alpha * p.alpha * p.alpha + 2.0 * p.alpha) * p.beta);
}

// Stationary points in x = t/beta solve (x-1)(x^2 + (2-a^2)x + 1) = 0, so the
// density peaks at beta for a <= 2 and splits into two modes above; the global
// mode is returned.
inline double mode(const LbsParams& p) {
    const double a2 = p.alpha * p.alpha;
    if (a2 <= 4.0) return p.beta;
    const double half = 0.5 * (a2 - 2.0);
    const double disc = std::sqrt(half * half - 1.0);
    const double lo = (half - disc) * p.beta, hi = (half + disc) * p.beta;
    return pdf(p, lo) >= pdf(p, hi) ? lo : hi;
}

// E(T^r) through the weighting identity t f_BS / E(Y).
inline double moment(const LbsParams& p, int r) {
    const BsParams base(p.alpha, p.beta);
    return bs::moment(base, r + 1) / bs::moment(base, 1);
}

inline double loglik(const LbsParams& p, const std::vector<double>& data) {
    double ll = 0.0;
    for (double t : data) ll += std::log(pdf(p, t));
    return ll;
}

struct LbsFit {
    LbsParams params{1.0, 1.0};
    Matrix cov;  // inverse observed information
    bool converged = false;
};

// Observed information entries (negative Hessian of the log-likelihood).
inline Matrix observed_info(const LbsParams& p, const std::vector<double>& data) {
    const double a = p.alpha, b = p.beta;
    const double n = double(data.size());
    double S = 0.0, Sp = 0.0, Spp = 0.0, inv2 = 0.0;
    for (double t : data) {
        S += t / b + b / t - 2.0;
        Sp += 1.0 / t - t / (b * b);
        Spp += 2.0 * t / (b * b * b);
        inv2 += 1.0 / ((t + b) * (t + b));
    }
    const double den = 2.0 * a + a * a * a;
    const double dden = (2.0 + 3.0 * a * a);
    // l_aa = -(n/a^2 junk): derive from l = -S/(2a^2) - n ln(2a+a^3) + sum ln(t+b) - (3n/2) ln b
    const double l_aa = -3.0 * S / (a * a * a * a) + n * (dden * dden / (den * den) - 6.0 * a / den);
    const double l_ab = Sp / (a * a * a);
    const double l_bb = -Spp / (2.0 * a * a) + 1.5 * n / (b * b) - inv2;
    Matrix info(2, 2);
    info(0, 0) = -l_aa;
    info(0, 1) = info(1, 0) = -l_ab;
    info(1, 1) = -l_bb;
    return info;
}

inline LbsFit mle(const std::vector<double>& data) {
    const auto mm = mm_est(data);
    const auto obj = [&](const std::vector<double>& lp) {
        return -loglik(LbsParams(std::exp(lp[0]), std::exp(lp[1])), data);
    };
    auto r = nelder_mead(obj, {std::log(std::max(0.05, mm.alpha)), std::log(mm.beta)}, 1e-12, 1e-13);
    if (!r.converged) throw std::runtime_error("lbs::mle: maximization failed");
    LbsFit fit;
    fit.params = LbsParams(std::exp(r.x[0]), std::exp(r.x[1]));
    fit.cov = inverse_spd(observed_info(fit.params, data));
    fit.converged = true;
    return fit;
}

}  // namespace lbs

// ---------------------------------------------------------------------------
// Epsilon generalized BS.
// ---------------------------------------------------------------------------

struct EgbsParams {
    double alpha;
    double beta;
    double epsilon;
    EgbsParams(double a, double b, double e) : alpha(a), beta(b), epsilon(e) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("EgbsParams: alpha, beta must be positive");
        if (!(std::fabs(e) < 1.0)) throw std::domain_error("EgbsParams: |epsilon| must be < 1");
    }
};

namespace egbs {

// Normal-kernel epsilon-BS density: the kernel scale splits at w = beta.
inline double pdf(const EgbsParams& p, double w) {
    if (!(w > 0.0)) throw std::domain_error("egbs::pdf: w must be positive");
    const double tval = xi::value(w / p.beta) / p.alpha;
    const double scale = w < p.beta ? 1.0 + p.epsilon : 1.0 - p.epsilon;
    const double jac = std::pow(w, -1.5) * (w + p.beta) / (2.0 * p.alpha * std::sqrt(p.beta));
    return jac * norm_pdf(tval / scale);
}

// The base variable X has density f(x/(1+eps)) below zero and f(x/(1-eps))
// above, so P(X < 0) = (1+eps)/2.
inline std::vector<double> sample(const EgbsParams& p, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double z = std::fabs(rng.normal());
        const double x = rng.uniform() < 0.5 * (1.0 + p.epsilon) ? -(1.0 + p.epsilon) * z
                                                                 : (1.0 - p.epsilon) * z;
        const double h = 0.5 * p.alpha * x;
        const double rt = h + std::sqrt(h * h + 1.0);
        v = p.beta * rt * rt;
    }
    return out;
}

// E(W^k) by quadrature against the epsilon-skew normal base variable.
inline double moment(const EgbsParams& p, int k) {
    const auto g = [&](double x) {
        const double h = 0.5 * p.alpha * x;
        const double rt = h + std::sqrt(h * h + 1.0);
        return std::pow(p.beta * rt * rt, k);
    };
    const double lo = (1.0 + p.epsilon) *
                      integrate([&](double x) { return g(x * (1.0 + p.epsilon)) * norm_pdf(x); },
                                -14.0, 0.0, QuadratureSpec{1e-13, 1e-11, 20});
    const double hi = (1.0 - p.epsilon) *
                      integrate([&](double x) { return g(x * (1.0 - p.epsilon)) * norm_pdf(x); },
                                0.0, 14.0, QuadratureSpec{1e-13, 1e-11, 20});
    return lo + hi;
}

inline double loglik(const EgbsParams& p, const std::vector<double>& data) {
    double ll = 0.0;
    for (double w : data) ll += std::log(pdf(p, w));
    return ll;
}

inline EgbsParams mle(const std::vector<double>& data) {
    const auto mm = mm_est(data);
    const auto obj = [&](const std::vector<double>& th) {
        const double e = std::tanh(th[2]);
        return -loglik(EgbsParams(std::exp(th[0]), std::exp(th[1]), e), data);
    };
    auto r = nelder_mead(obj, {std::log(std::max(0.05, mm.alpha)), std::log(mm.beta), 0.0},
                         1e-11, 1e-12);
    if (!r.converged) throw std::runtime_error("egbs::mle: maximization failed");
    return EgbsParams(std::exp(r.x[0]), std::exp(r.x[1]), std::tanh(r.x[2]));
}

}  // namespace egbs

// ---------------------------------------------------------------------------
// Generalized BS with an elliptical kernel.
// ---------------------------------------------------------------------------

struct GbsKernel {
    std::function<double(double)> g;  // kernel of the squared standardized deviation
    double c;                         // normalizing constant of c * g(x^2)

    static GbsKernel normal() {
        return {[](double u) { return std::exp(-0.5 * u); }, 1.0 / kSqrt2Pi};
    }
    static GbsKernel student_t(double nu) {
        if (!(nu > 0.0)) throw std::domain_error("GbsKernel: nu must be positive");
        const double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                         std::sqrt(nu * kPi);
        return {[nu](double u) { return std::pow(1.0 + u / nu, -0.5 * (nu + 1.0)); }, c};
    }
    // custom kernels must come normalized: c int g(x^2) dx = 1
    static GbsKernel custom(std::function<double(double)> g, double c) {
        const GbsKernel k{std::move(g), c};
        const double total = integrate(
            [&k](double x) { return k.c * k.g(x * x); }, -60.0, 60.0, QuadratureSpec{1e-11, 1e-9, 20});
        if (std::fabs(total - 1.0) > 1e-6)
            throw std::invalid_argument("GbsKernel: kernel is not normalized");
        return k;
    }
};

namespace gbs {

inline double pdf(double alpha, double beta, const GbsKernel& k, double t) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::domain_error("gbs::pdf: bad parameters");
    if (!(t > 0.0)) throw std::domain_error("gbs::pdf: t must be positive");
    const double u = (t / beta + beta / t - 2.0) / (alpha * alpha);
    return k.c / (2.0 * alpha * std::sqrt(beta)) * std::pow(t, -1.5) * (t + beta) * k.g(u);
}

}  // namespace gbs

// Multivariate GBS with density generator h^(p); Student-t and normal built in.
struct MgbsKernel {
    std::function<double(double)> h;  // includes the normalizing constant
    static MgbsKernel normal(std::size_t p) {
        const double c = std::pow(2.0 * kPi, -0.5 * double(p));
        return {[c](double u) { return c * std::exp(-0.5 * u); }};
    }
    static MgbsKernel student_t(std::size_t p, double nu) {
        const double c = std::exp(std::lgamma(0.5 * (nu + double(p))) - std::lgamma(0.5 * nu)) /
                         std::pow(nu * kPi, 0.5 * double(p));
        return {[c, nu, p](double u) { return c * std::pow(1.0 + u / nu, -0.5 * (nu + double(p))); }};
    }
};

namespace mgbs {

inline double pdf(const MvBsParams& mp, const MgbsKernel& k, const std::vector<double>& t) {
    const auto v = mvbs::transform(mp, t);
    const std::size_t p = mp.dim();
    const Matrix L = cholesky(mp.gamma);
    std::vector<double> w(v);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t kk = 0; kk < i; ++kk) w[i] -= L(i, kk) * w[kk];
        w[i] /= L(i, i);
    }
    double quad = 0.0, halflogdet = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        quad += w[i] * w[i];
        halflogdet += std::log(L(i, i));
    }
    double jac = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double x = t[i] / mp.beta[i];
        jac *= xi::deriv(x) / (mp.alpha[i] * mp.beta[i]);
    }
    return std::exp(-halflogdet) * k.h(quad) * jac;
}

inline double loglik(const MvBsParams& mp, const MgbsKernel& k,
                     const std::vector<std::vector<double>>& rows) {
    double ll = 0.0;
    for (const auto& r : rows) ll += std::log(std::max(1e-300, pdf(mp, k, r)));
    return ll;
}

// Full ML fit at a fixed kernel: coordinates (log beta_j, log alpha_j, gamma off-diagonals).
inline std::pair<MvBsParams, double> mle_fixed_kernel(const std::vector<std::vector<double>>& rows,
                                                      const MgbsKernel& k) {
    const std::size_t p = rows.front().size();
    const MvBsParams init = mvbs::mv_mm(rows);
    std::vector<double> th;
    for (std::size_t j = 0; j < p; ++j) th.push_back(std::log(init.beta[j]));
    for (std::size_t j = 0; j < p; ++j) th.push_back(std::log(init.alpha[j]));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) th.push_back(std::atanh(init.gamma(i, j)));
    const auto build = [p](const std::vector<double>& v) {
        std::vector<double> beta(p), alpha(p);
        Matrix g(p, p);
        for (std::size_t j = 0; j < p; ++j) {
            beta[j] = std::exp(v[j]);
            alpha[j] = std::exp(v[p + j]);
            g(j, j) = 1.0;
        }
        std::size_t kk = 2 * p;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) g(i, j) = g(j, i) = std::tanh(v[kk++]);
        return MvBsParams(alpha, beta, g);
    };
    const auto obj = [&](const std::vector<double>& v) {
        try {
            return -loglik(build(v), k, rows);
        } catch (const std::exception&) {
            return 1e300;
        }
    };
    auto r = nelder_mead(obj, th, 1e-10, 1e-11, 60000);
    return {build(r.x), -r.value};
}

struct NuProfilePoint {
    double nu;
    double loglik;
};

// Profile of the maximized log-likelihood over integer t-kernel degrees of freedom.
inline std::vector<NuProfilePoint> profile_nu(const std::vector<std::vector<double>>& rows,
                                              int nu_min, int nu_max) {
    std::vector<NuProfilePoint> out;
    const std::size_t p = rows.front().size();
    for (int nu = nu_min; nu <= nu_max; ++nu) {
        const auto [params, ll] = mle_fixed_kernel(rows, MgbsKernel::student_t(p, nu));
        out.push_back({double(nu), ll});
    }
    return out;
}

}  // namespace mgbs

// Matrix-variate GBS density over an n x k positive matrix. The density
// generator carries the nk-dimensional normalizing constant
// (MgbsKernel::normal(n*k) or student_t(n*k, nu)).
inline double matrix_gbs_pdf(const Matrix& A, const Matrix& B, const MgbsKernel& kern,
                             const Matrix& T) {
    const std::size_t n = T.rows(), k = T.cols();
    if (A.rows() != n || A.cols() != k || B.rows() != n || B.cols() != k)
        throw std::invalid_argument("matrix_gbs_pdf: shape mismatch");
    double u = 0.0, jac = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double a = A(i, j), b = B(i, j), t = T(i, j);
            if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0))
                throw std::domain_error("matrix_gbs_pdf: entries must be positive");
            u += (t / b + b / t - 2.0) / (a * a);
            jac *= std::pow(t, -1.5) * (t + b) / (2.0 * a * std::sqrt(b));
        }
    return kern.h(u) * jac;
}

}  // namespace bsdist
