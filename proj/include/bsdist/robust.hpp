#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bsdist/estimators.hpp"
#include "bsdist/linalg.hpp"
#include "bsdist/math.hpp"
#include "bsdist/univariate.hpp"

namespace bsdist {

// Score vector of the BS log-density in (alpha, beta).
inline std::array<double, 2> bs_score(const BsParams& p, double t) {
    const double a = p.alpha, b = p.beta;
    const double sa = (-a * a * b * t + t * t - 2.0 * b * t + b * b) / (a * a * a * b * t);
    const double sb = (-b * a * a * t * t + b * b * a * a * t + t * t * t - b * b * t + b * t * t -
                       b * b * b) /
                      (2.0 * b * b * a * a * t * (t + b));
    return {sa, sb};
}

struct ObreConfig {
    double c = 4.0;          // influence-function bound, must exceed sqrt(2)
    double eta = 1e-6;       // relative step tolerance of the outer loop
    int max_outer = 200;
    int inner_iter = 60;
    QuadratureSpec quad{1e-11, 1e-9, 20};

    void validate() const {
        if (!(c > kSqrt2)) throw std::domain_error("ObreConfig: c must exceed sqrt(2)");
        if (!(eta > 0.0)) throw std::domain_error("ObreConfig: eta must be positive");
    }
};

struct ObreState {
    Matrix A{2, 2};
    std::array<double, 2> a{0.0, 0.0};
    double alpha = 0.0;
    double beta = 0.0;
};

struct ObreResult : FitResult {
    ObreState state;
    std::vector<double> weights;
};

namespace detail_obre {

inline double weight(const Matrix& A, const std::array<double, 2>& a,
                     const std::array<double, 2>& s, double c) {
    const double d0 = s[0] - a[0], d1 = s[1] - a[1];
    const double n0 = A(0, 0) * d0 + A(0, 1) * d1;
    const double n1 = A(1, 0) * d0 + A(1, 1) * d1;
    const double norm = std::sqrt(n0 * n0 + n1 * n1);
    return norm <= c ? 1.0 : c / norm;
}

// E[g(T) W_c^k ...] under BS(alpha, beta) through the normal substitution.
template <class G>
inline double expect(const BsParams& p, const G& g, const QuadratureSpec& spec) {
    return integrate(
        [&](double z) {
            const double az = p.alpha * z;
            const double rt = 0.5 * (az + std::sqrt(az * az + 4.0));
            return g(p.beta * rt * rt) * norm_pdf(z);
        },
        -10.0, 10.0, spec);
}

}  // namespace detail_obre

// Optimal bias-robust estimator of (alpha, beta); weighted-score M-estimation
// with weights W_c = min(1, c/||A(s-a)||).
inline ObreResult obre(const std::vector<double>& data, ObreConfig cfg = {},
                       const FitResult* start = nullptr) {
    cfg.validate();
    if (data.size() < 2) throw std::domain_error("obre: needs n >= 2");
    const FitResult init = start ? *start : mm_est(data);

    ObreState st;
    st.alpha = std::max(1e-6, init.alpha);
    st.beta = init.beta;
    // A = per-observation I(alpha,beta)^{-1/2} (diagonal), a = 0
    {
        const auto fi = fisher_info(BsParams(st.alpha, st.beta), 1);
        st.A = Matrix(2, 2);
        st.A(0, 0) = 1.0 / std::sqrt(fi.i_aa);
        st.A(1, 1) = 1.0 / std::sqrt(fi.i_bb);
        st.a = {0.0, 0.0};
    }

    ObreResult out;
    out.method = "obre";
    int outer = 0;
    for (; outer < cfg.max_outer; ++outer) {
        const BsParams p(st.alpha, st.beta);
        // inner fixed point for (a, A): A'A = M2^-1 and a = E[s W]/E[W]
        for (int inner = 0; inner < cfg.inner_iter; ++inner) {
            const auto w_of = [&](double t) {
                return detail_obre::weight(st.A, st.a, bs_score(p, t), cfg.c);
            };
            const double ew = detail_obre::expect(p, w_of, cfg.quad);
            std::array<double, 2> a_new{};
            for (int k = 0; k < 2; ++k) {
                a_new[k] = detail_obre::expect(
                               p, [&](double t) { return bs_score(p, t)[k] * w_of(t); }, cfg.quad) /
                           ew;
            }
            Matrix m2(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = i; j < 2; ++j) {
                    m2(i, j) = m2(j, i) = detail_obre::expect(
                        p,
                        [&](double t) {
                            const auto s = bs_score(p, t);
                            const double w = w_of(t);
                            return (s[i] - st.a[i]) * (s[j] - st.a[j]) * w * w;
                        },
                        cfg.quad);
                }
            const Matrix A_new = cholesky(inverse_spd(m2)).transposed();  // A'A = M2^-1
            double diff = std::fabs(a_new[0] - st.a[0]) + std::fabs(a_new[1] - st.a[1]);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) diff += std::fabs(A_new(i, j) - st.A(i, j));
            st.a = a_new;
            st.A = A_new;
            if (diff < 1e-8) break;
        }
        // Newton-type step: delta = M1^-1 mean((s - a) W)
        const auto w_of = [&](double t) {
            return detail_obre::weight(st.A, st.a, bs_score(p, t), cfg.c);
        };
        Matrix m1(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                m1(i, j) = m1(j, i) = detail_obre::expect(
                    p,
                    [&](double t) {
                        const auto s = bs_score(p, t);
                        return (s[i] - st.a[i]) * (s[j] - st.a[j]) * w_of(t);
                    },
                    cfg.quad);
            }
        std::array<double, 2> mean{0.0, 0.0};
        for (double t : data) {
            const auto s = bs_score(p, t);
            const double w = w_of(t);
            mean[0] += (s[0] - st.a[0]) * w;
            mean[1] += (s[1] - st.a[1]) * w;
        }
        mean[0] /= data.size();
        mean[1] /= data.size();
        const auto delta = solve_spd(m1, {mean[0], mean[1]});
        // damped update keeping parameters positive
        double step = 1.0;
        while ((st.alpha + step * delta[0] <= 0.0 || st.beta + step * delta[1] <= 0.0) &&
               step > 1e-6)
            step *= 0.5;
        st.alpha += step * delta[0];
        st.beta += step * delta[1];
        if (std::max(std::fabs(step * delta[0] / st.alpha), std::fabs(step * delta[1] / st.beta)) <=
            cfg.eta)
            break;
    }
    if (outer >= cfg.max_outer) {
        out.alpha = st.alpha;
        out.beta = st.beta;
        out.state = st;
        throw std::runtime_error("obre: no convergence within max_outer iterations");
    }
    out.alpha = st.alpha;
    out.beta = st.beta;
    out.converged = true;
    out.iterations = outer + 1;
    out.state = st;
    const BsParams p(st.alpha, st.beta);
    out.weights.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out.weights[i] = detail_obre::weight(st.A, st.a, bs_score(p, data[i]), cfg.c);
    return out;
}

// E[Psi] at the fitted parameters; the consistency side condition.
inline std::array<double, 2> obre_psi_expectation(const ObreResult& fit, ObreConfig cfg = {}) {
    const BsParams p(fit.alpha, fit.beta);
    std::array<double, 2> e{};
    for (int k = 0; k < 2; ++k) {
        e[k] = detail_obre::expect(
            p,
            [&](double t) {
                const auto s = bs_score(p, t);
                const double w = detail_obre::weight(fit.state.A, fit.state.a, s, cfg.c);
                return (s[k] - fit.state.a[k]) * w;
            },
            cfg.quad);
    }
    return e;
}

}  // namespace bsdist
