#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bsdist {

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q(z) = 2 sum (-1)^{k-1} exp(-2k^2z^2).
inline double ks_asymptotic_pvalue(double z) {
    if (z <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * z * z);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// One-sample KS against a fitted CDF.
inline KsResult ks_test(std::vector<double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double F = cdf(data[i]);
        d = std::max(d, std::max((i + 1) / n - F, F - i / n));
    }
    return {d, ks_asymptotic_pvalue(std::sqrt(n) * d)};
}

// Two-sample KS.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
    }
    const double ne = double(a.size()) * b.size() / (a.size() + b.size());
    return {d, ks_asymptotic_pvalue(std::sqrt(ne) * d)};
}

}  // namespace bsdist
