#pragma once

// Reference computations for the tests. None of these call the library's closed forms.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// int_0^lmax log(1 - y l) / l dl, integrand continued by its limit -y at l = 0.
inline double reciprocal_log_moment(double y, double l_max) {
    auto g = [y](double l) { return l == 0.0 ? -y : std::log1p(-y * l) / l; };
    // split near the upper end where the integrand steepens
    const double mid = 0.5 * l_max;
    return integrate(g, 0.0, mid) + integrate(g, mid, l_max);
}

/// int_0^lmax 1 / (1 - y l) dl
inline double reciprocal_hazard(double y, double l_max) {
    return integrate([y](double l) { return 1.0 / (1.0 - y * l); }, 0.0, l_max);
}

/// Li2(x) by direct summation with an explicit tail estimate.
inline double dilog_series(double x) {
    const int n = 2000000;
    double s = 0.0;
    std::vector<double> terms;
    terms.reserve(n);
    double p = 1.0;
    for (int k = 1; k <= n; ++k) {
        p *= x;
        if (p < 1e-300) break;
        terms.push_back(p / (static_cast<double>(k) * k));
    }
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) s += *it;
    if (x == 1.0) {
        const double N = static_cast<double>(terms.size());
        s += 1.0 / N - 1.0 / (2.0 * N * N) + 1.0 / (6.0 * N * N * N);
    } else if (p >= 1e-300) {
        // sum_{k>N} e^{-a k} / k^2 ~ int_{N+1/2}^inf e^{-a t} / t^2 dt = E_2(a (N + 1/2)) / (N + 1/2)
        const double N = static_cast<double>(terms.size()) + 0.5;
        const double z = -std::log(x) * N;
        const double e1 = -std::expint(-z);
        s += (std::exp(-z) - z * e1) / N;
    }
    return s;
}

/// argmax of a concave function on [a, b] by golden-section search.
inline double golden_max(const std::function<double(double)>& f, double a, double b, int iters = 300) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && b - a > 1e-15; ++i) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        }
    }
    return 0.5 * (a + b);
}

/// Fixed-seed generator for randomized parameter draws in tests.
inline std::mt19937_64& test_rng() {
    static std::mt19937_64 rng(20261014);
    return rng;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(test_rng()); }

} // namespace oracle
