#pragma once

// Post-crash optimal allocation psi(lambda, sigma^2): the maximiser of
//   y -> lambda y - sigma^2 y^2 / 2 + log_moment(m, y)   over [0, 1/l_max].

#include "crashrobust/jump_measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string_view>

namespace crashrobust {

enum class BoundaryCase { interior, at_zero, at_cap };

inline std::string_view to_string(BoundaryCase b) {
    switch (b) {
    case BoundaryCase::interior: return "interior";
    case BoundaryCase::at_zero: return "at_zero";
    case BoundaryCase::at_cap: return "at_cap";
    }
    return "?";
}

struct PsiResult {
    double value = 0.0;
    BoundaryCase boundary_case = BoundaryCase::at_zero;
};

/// Classical Merton ratio (lambda / sigma^2) v 0.
inline double merton_no_jump(double lambda, double sigma_sq) {
    if (!(sigma_sq > 0.0)) throw std::domain_error("merton_no_jump: sigma^2 must be > 0");
    return lambda > 0.0 ? lambda / sigma_sq : 0.0;
}

/// Closed-form maximiser for a unit atom at `jump` (clamped to [0, 1/jump]).
inline double psi_closed_atom(double lambda, double sigma_sq, double jump) {
    if (!(sigma_sq > 0.0)) throw std::domain_error("psi_closed_atom: sigma^2 must be > 0");
    if (!(jump > 0.0 && jump < 1.0)) throw std::domain_error("psi_closed_atom: atom size must lie in (0, 1)");
    // smaller root of sigma^2 L y^2 - (lambda L + sigma^2) y + (lambda - L) = 0,
    // written as 2c / (b + sqrt(D)) to avoid cancellation
    const double b = lambda * jump + sigma_sq;
    const double disc = jump * jump * (lambda * lambda + 4.0 * sigma_sq) - 2.0 * jump * lambda * sigma_sq +
                        sigma_sq * sigma_sq;
    const double root = 2.0 * (lambda - jump) / (b + std::sqrt(disc));
    if (root <= 0.0) return 0.0;
    return std::min(root, 1.0 / jump);
}

/// Derivative of the post-crash objective in the allocation.
inline double growth_slope(double lambda, double sigma_sq, const JumpMeasure& m, double y) {
    return lambda - sigma_sq * y - hazard_moment(m, y);
}

/// Maximiser by bisection on the strictly decreasing slope.
inline PsiResult psi_numeric(double lambda, double sigma_sq, const JumpMeasure& m) {
    if (!(sigma_sq > 0.0)) throw std::domain_error("psi_numeric: sigma^2 must be > 0");
    if (m.kind() == MeasureKind::none) {
        const double v = merton_no_jump(lambda, sigma_sq);
        return {v, v > 0.0 ? BoundaryCase::interior : BoundaryCase::at_zero};
    }
    if (growth_slope(lambda, sigma_sq, m, 0.0) <= 0.0) return {0.0, BoundaryCase::at_zero};

    const double cap = m.allocation_cap();
    // hazard stays finite at the cap only for an atom strictly inside the support
    const bool finite_at_cap = m.kind() == MeasureKind::atom && m.q() < m.l_max();
    if (finite_at_cap && growth_slope(lambda, sigma_sq, m, cap) >= 0.0) return {cap, BoundaryCase::at_cap};

    double lo = 0.0;
    double hi = cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return {mid, BoundaryCase::interior};
        const double slope = growth_slope(lambda, sigma_sq, m, mid);
        if (std::abs(slope) <= 1e-12) return {mid, BoundaryCase::interior};
        (slope > 0.0 ? lo : hi) = mid;
    }
    throw std::runtime_error("psi_numeric: bisection did not converge");
}

/// Excess return lambda that makes `alpha` the post-crash optimum for the given sigma^2.
inline double appropriate_lambda(double alpha, double sigma_sq, const JumpMeasure& m) {
    if (!(alpha > 0.0 && alpha < m.allocation_cap()))
        throw std::domain_error("appropriate_lambda: alpha must lie in (0, 1/l_max)");
    return sigma_sq * alpha + hazard_moment(m, alpha);
}

} // namespace crashrobust
