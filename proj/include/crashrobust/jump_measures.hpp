#pragma once

// Jump integrals for the three Levy-measure families on [0, l_max]:
//   none        -- no ordinary jumps
//   atom        -- unit mass at q (delta_q)
//   reciprocal  -- density dl / l (infinite activity, finite mean jump)

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crashrobust {

enum class MeasureKind { none, atom, reciprocal };

inline std::string_view to_string(MeasureKind k) {
    switch (k) {
    case MeasureKind::none: return "none";
    case MeasureKind::atom: return "atom";
    case MeasureKind::reciprocal: return "reciprocal";
    }
    return "?";
}

inline MeasureKind measure_kind_from_string(std::string_view s) {
    if (s == "none") return MeasureKind::none;
    if (s == "atom") return MeasureKind::atom;
    if (s == "reciprocal") return MeasureKind::reciprocal;
    throw std::invalid_argument("unknown measure kind '" + std::string(s) + "'");
}

/// Levy measure of the ordinary (non-crash) jumps.
class JumpMeasure {
public:
    JumpMeasure() = default;

    static JumpMeasure none() { return {}; }

    /// Unit atom at q with support bound l_max (defaults to q).
    static JumpMeasure atom(double q, double l_max = 0.0) {
        if (l_max == 0.0) l_max = q;
        if (!(q > 0.0) || !(q <= l_max) || !(l_max < 1.0))
            throw std::invalid_argument("atom measure requires 0 < q <= l_max < 1");
        return JumpMeasure(MeasureKind::atom, q, l_max);
    }

    static JumpMeasure reciprocal(double l_max) {
        if (!(l_max > 0.0) || !(l_max < 1.0))
            throw std::invalid_argument("reciprocal measure requires 0 < l_max < 1");
        return JumpMeasure(MeasureKind::reciprocal, 0.0, l_max);
    }

    MeasureKind kind() const { return kind_; }
    double q() const { return q_; }
    double l_max() const { return l_max_; }

    bool infinite_activity() const { return kind_ == MeasureKind::reciprocal; }

    /// Total mass of the measure (infinite for reciprocal).
    double total_mass() const {
        switch (kind_) {
        case MeasureKind::none: return 0.0;
        case MeasureKind::atom: return 1.0;
        case MeasureKind::reciprocal: return std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    /// Upper end 1/l_max of the allocation domain; +inf without jumps.
    double allocation_cap() const {
        return kind_ == MeasureKind::none ? std::numeric_limits<double>::infinity() : 1.0 / l_max_;
    }

    bool operator==(const JumpMeasure&) const = default;

private:
    JumpMeasure(MeasureKind k, double q, double l_max) : kind_(k), q_(q), l_max_(l_max) {}

    MeasureKind kind_ = MeasureKind::none;
    double q_ = 0.0;
    double l_max_ = 0.0;
};

/// Dilogarithm Li2(x) on [0, 1].
inline double dilog(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("dilog: argument outside [0, 1]");
    constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
    if (x == 1.0) return pi2_6;
    if (x > 0.5) {
        // Li2(x) + Li2(1-x) = pi^2/6 - ln(x) ln(1-x)
        return pi2_6 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    }
    double sum = 0.0;
    double power = x;
    for (int k = 1; k < 200; ++k) {
        const double term = power / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
        power *= x;
    }
    return sum;
}

namespace detail {

inline void require_nonnegative(double y, const char* what) {
    if (!(y >= 0.0)) throw std::domain_error(std::string(what) + ": allocation must be >= 0");
}

} // namespace detail

/// Integral of log(1 - y l) against the measure.
inline double log_moment(const JumpMeasure& m, double y) {
    detail::require_nonnegative(y, "log_moment");
    switch (m.kind()) {
    case MeasureKind::none:
        return 0.0;
    case MeasureKind::atom:
        if (y > m.allocation_cap() || y * m.q() >= 1.0)
            throw std::domain_error("log_moment: allocation at or beyond the atom pole");
        return std::log1p(-y * m.q());
    case MeasureKind::reciprocal: {
        const double arg = y * m.l_max();
        // the integral stays finite at y = 1/l_max (value -pi^2/6)
        if (arg > 1.0) throw std::domain_error("log_moment: allocation beyond 1/l_max");
        return -dilog(arg);
    }
    }
    return 0.0;
}

/// Integral of l / (1 - y l) against the measure, i.e. minus the y-derivative of log_moment.
inline double hazard_moment(const JumpMeasure& m, double y) {
    detail::require_nonnegative(y, "hazard_moment");
    switch (m.kind()) {
    case MeasureKind::none:
        return 0.0;
    case MeasureKind::atom:
        if (y > m.allocation_cap() || y * m.q() >= 1.0)
            throw std::domain_error("hazard_moment: allocation at or beyond the atom pole");
        return m.q() / (1.0 - y * m.q());
    case MeasureKind::reciprocal: {
        const double l = m.l_max();
        if (y * l >= 1.0) throw std::domain_error("hazard_moment: allocation at or beyond 1/l_max");
        if (y == 0.0) return l;
        return -std::log1p(-y * l) / y;
    }
    }
    return 0.0;
}

/// Integral of l against the measure.
inline double mean_jump(const JumpMeasure& m) {
    switch (m.kind()) {
    case MeasureKind::none: return 0.0;
    case MeasureKind::atom: return m.q();
    case MeasureKind::reciprocal: return m.l_max();
    }
    return 0.0;
}

} // namespace crashrobust
