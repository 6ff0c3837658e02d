#pragma once

// Backward solvers for the indifference exposure:
//   ODE  v'(t) = -f(v(t)),  v(T) = 0                       (frozen coefficients)
//   PDE  v_t + mu v_x + (varsigma^2 / 2) v_xx + f(x, v) = 0,  v(T, x) = 0
// and the policy pi(t, x) = (1 - e^{-(v v 0)}) / l_woc derived from v.

#include "crashrobust/io.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace crashrobust {

/// Dense row-major matrix; rows are time levels, columns space nodes.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    double* row(std::size_t i) { return data_.data() + i * cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Uniform space grid with n_x + 1 nodes on [x_min, x_max].
struct SpaceGrid {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n_x = 200;

    void validate() const {
        if (!(x_min < x_max)) throw std::invalid_argument("space grid requires x_min < x_max");
        if (n_x < 2) throw std::invalid_argument("space grid requires n_x >= 2");
    }

    double dx() const { return (x_max - x_min) / static_cast<double>(n_x); }
    double node(std::size_t j) const { return j == n_x ? x_max : x_min + dx() * static_cast<double>(j); }
    std::size_t size() const { return n_x + 1; }
};

namespace detail {

/// Round up to the next multiple of 0.2 * 10^floor(log10 x).
inline double round_up_coarse(double x) {
    const double step = 0.2 * std::pow(10.0, std::floor(std::log10(x)));
    return std::ceil(x / step - 1e-12) * step;
}

} // namespace detail

/// Truncated domain: cir -> [0, theta + 8 sd] rounded up, ou -> theta +- 6 sd.
inline SpaceGrid default_space_grid(const FactorDynamics& f, std::size_t n_x) {
    const double sd = f.stationary_sd();
    if (f.kind == FactorKind::cir) return {0.0, detail::round_up_coarse(f.theta + 8.0 * sd), n_x};
    return {f.theta - 6.0 * sd, f.theta + 6.0 * sd, n_x};
}

struct SolverConfig {
    std::size_t n_t = 1000;
    std::size_t n_x = 200;
    double theta_weight = 0.5;
    std::size_t picard_iters = 3;
    double tol = 1e-13;
    /// Domain override; NaN selects default_space_grid.
    double x_min = std::numeric_limits<double>::quiet_NaN();
    double x_max = std::numeric_limits<double>::quiet_NaN();

    void validate() const {
        if (n_t < 2 || n_x < 2) throw std::invalid_argument("n_t and n_x must be >= 2");
        if (!(theta_weight >= 0.0 && theta_weight <= 1.0)) throw std::invalid_argument("theta_weight must lie in [0, 1]");
        if (picard_iters < 1) throw std::invalid_argument("picard_iters must be >= 1");
    }

    SpaceGrid grid_for(const FactorDynamics& f) const {
        SpaceGrid g = default_space_grid(f, n_x);
        if (!std::isnan(x_min)) g.x_min = x_min;
        if (!std::isnan(x_max)) g.x_max = x_max;
        g.validate();
        return g;
    }
};

struct ValueSurface {
    std::vector<double> times;
    SpaceGrid space;
    Matrix v;
    double max_picard_residual = 0.0;

    double horizon() const { return times.back(); }
};

struct PolicySurface {
    std::vector<double> times;
    SpaceGrid space;
    Matrix pi;
};

/// Classic RK4 backward from v(T) = 0 on a uniform grid; returns v(t_i), i = 0..n_t.
inline std::vector<double> solve_ode(const std::function<double(double)>& f, double horizon, std::size_t n_t) {
    if (n_t < 1) throw std::invalid_argument("solve_ode: n_t must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("solve_ode: horizon must be > 0");
    const double h = horizon / static_cast<double>(n_t);
    auto rhs = [&](double y) {
        const double val = f(y);
        if (!std::isfinite(val) || std::abs(val) > 1e6) throw std::runtime_error("solve_ode: generator magnitude exceeds 1e6");
        return val;
    };
    std::vector<double> v(n_t + 1, 0.0);
    // in reversed time s = T - t the equation reads dv/ds = f(v)
    for (std::size_t i = n_t; i-- > 0;) {
        const double y = v[i + 1];
        const double k1 = rhs(y);
        const double k2 = rhs(y + 0.5 * h * k1);
        const double k3 = rhs(y + 0.5 * h * k2);
        const double k4 = rhs(y + h * k3);
        v[i] = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    return v;
}

/// ODE solution for the model with sigma^2 and lambda evaluated at x0.
inline std::vector<double> solve_ode_constant(const ModelSpec& model, double x0, std::size_t n_t) {
    const GeneratorAtPoint f(model, x0);
    return solve_ode([&](double y) { return f(y); }, model.horizon, n_t);
}

namespace detail {

/// Solves a tridiagonal system in place (Thomas algorithm). `rhs` is overwritten with the solution.
inline void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                              const std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double denom = diag[0];
    if (denom == 0.0) throw std::runtime_error("solve_tridiagonal: singular system");
    c[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0) throw std::runtime_error("solve_tridiagonal: singular system");
        c[i] = i + 1 < n ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

/// Upwinded advection-diffusion operator L as three diagonals.
struct Operator {
    std::vector<double> lower, diag, upper;

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const std::size_t n = v.size();
        for (std::size_t j = 0; j < n; ++j) {
            double s = diag[j] * v[j];
            if (j > 0) s += lower[j] * v[j - 1];
            if (j + 1 < n) s += upper[j] * v[j + 1];
            out[j] = s;
        }
    }
};

inline Operator build_operator(const FactorDynamics& f, const SpaceGrid& g) {
    const std::size_t n = g.size();
    const double dx = g.dx();
    Operator op{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t j = 0; j < n; ++j) {
        const double x = g.node(j);
        const double sig = f.diffusion(x);
        const double mu = f.drift(x);
        const double a = 0.5 * sig * sig / (dx * dx);
        const bool degenerate = sig == 0.0;
        double lo = 0.0;
        double up = 0.0;
        if (!degenerate && std::abs(mu) * dx <= sig * sig) {
            // central advection keeps both off-diagonals nonnegative here
            lo = a - 0.5 * mu / dx;
            up = a + 0.5 * mu / dx;
        } else {
            lo = a + std::max(-mu, 0.0) / dx;
            up = a + std::max(mu, 0.0) / dx;
        }
        if (j == 0) {
            // degenerate edge: the PDE itself with inward one-sided advection;
            // otherwise mirror ghost node (zero gradient)
            if (degenerate) lo = 0.0;
            up += lo;
            lo = 0.0;
        } else if (j + 1 == n) {
            if (degenerate) up = 0.0;
            lo += up;
            up = 0.0;
        }
        op.lower[j] = lo;
        op.upper[j] = up;
        op.diag[j] = -(lo + up);
    }
    return op;
}

} // namespace detail

/// Generators at every node; nodes with sigma^2 <= 0 use the first interior node.
inline std::vector<GeneratorAtPoint> node_generators(const ModelSpec& model, const SpaceGrid& g) {
    std::vector<GeneratorAtPoint> out;
    out.reserve(g.size());
    const double floor_x = g.node(1);
    for (std::size_t j = 0; j < g.size(); ++j) {
        double x = g.node(j);
        if (!(model.sigma_sq(x) > 0.0)) x = std::max(x, floor_x);
        out.emplace_back(model, x);
    }
    return out;
}

/// IMEX theta-scheme with Picard passes on the nonlinear source.
inline ValueSurface solve_pde(const ModelSpec& model, const SolverConfig& cfg) {
    model.validate();
    cfg.validate();
    ValueSurface vs;
    vs.space = cfg.grid_for(model.factor);
    vs.times = uniform_grid(model.horizon, cfg.n_t);
    const std::size_t nx = vs.space.size();
    vs.v = Matrix(cfg.n_t + 1, nx, 0.0);

    const auto gens = node_generators(model, vs.space);
    const auto op = detail::build_operator(model.factor, vs.space);
    const double dt = model.horizon / static_cast<double>(cfg.n_t);
    const double w = cfg.theta_weight;

    std::vector<double> lower(nx), diag(nx), upper(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        lower[j] = -dt * w * op.lower[j];
        diag[j] = 1.0 - dt * w * op.diag[j];
        upper[j] = -dt * w * op.upper[j];
    }

    std::vector<double> next(nx, 0.0), lv(nx), base(nx), src_next(nx), iterate(nx), sol(nx);
    for (std::size_t i = cfg.n_t; i-- > 0;) {
        const double* vn = vs.v.row(i + 1);
        std::copy(vn, vn + nx, next.begin());
        op.apply(next, lv);
        for (std::size_t j = 0; j < nx; ++j) {
            src_next[j] = gens[j](next[j]);
            base[j] = next[j] + dt * (1.0 - w) * (lv[j] + src_next[j]);
        }
        iterate = next;
        double residual = 0.0;
        for (std::size_t it = 0; it < cfg.picard_iters; ++it) {
            for (std::size_t j = 0; j < nx; ++j) sol[j] = base[j] + dt * w * gens[j](iterate[j]);
            detail::solve_tridiagonal(lower, diag, upper, sol);
            residual = 0.0;
            for (std::size_t j = 0; j < nx; ++j) residual = std::max(residual, std::abs(sol[j] - iterate[j]));
            iterate.swap(sol);
            if (residual <= cfg.tol) break;
        }
        vs.max_picard_residual = std::max(vs.max_picard_residual, residual);
        std::copy(iterate.begin(), iterate.end(), vs.v.row(i));
    }
    return vs;
}

inline PolicySurface policy_surface(const ValueSurface& vs, double l_woc) {
    PolicySurface ps{vs.times, vs.space, Matrix(vs.v.rows(), vs.v.cols())};
    for (std::size_t i = 0; i < vs.v.rows(); ++i)
        for (std::size_t j = 0; j < vs.v.cols(); ++j) ps.pi(i, j) = exposure_to_strategy(vs.v(i, j), l_woc);
    return ps;
}

struct SurfaceValue {
    double value = 0.0;
    bool clamped = false;
};

/// Bilinear interpolation on a (times x space) matrix; t and x are clamped to the grid.
inline SurfaceValue interpolate(const std::vector<double>& times, const SpaceGrid& g, const Matrix& m, double t,
                                double x) {
    SurfaceValue out;
    const double xc = std::clamp(x, g.x_min, g.x_max);
    out.clamped = xc != x;
    const double tc = std::clamp(t, times.front(), times.back());
    const std::size_t nt = times.size() - 1;
    const double dt = (times.back() - times.front()) / static_cast<double>(nt);
    double ti = (tc - times.front()) / dt;
    std::size_t i = std::min(static_cast<std::size_t>(ti), nt - 1);
    double ft = std::clamp(ti - static_cast<double>(i), 0.0, 1.0);
    double xi = (xc - g.x_min) / g.dx();
    std::size_t j = std::min(static_cast<std::size_t>(xi), g.n_x - 1);
    double fx = std::clamp(xi - static_cast<double>(j), 0.0, 1.0);
    const double v00 = m(i, j), v01 = m(i, j + 1), v10 = m(i + 1, j), v11 = m(i + 1, j + 1);
    out.value = (1 - ft) * ((1 - fx) * v00 + fx * v01) + ft * ((1 - fx) * v10 + fx * v11);
    return out;
}

inline SurfaceValue eval_policy(const PolicySurface& ps, double t, double x) {
    return interpolate(ps.times, ps.space, ps.pi, t, x);
}

inline SurfaceValue eval_value(const ValueSurface& vs, double t, double x) {
    return interpolate(vs.times, vs.space, vs.v, t, x);
}

/// d/dx of the surface: central differences inside, one-sided at the edges.
inline Matrix dx_surface(const ValueSurface& vs) {
    const std::size_t nx = vs.v.cols();
    const double dx = vs.space.dx();
    Matrix out(vs.v.rows(), nx);
    for (std::size_t i = 0; i < vs.v.rows(); ++i) {
        const double* r = vs.v.row(i);
        out(i, 0) = (r[1] - r[0]) / dx;
        out(i, nx - 1) = (r[nx - 1] - r[nx - 2]) / dx;
        for (std::size_t j = 1; j + 1 < nx; ++j) out(i, j) = (r[j + 1] - r[j - 1]) / (2.0 * dx);
    }
    return out;
}

namespace detail {

inline void write_long_csv(std::ostream& os, const std::vector<double>& times, const SpaceGrid& g, const Matrix& m) {
    os << "t,x,v\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const std::string t = format_double(times[i]);
        for (std::size_t j = 0; j < m.cols(); ++j)
            os << t << ',' << format_double(g.node(j)) << ',' << format_double(m(i, j)) << '\n';
    }
}

} // namespace detail

/// Long-format CSV `t,x,v`, time-major.
inline void write_csv(std::ostream& os, const ValueSurface& vs) { detail::write_long_csv(os, vs.times, vs.space, vs.v); }

inline void write_csv(std::ostream& os, const PolicySurface& ps) { detail::write_long_csv(os, ps.times, ps.space, ps.pi); }

} // namespace crashrobust
