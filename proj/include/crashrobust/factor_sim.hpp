#pragma once

// Exact-in-distribution stepping of the CIR and OU factors.
//
// CIR: z_{t+dt} = c X,  X ~ noncentral chi^2(d, z e^{-kappa dt} / c),
//      c = varsigma^2 (1 - e^{-kappa dt}) / (4 kappa),  d = 4 kappa theta / varsigma^2.
// OU:  z_{t+dt} ~ N(theta + (z - theta) e^{-kappa dt}, varsigma^2 (1 - e^{-2 kappa dt}) / (2 kappa)).

#include "crashrobust/io.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/rng.hpp"
#include "crashrobust/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace crashrobust {

struct CirTransition {
    double scale = 0.0;   // c
    double dof = 0.0;     // d
    double decay = 0.0;   // e^{-kappa dt}

    double noncentrality(double z) const { return z * decay / scale; }
};

inline CirTransition cir_transition_params(double kappa, double theta, double varsigma, double dt) {
    if (!(kappa > 0.0) || !(theta > 0.0) || !(varsigma > 0.0) || !(dt > 0.0))
        throw std::domain_error("cir_transition_params: parameters and dt must be > 0");
    const double s2 = varsigma * varsigma;
    return {-s2 * std::expm1(-kappa * dt) / (4.0 * kappa), 4.0 * kappa * theta / s2, std::exp(-kappa * dt)};
}

/// Draw X ~ noncentral chi^2(dof, nc).
inline double noncentral_chi_square(double dof, double nc, RngStream& rng) {
    if (dof > 1.0) {
        const double g = rng.normal() + std::sqrt(nc);
        return g * g + rng.chi_square(dof - 1.0);
    }
    const auto n = rng.poisson(0.5 * nc);
    return rng.chi_square(dof + 2.0 * static_cast<double>(n));
}

inline double cir_sample_step(double z, const CirTransition& tr, RngStream& rng) {
    if (!(z >= 0.0)) throw std::domain_error("cir_sample_step: state must be >= 0");
    return tr.scale * noncentral_chi_square(tr.dof, tr.noncentrality(z), rng);
}

inline double cir_sample_step(double z, double dt, const FactorDynamics& f, RngStream& rng) {
    return cir_sample_step(z, cir_transition_params(f.kappa, f.theta, f.varsigma, dt), rng);
}

inline double ou_sample_step(double z, double dt, const FactorDynamics& f, RngStream& rng) {
    if (!(dt > 0.0)) throw std::domain_error("ou_sample_step: dt must be > 0");
    const double decay = std::exp(-f.kappa * dt);
    const double var = -f.varsigma * f.varsigma * std::expm1(-2.0 * f.kappa * dt) / (2.0 * f.kappa);
    return f.theta + (z - f.theta) * decay + std::sqrt(var) * rng.normal();
}

struct TransitionMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline TransitionMoments transition_moments(const FactorDynamics& f, double z, double dt) {
    const double e1 = std::exp(-f.kappa * dt);
    const double s2 = f.varsigma * f.varsigma;
    const double mean = f.theta + (z - f.theta) * e1;
    if (f.kind == FactorKind::ou) return {mean, -s2 * std::expm1(-2.0 * f.kappa * dt) / (2.0 * f.kappa)};
    const double one_minus = -std::expm1(-f.kappa * dt);
    const double var = z * (s2 / f.kappa) * (e1 - e1 * e1) + f.theta * (s2 / (2.0 * f.kappa)) * one_minus * one_minus;
    return {mean, var};
}

/// One exact step with the transition law precomputed for a fixed dt.
class FactorStepper {
public:
    FactorStepper(const FactorDynamics& f, double dt) : f_(f), dt_(dt) {
        if (!(dt > 0.0)) throw std::domain_error("FactorStepper: dt must be > 0");
        f.validate();
        if (f.kind == FactorKind::cir) cir_ = cir_transition_params(f.kappa, f.theta, f.varsigma, dt);
    }

    double operator()(double z, RngStream& rng) const {
        return f_.kind == FactorKind::cir ? cir_sample_step(z, cir_, rng) : ou_sample_step(z, dt_, f_, rng);
    }

private:
    FactorDynamics f_;
    double dt_;
    CirTransition cir_;
};

/// Factor paths on a uniform grid; values[path][step].
struct PathBundle {
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    std::uint64_t seed = 0;

    std::size_t n_paths() const { return values.size(); }
    std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Simulates one path from substream `path_id`.
inline std::vector<double> simulate_path(const FactorStepper& step, double z0, std::size_t n_steps,
                                         const RngSpec& rng, std::uint64_t path_id) {
    RngStream stream(rng.master_seed, path_id);
    std::vector<double> z(n_steps + 1);
    z[0] = z0;
    for (std::size_t k = 0; k < n_steps; ++k) z[k + 1] = step(z[k], stream);
    return z;
}

/// Exact simulation of `n_paths` paths; output does not depend on `n_workers`.
inline PathBundle simulate_paths(const FactorDynamics& f, std::size_t n_paths, std::size_t n_steps, double horizon,
                                 const RngSpec& rng, unsigned n_workers = 1) {
    if (n_steps < 1) throw std::invalid_argument("simulate_paths: n_steps must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_paths: horizon must be > 0");
    PathBundle out;
    out.times = uniform_grid(horizon, n_steps);
    out.seed = rng.master_seed;
    out.values.resize(n_paths);
    const FactorStepper step(f, horizon / static_cast<double>(n_steps));

    n_workers = std::max(1u, std::min<unsigned>(n_workers, static_cast<unsigned>(std::max<std::size_t>(n_paths, 1))));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) out.values[p] = simulate_path(step, f.z0, n_steps, rng, p);
    };
    if (n_workers == 1) {
        work(0, n_paths);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_paths + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n_paths, b + chunk);
        if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
    return out;
}

/// CSV with header `t,path0,path1,...`, one row per time.
inline void write_csv(std::ostream& os, const PathBundle& b) {
    os << "t";
    for (std::size_t p = 0; p < b.n_paths(); ++p) os << ",path" << p;
    os << "\n";
    for (std::size_t k = 0; k < b.times.size(); ++k) {
        os << format_double(b.times[k]);
        for (const auto& path : b.values) os << ',' << format_double(path[k]);
        os << "\n";
    }
}

} // namespace crashrobust
