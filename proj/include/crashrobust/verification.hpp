#pragma once

// Monte Carlo and oracle checks of the indifference strategy:
//   martingale_check              E[Z_t] = Z_0 under the indifference policy
//   wealth_representation_check   direct log X_T vs. the Phi-integral representation
//   comparison_check              ordered generators give ordered ODE solutions
//   cash_lower_bound_check        v(0, z0) <= E int_0^T f(z_s, 0) ds
//
// Z_t = log(1 - pi_t l_woc) + int_0^t (Phi(pi_s) - Phi(pi^M_s)) ds

#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/factor_sim.hpp"
#include "crashrobust/io.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crashrobust {

/// Allocation as a function of (t, factor value).
using Strategy = std::function<double(double t, double z)>;

struct CheckpointResult {
    std::string checkpoint;
    double estimate = 0.0;
    double se = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

struct VerificationReport {
    std::string check;
    std::vector<CheckpointResult> rows;
    double k_se = 4.0;
    std::uint64_t seed = 0;
    bool pass = true;
    std::vector<std::string> notes;

    void add(CheckpointResult r) {
        pass = pass && r.pass;
        rows.push_back(std::move(r));
    }

    void fail(std::string why) {
        pass = false;
        notes.push_back(std::move(why));
    }

    std::string summary() const {
        std::ostringstream os;
        os << check << ": " << (pass ? "PASS" : "FAIL") << " (seed " << seed << ", k = " << k_se << ")\n";
        for (const auto& r : rows)
            os << "  " << r.checkpoint << ": estimate " << format_double(r.estimate) << ", se " << format_double(r.se)
               << ", threshold " << format_double(r.threshold) << (r.pass ? "" : "  <-- FAIL") << "\n";
        for (const auto& n : notes) os << "  note: " << n << "\n";
        return os.str();
    }
};

/// CSV `check,checkpoint,estimate,se,pass`.
inline void write_csv(std::ostream& os, const VerificationReport& rep, bool header = true) {
    if (header) os << "check,checkpoint,estimate,se,pass\n";
    for (const auto& r : rep.rows)
        os << rep.check << ',' << r.checkpoint << ',' << format_double(r.estimate) << ',' << format_double(r.se) << ','
           << (r.pass ? "true" : "false") << '\n';
}

namespace stats {

inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 16) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/// Sample mean and its standard error.
inline MeanSe mean_se(std::span<const double> x) {
    const auto n = static_cast<double>(x.size());
    if (x.empty()) return {};
    const double mean = pairwise_sum(x) / n;
    if (x.size() < 2) return {mean, 0.0};
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
    return {mean, std::sqrt(pairwise_sum(sq) / (n - 1.0) / n)};
}

} // namespace stats

inline Strategy surface_strategy(const PolicySurface& ps) {
    return [&ps](double t, double z) { return eval_policy(ps, t, z).value; };
}

/// Post-crash optimum pi^M(z); factor values with sigma^2 <= 0 are floored at `z_floor`.
inline Strategy merton_strategy_fn(const ModelSpec& model, double z_floor = 1e-10) {
    return [model, z_floor](double, double z) {
        if (!(model.sigma_sq(z) > 0.0)) z = std::max(z, z_floor);
        return merton_strategy(model, z);
    };
}

inline Strategy constant_strategy(double value) {
    return [value](double, double) { return value; };
}

/// Policy surface constant in x, built from an ODE exposure curve on `times`.
inline PolicySurface policy_from_ode(const std::vector<double>& times, const std::vector<double>& v,
                                     const SpaceGrid& space, double l_woc) {
    PolicySurface ps{times, space, Matrix(times.size(), space.size())};
    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t j = 0; j < space.size(); ++j) ps.pi(i, j) = exposure_to_strategy(v[i], l_woc);
    return ps;
}

inline PolicySurface zero_policy(const std::vector<double>& times, const SpaceGrid& space) {
    return {times, space, Matrix(times.size(), space.size(), 0.0)};
}

namespace detail {

inline double floored_factor(const ModelSpec& model, double z, double z_floor) {
    return model.sigma_sq(z) > 0.0 ? z : std::max(z, z_floor);
}

inline std::size_t checkpoint_index(const std::vector<double>& times, double t) {
    const double dt = times[1] - times[0];
    const auto idx = static_cast<std::size_t>(std::llround((t - times.front()) / dt));
    if (idx >= times.size() || std::abs(times[idx] - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw std::invalid_argument("checkpoint " + format_double(t) + " is not a path grid time");
    return idx;
}

/// Z_t - Z_0 at the requested path indices for one path, sampled every `stride` nodes.
inline void z_increments(const ModelSpec& model, const PolicySurface& policy, const std::vector<double>& times,
                         const std::vector<double>& z, std::size_t stride, const std::vector<std::size_t>& wanted,
                         std::vector<double>& out, std::size_t& clamped, std::size_t& evaluated) {
    const double l = model.crash.l_woc;
    const double z_floor = policy.space.node(1);
    auto integrand = [&](std::size_t k, double& pi_out) {
        const auto pv = eval_policy(policy, times[k], z[k]);
        clamped += pv.clamped ? 1 : 0;
        ++evaluated;
        pi_out = pv.value;
        const GeneratorAtPoint g(model, floored_factor(model, z[k], z_floor));
        return g.growth(pv.value) - g.optimal_growth();
    };
    double pi0 = 0.0;
    double g_prev = integrand(0, pi0);
    const double z_start = std::log1p(-pi0 * l);
    double integral = 0.0;
    std::size_t w = 0;
    for (std::size_t k = 0; k < z.size() && w < wanted.size(); k += stride) {
        double pi_k = pi0;
        if (k > 0) {
            const double g_k = integrand(k, pi_k);
            integral += 0.5 * (times[k] - times[k - stride]) * (g_prev + g_k);
            g_prev = g_k;
        }
        while (w < wanted.size() && wanted[w] == k) {
            out[w] = std::log1p(-pi_k * l) + integral - z_start;
            ++w;
        }
    }
}

} // namespace detail

/// E[Z_t] - Z_0 at each checkpoint, passing when within k SE plus a discretisation allowance
/// estimated from the same paths at twice the time step.
inline VerificationReport martingale_check(const ModelSpec& model, const PolicySurface& policy, const PathBundle& paths,
                                           const std::vector<double>& checkpoints, double k_se = 4.0) {
    VerificationReport rep;
    rep.check = "martingale";
    rep.k_se = k_se;
    rep.seed = paths.seed;
    if (paths.n_paths() < 2) throw std::invalid_argument("martingale_check needs at least two paths");

    std::vector<std::size_t> idx;
    for (double t : checkpoints) idx.push_back(detail::checkpoint_index(paths.times, t));
    std::vector<std::size_t> order(idx.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return idx[a] < idx[b]; });
    std::vector<std::size_t> sorted;
    for (auto o : order) sorted.push_back(idx[o]);
    const bool coarse_ok = std::all_of(sorted.begin(), sorted.end(), [](auto i) { return i % 2 == 0; });

    const std::size_t n = paths.n_paths();
    const std::size_t m = sorted.size();
    std::vector<std::vector<double>> fine(m, std::vector<double>(n)), coarse(m, std::vector<double>(n));
    std::vector<double> tmp(m);
    std::size_t clamped = 0, evaluated = 0;
    for (std::size_t p = 0; p < n; ++p) {
        detail::z_increments(model, policy, paths.times, paths.values[p], 1, sorted, tmp, clamped, evaluated);
        for (std::size_t c = 0; c < m; ++c) fine[c][p] = tmp[c];
        if (coarse_ok) {
            std::size_t dummy_c = 0, dummy_e = 0;
            detail::z_increments(model, policy, paths.times, paths.values[p], 2, sorted, tmp, dummy_c, dummy_e);
            for (std::size_t c = 0; c < m; ++c) coarse[c][p] = tmp[c];
        }
    }

    for (std::size_t c = 0; c < m; ++c) {
        const auto f = stats::mean_se(fine[c]);
        const double allowance = coarse_ok ? std::abs(f.mean - stats::mean_se(coarse[c]).mean) : 0.0;
        CheckpointResult r;
        r.checkpoint = "t=" + format_double(paths.times[sorted[c]]);
        r.estimate = f.mean;
        r.se = f.se;
        r.threshold = k_se * f.se + allowance + 1e-12;
        r.pass = std::abs(f.mean) <= r.threshold;
        rep.add(r);
    }
    const double clamp_rate = evaluated ? static_cast<double>(clamped) / static_cast<double>(evaluated) : 0.0;
    if (clamp_rate > 0.01) rep.fail("grid clamp rate " + format_double(clamp_rate) + " exceeds 1%");
    if (!coarse_ok) rep.notes.push_back("odd checkpoint index: no discretisation allowance");
    return rep;
}

/// True when the checkpoint estimates never increase (supermartingale direction).
inline bool nonincreasing_estimates(const VerificationReport& rep, double tol = 0.0) {
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].estimate > rep.rows[i - 1].estimate + tol) return false;
    return true;
}

struct WealthConfig {
    double crash_time = std::numeric_limits<double>::infinity();
    std::size_t n_paths = 10000;
    std::size_t n_steps = 1000;
    RngSpec rng;
    double k_se = 4.0;
    /// Jumps of the reciprocal measure below this size are replaced by their compensator.
    double small_jump_cutoff = 1e-4;
    double log_initial_wealth = 0.0;
};

/// Per-path log terminal wealth, simulated directly and through the Phi representation.
struct WealthSamples {
    std::vector<double> direct;
    std::vector<double> representation;
    double truncation_shift = 0.0;
};

inline WealthSamples simulate_log_wealth(const ModelSpec& model, const Strategy& pre, const Strategy& post,
                                         const WealthConfig& cfg) {
    model.validate();
    const double horizon = model.horizon;
    const double dt = horizon / static_cast<double>(cfg.n_steps);
    const auto times = uniform_grid(horizon, cfg.n_steps);
    const FactorStepper step(model.factor, dt);
    const auto& jm = model.measure;
    const double l_woc = model.crash.l_woc;
    const bool crash = cfg.crash_time <= horizon;
    const std::size_t crash_idx = crash ? static_cast<std::size_t>(std::llround(cfg.crash_time / dt)) : cfg.n_steps + 1;
    const double eps = cfg.small_jump_cutoff;
    const double big_mass = jm.kind() == MeasureKind::reciprocal ? std::log(jm.l_max() / eps) : jm.total_mass();
    const double rho = model.rho;
    const double rho_bar = std::sqrt(std::max(0.0, 1.0 - rho * rho));

    WealthSamples out;
    out.direct.resize(cfg.n_paths);
    out.representation.resize(cfg.n_paths);
    std::vector<double> shift(cfg.n_paths, 0.0);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        const auto z = simulate_path(step, model.factor.z0, cfg.n_steps, cfg.rng, p);
        RngStream noise(cfg.rng.master_seed, p, 1);
        double direct = cfg.log_initial_wealth;
        double repr = cfg.log_initial_wealth;
        for (std::size_t k = 0; k < cfg.n_steps; ++k) {
            const double zk = z[k];
            const bool pre_crash = k < crash_idx;
            const double pi = pre_crash ? pre(times[k], zk) : post(times[k], zk);
            if (k == crash_idx) {
                const double crash_term = std::log1p(-pre(times[k], zk) * l_woc);
                direct += crash_term;
                repr += crash_term;
            }
            const double s2 = model.sigma_sq(zk);
            const double lam = model.lambda(zk);
            repr += (model.r + lam * pi - 0.5 * s2 * pi * pi + log_moment(jm, pi)) * dt;

            double dw_hat = 0.0;
            if (rho != 0.0) {
                const double vol = model.factor.diffusion(zk);
                dw_hat = vol > 0.0 ? (z[k + 1] - zk - model.factor.drift(zk) * dt) / vol : 0.0;
            }
            const double dw = rho * dw_hat + rho_bar * std::sqrt(dt) * noise.normal();
            direct += (model.r + lam * pi - 0.5 * s2 * pi * pi) * dt + pi * std::sqrt(std::max(s2, 0.0)) * dw;

            if (jm.kind() != MeasureKind::none) {
                const auto jumps = noise.poisson(big_mass * dt);
                for (std::uint64_t j = 0; j < jumps; ++j) {
                    const double size = jm.kind() == MeasureKind::atom
                                            ? jm.q()
                                            : eps * std::pow(jm.l_max() / eps, noise.uniform());
                    direct += std::log1p(-pi * size);
                }
                if (jm.kind() == MeasureKind::reciprocal) {
                    const double comp = -dilog(std::min(1.0, pi * eps)) * dt;
                    direct += comp;
                    shift[p] += comp;
                }
            }
        }
        if (crash_idx == cfg.n_steps) {
            const double crash_term = std::log1p(-pre(times.back(), z.back()) * l_woc);
            direct += crash_term;
            repr += crash_term;
        }
        out.direct[p] = direct;
        out.representation[p] = repr;
    }
    out.truncation_shift = std::abs(stats::mean_se(shift).mean);
    return out;
}

/// Direct log-wealth MC against the Phi-integral representation on the same paths.
inline VerificationReport wealth_representation_check(const ModelSpec& model, const Strategy& pre, const Strategy& post,
                                                      const WealthConfig& cfg) {
    VerificationReport rep;
    rep.check = "wealth_representation";
    rep.k_se = cfg.k_se;
    rep.seed = cfg.rng.master_seed;
    const auto s = simulate_log_wealth(model, pre, post, cfg);
    std::vector<double> diff(s.direct.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = s.direct[i] - s.representation[i];
    const auto d = stats::mean_se(s.direct);
    const auto r = stats::mean_se(s.representation);
    const auto j = stats::mean_se(diff);
    rep.add({"direct_log_wealth", d.mean, d.se, 0.0, true});
    rep.add({"representation", r.mean, r.se, 0.0, true});
    const double thr = cfg.k_se * j.se + 1e-12;
    rep.add({"difference", j.mean, j.se, thr, std::abs(j.mean) <= thr});
    if (model.measure.kind() == MeasureKind::reciprocal && s.truncation_shift > 0.1 * j.se)
        rep.notes.push_back("small-jump truncation shifts the compensator by " + format_double(s.truncation_shift) +
                            " (> 0.1 SE)");
    return rep;
}

struct ComparisonResult {
    VerificationReport report;
    std::vector<double> v_lo;
    std::vector<double> v_hi;
};

using Generator1D = std::function<double(double)>;

/// Ordered generators (checked on [0, y_max]) must give ordered ODE solutions.
inline ComparisonResult comparison_check(const Generator1D& f_lo, const Generator1D& f_hi, double horizon,
                                         std::size_t n_t, double y_max, std::size_t n_y = 400) {
    for (std::size_t i = 0; i <= n_y; ++i) {
        const double y = y_max * static_cast<double>(i) / static_cast<double>(n_y);
        if (f_lo(y) > f_hi(y) + 1e-14)
            throw std::invalid_argument("comparison_check: generators are not ordered at y = " + format_double(y));
    }
    ComparisonResult res;
    res.report.check = "comparison";
    res.v_lo = solve_ode(f_lo, horizon, n_t);
    res.v_hi = solve_ode(f_hi, horizon, n_t);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n_t; ++i) worst = std::max(worst, res.v_lo[i] - res.v_hi[i]);
    const std::size_t step = std::max<std::size_t>(1, n_t / 10);
    const auto times = uniform_grid(horizon, n_t);
    for (std::size_t i = 0; i <= n_t; i += step)
        res.report.add({"t=" + format_double(times[i]), res.v_hi[i] - res.v_lo[i], 0.0, -1e-10,
                        res.v_lo[i] <= res.v_hi[i] + 1e-10});
    res.report.add({"max(v_lo - v_hi)", worst, 0.0, 1e-10, worst <= 1e-10});
    return res;
}

/// Frozen-coefficient generators of two models at x0.
inline ComparisonResult comparison_check(const ModelSpec& lo, const ModelSpec& hi, double x0, std::size_t n_t) {
    const GeneratorAtPoint g_lo(lo, x0), g_hi(hi, x0);
    const double y_max = 10.0;
    return comparison_check([g_lo](double y) { return g_lo(y); }, [g_hi](double y) { return g_hi(y); }, lo.horizon,
                            n_t, y_max);
}

/// The indifference value dominates all-cash: v(0, z0) <= E int_0^T f(z_s, 0) ds + k SE.
inline VerificationReport cash_lower_bound_check(const ModelSpec& model, const ValueSurface& surface,
                                                 const PathBundle& paths, double k_se = 4.0) {
    VerificationReport rep;
    rep.check = "cash_lower_bound";
    rep.k_se = k_se;
    rep.seed = paths.seed;
    const double v0 = eval_value(surface, 0.0, model.factor.z0).value;
    const double z_floor = surface.space.node(1);
    std::vector<double> integral(paths.n_paths());
    for (std::size_t p = 0; p < paths.n_paths(); ++p) {
        const auto& z = paths.values[p];
        double acc = 0.0;
        double prev = GeneratorAtPoint(model, detail::floored_factor(model, z[0], z_floor))(0.0);
        for (std::size_t k = 1; k < z.size(); ++k) {
            const double cur = GeneratorAtPoint(model, detail::floored_factor(model, z[k], z_floor))(0.0);
            acc += 0.5 * (paths.times[k] - paths.times[k - 1]) * (prev + cur);
            prev = cur;
        }
        integral[p] = acc;
    }
    const auto c = stats::mean_se(integral);
    rep.add({"v(0,z0)", v0, 0.0, 0.0, true});
    const double thr = c.mean + k_se * c.se + 1e-12;
    rep.add({"cash_integral", c.mean, c.se, thr, v0 <= thr});
    return rep;
}

} // namespace crashrobust
