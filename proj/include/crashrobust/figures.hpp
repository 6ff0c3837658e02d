#pragma once

// Figure pipelines: preset -> PDE surface -> simulated factor paths -> strategies along the paths,
// with the constant-factor (z = theta) ODE solution as reference.
//
//   figure 1, 2, 3   pi-hat for presets a, b, c
//   figure 4         pi^M and pi-hat (dashed) for preset d
//   figure 5         pi-hat for preset d
//   figure 6         pi^M for preset ko
//   figure 7         pi-hat for preset ko

#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/config.hpp"
#include "crashrobust/factor_sim.hpp"
#include "crashrobust/io.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/presets.hpp"
#include "crashrobust/svg.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crashrobust {

struct FigureSpec {
    int number = 0;
    std::string preset;
    bool merton = false;
    bool policy = true;
    std::string title;
};

inline FigureSpec figure_spec(int k) {
    switch (k) {
    case 1: return {1, "a", false, true, "pi-hat, reciprocal jumps (a)"};
    case 2: return {2, "b", false, true, "pi-hat, atom jumps (b)"};
    case 3: return {3, "c", false, true, "pi-hat, no jumps (c)"};
    case 4: return {4, "d", true, true, "pi^M and pi-hat (dashed), constant lambda (d)"};
    case 5: return {5, "d", false, true, "pi-hat, constant lambda (d)"};
    case 6: return {6, "ko", true, false, "pi^M, Kim-Omberg"};
    case 7: return {7, "ko", false, true, "pi-hat, Kim-Omberg"};
    }
    throw std::invalid_argument("figure must be in 1..7, got " + std::to_string(k));
}

/// Column-oriented table sharing the time column.
struct Table {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    void add(std::string name, std::vector<double> col) {
        if (col.size() != t.size()) throw std::logic_error("table column '" + name + "' has the wrong length");
        names.push_back(std::move(name));
        columns.push_back(std::move(col));
    }

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return columns[i];
        throw std::out_of_range("no column '" + name + "'");
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << 't';
        for (const auto& n : names) os << ',' << n;
        os << '\n';
        for (std::size_t k = 0; k < t.size(); ++k) {
            os << format_double(t[k]);
            for (const auto& c : columns) os << ',' << format_double(c[k]);
            os << '\n';
        }
        return os.str();
    }
};

/// pi^M along a path; a factor value with sigma^2 <= 0 uses the smallest positive double.
inline std::vector<double> merton_along(const ModelSpec& m, const std::vector<double>& z) {
    std::vector<double> out(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        double x = z[k];
        if (!(m.sigma_sq(x) > 0.0)) x = std::numeric_limits<double>::min();
        out[k] = merton_strategy(m, x);
    }
    return out;
}

struct PolicyPaths {
    Table table;
    std::size_t clamped = 0;
    std::size_t evaluated = 0;
};

/// Per-path pi-hat(t, z_t) (and pi^M if requested) plus the z = theta reference ODE policy.
inline PolicyPaths policy_paths(const ModelSpec& model, const SolverConfig& solver, const SimulationConfig& sim,
                                std::size_t n_paths, bool with_merton = false, bool with_policy = true) {
    PolicyPaths out;
    const auto paths = simulate_paths(model.factor, n_paths, sim.n_steps, model.horizon, sim.rng, sim.workers);
    out.table.t = paths.times;
    for (std::size_t p = 0; p < n_paths; ++p) out.table.add("z_path" + std::to_string(p), paths.values[p]);
    if (with_merton)
        for (std::size_t p = 0; p < n_paths; ++p)
            out.table.add("pi_m_path" + std::to_string(p), merton_along(model, paths.values[p]));
    if (with_policy) {
        const auto ps = policy_surface(solve_pde(model, solver), model.crash.l_woc);
        for (std::size_t p = 0; p < n_paths; ++p) {
            std::vector<double> col(paths.times.size());
            for (std::size_t k = 0; k < col.size(); ++k) {
                const auto sv = eval_policy(ps, paths.times[k], paths.values[p][k]);
                col[k] = sv.value;
                out.clamped += sv.clamped ? 1 : 0;
                ++out.evaluated;
            }
            out.table.add("pi_path" + std::to_string(p), std::move(col));
        }
        const auto ref = solve_ode_constant(model, model.factor.theta, sim.n_steps);
        std::vector<double> pi_ref(ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) pi_ref[k] = exposure_to_strategy(ref[k], model.crash.l_woc);
        out.table.add("reference", std::move(pi_ref));
    } else {
        out.table.add("reference", std::vector<double>(paths.times.size(), merton_strategy(model, model.factor.theta)));
    }
    return out;
}

struct FigureOutput {
    FigureSpec spec;
    Table table;
    std::string csv;
    std::string svg;
};

/// Full pipeline for figure k with the run's solver and simulation settings (preset taken from the figure).
inline FigureOutput reproduce_figure(int k, const SolverConfig& solver, const SimulationConfig& sim,
                                     std::size_t n_paths = 2) {
    FigureOutput out;
    out.spec = figure_spec(k);
    const auto model = preset(out.spec.preset);
    solver.validate();
    auto pp = policy_paths(model, solver, sim, n_paths, out.spec.merton, out.spec.policy);
    out.table = std::move(pp.table);
    out.csv = out.table.to_csv();

    std::vector<Series> series;
    for (std::size_t i = 0; i < out.table.names.size(); ++i) {
        const auto& n = out.table.names[i];
        if (n.rfind("z_path", 0) == 0) continue;
        const bool dashed = n == "reference" || (out.spec.merton && out.spec.policy && n.rfind("pi_path", 0) == 0);
        series.push_back({n, out.table.t, out.table.columns[i], dashed});
    }
    PlotStyle style;
    style.title = "Figure " + std::to_string(k) + ": " + out.spec.title;
    style.y_label = out.spec.policy && !out.spec.merton ? "pi-hat" : "allocation";
    out.svg = emit_svg(series, style);
    return out;
}

} // namespace crashrobust
