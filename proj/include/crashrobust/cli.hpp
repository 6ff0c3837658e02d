#pragma once

// Command-line front end. Subcommands: check, solve, simulate, policy-paths, verify, reproduce.
// Exit status: 0 success, 1 invalid input or module error, 3 a verification check failed.

#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/config.hpp"
#include "crashrobust/factor_sim.hpp"
#include "crashrobust/figures.hpp"
#include "crashrobust/io.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/verification.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace crashrobust {

namespace cli {

struct CommonOptions {
    std::string model;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_paths;
    std::optional<std::size_t> n_t;
    std::optional<std::size_t> n_x;
    std::optional<unsigned> workers;
    std::string out;
};

inline void add_common(CLI::App& sub, CommonOptions& o, bool model_flags = true) {
    if (model_flags) {
        sub.add_option("--model", o.model, "preset name (a, b, c, d, ko)");
        sub.add_option("--config", o.config, "key = value config file");
    }
    sub.add_option("--seed", o.seed, "master seed");
    sub.add_option("--n-paths", o.n_paths, "number of simulated paths");
    sub.add_option("--nt", o.n_t, "time steps");
    sub.add_option("--nx", o.n_x, "space steps");
    sub.add_option("--workers", o.workers, "simulation threads");
    sub.add_option("--out", o.out, "output directory");
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Config file or --model first, then command-line overrides; validated before any work.
inline RunConfig resolve(const CommonOptions& o, std::optional<std::string> forced_model = std::nullopt) {
    if (!o.config.empty() && !o.model.empty()) throw std::invalid_argument("give either --model or --config, not both");
    std::string text;
    if (forced_model) {
        if (!o.config.empty() || !o.model.empty())
            throw std::invalid_argument("reproduce takes its model from --figure");
        text = "model = " + *forced_model + "\n";
    } else if (!o.config.empty()) {
        text = read_text(o.config);
    } else if (!o.model.empty()) {
        text = "model = " + o.model + "\n";
    }
    RunConfig cfg = parse_config(text);
    if (o.seed) cfg.sim.rng.master_seed = *o.seed;
    if (o.n_paths) cfg.sim.n_paths = *o.n_paths;
    if (o.n_t) cfg.solver.n_t = *o.n_t;
    if (o.n_x) cfg.solver.n_x = *o.n_x;
    if (o.workers) cfg.sim.workers = *o.workers;
    if (!o.out.empty()) cfg.out_dir = o.out;
    cfg.validate();
    cfg.solver.grid_for(cfg.model.factor);
    return cfg;
}

inline void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.out_dir))
        throw std::invalid_argument("output directory '" + cfg.out_dir + "' is not usable");
    const auto probe = std::filesystem::path(cfg.out_dir) / ".crashrobust_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw std::invalid_argument("output directory '" + cfg.out_dir + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

inline std::size_t paths_or(const RunConfig& cfg, std::size_t fallback) {
    return cfg.sim.n_paths ? cfg.sim.n_paths : fallback;
}

/// Files are only written once every output has been computed.
class Outputs {
public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    void commit(std::ostream& log) const {
        std::filesystem::create_directories(dir_);
        for (const auto& [name, content] : files_) {
            write_file_atomic(dir_ / name, content);
            log << "wrote " << (dir_ / name).string() << "\n";
        }
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline std::string model_tag(const RunConfig& cfg) { return cfg.model.name.empty() ? "model" : cfg.model.name; }

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
    out << "model " << model_tag(cfg) << "\n" << check_conditions(cfg.model).to_text();
    return 0;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const auto vs = solve_pde(cfg.model, cfg.solver);
    const auto ps = policy_surface(vs, cfg.model.crash.l_woc);
    std::ostringstream v_csv, p_csv;
    write_csv(v_csv, vs);
    write_csv(p_csv, ps);
    Outputs files(cfg.out_dir);
    files.add(model_tag(cfg) + "_value.csv", v_csv.str());
    files.add(model_tag(cfg) + "_policy.csv", p_csv.str());
    const double v0 = eval_value(vs, 0.0, cfg.model.factor.z0).value;
    out << "v(0, z0) = " << format_double(v0) << "\n"
        << "pi(0, z0) = " << format_double(exposure_to_strategy(v0, cfg.model.crash.l_woc)) << "\n"
        << "max picard residual = " << format_double(vs.max_picard_residual) << "\n";
    files.commit(out);
    return 0;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const auto b = simulate_paths(cfg.model.factor, paths_or(cfg, 2), cfg.sim.n_steps, cfg.model.horizon, cfg.sim.rng,
                                  cfg.sim.workers);
    std::ostringstream csv;
    write_csv(csv, b);
    Outputs files(cfg.out_dir);
    files.add(model_tag(cfg) + "_paths.csv", csv.str());
    files.commit(out);
    return 0;
}

inline int cmd_policy_paths(const RunConfig& cfg, std::ostream& out) {
    const auto pp = policy_paths(cfg.model, cfg.solver, cfg.sim, paths_or(cfg, 2), true, true);
    Outputs files(cfg.out_dir);
    files.add(model_tag(cfg) + "_policy_paths.csv", pp.table.to_csv());
    if (pp.clamped) out << "warning: " << pp.clamped << " of " << pp.evaluated << " evaluations clamped to the grid\n";
    files.commit(out);
    return 0;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& which, std::ostream& out) {
    const auto& m = cfg.model;
    const std::size_t n = paths_or(cfg, 10000);
    const bool all = which == "all";
    std::vector<VerificationReport> reports;
    if (cfg.sim.n_steps % 10 != 0) throw std::invalid_argument("verify needs n_steps divisible by 10");

    if (all || which == "martingale" || which == "cash") {
        const auto vs = solve_pde(m, cfg.solver);
        const auto paths = simulate_paths(m.factor, n, cfg.sim.n_steps, m.horizon, cfg.sim.rng, cfg.sim.workers);
        if (all || which == "martingale") {
            std::vector<double> cps;
            const std::size_t stride = cfg.sim.n_steps / 10;
            for (std::size_t i = 0; i <= 10; ++i) cps.push_back(paths.times[i * stride]);
            reports.push_back(martingale_check(m, policy_surface(vs, m.crash.l_woc), paths, cps));
        }
        if (all || which == "cash") reports.push_back(cash_lower_bound_check(m, vs, paths));
    }
    if (all || which == "wealth") {
        const auto ps = policy_surface(solve_pde(m, cfg.solver), m.crash.l_woc);
        WealthConfig wc;
        wc.crash_time = m.horizon / 2.0;
        wc.n_paths = n;
        wc.n_steps = cfg.sim.n_steps;
        wc.rng = cfg.sim.rng;
        reports.push_back(wealth_representation_check(m, surface_strategy(ps), merton_strategy_fn(m), wc));
    }
    if (all || which == "comparison") {
        const auto lo = frozen_at(m, m.factor.theta);
        auto hi = lo;
        hi.coeffs.lambda_value *= 1.1;
        reports.push_back(comparison_check(lo, hi, m.factor.theta, cfg.solver.n_t).report);
    }
    if (reports.empty()) throw std::invalid_argument("unknown check '" + which + "'");

    std::ostringstream csv;
    bool pass = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        write_csv(csv, reports[i], i == 0);
        out << reports[i].summary();
        pass = pass && reports[i].pass;
    }
    Outputs files(cfg.out_dir);
    files.add(model_tag(cfg) + "_verify.csv", csv.str());
    files.commit(out);
    return pass ? 0 : 3;
}

inline int cmd_reproduce(const RunConfig& cfg, int figure, std::ostream& out) {
    const auto fig = reproduce_figure(figure, cfg.solver, cfg.sim, paths_or(cfg, 2));
    Outputs files(cfg.out_dir);
    files.add("fig" + std::to_string(figure) + ".csv", fig.csv);
    files.add("fig" + std::to_string(figure) + ".svg", fig.svg);
    files.commit(out);
    return 0;
}

} // namespace cli

/// argv-style entry point; args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    CLI::App app{"Worst-case crash-robust log-utility strategies", "crashrobust"};
    app.require_subcommand(1);
    cli::CommonOptions o;
    std::string which = "all";
    int figure = 0;

    auto* check = app.add_subcommand("check", "print the standing-assumption report");
    cli::add_common(*check, o);
    auto* solve = app.add_subcommand("solve", "solve the backward PDE; write value and policy surfaces");
    cli::add_common(*solve, o);
    auto* simulate = app.add_subcommand("simulate", "simulate factor paths");
    cli::add_common(*simulate, o);
    auto* ppaths = app.add_subcommand("policy-paths", "strategies along simulated paths with the ODE reference");
    cli::add_common(*ppaths, o);
    auto* verify = app.add_subcommand("verify", "Monte Carlo and oracle checks");
    cli::add_common(*verify, o);
    verify->add_option("--check", which, "all, martingale, cash, wealth or comparison")
        ->check(CLI::IsMember({"all", "martingale", "cash", "wealth", "comparison"}));
    auto* reproduce = app.add_subcommand("reproduce", "figure pipeline: figK.csv and figK.svg");
    cli::add_common(*reproduce, o);
    reproduce->add_option("--figure", figure, "figure number 1..7")->required()->check(CLI::Range(1, 7));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*reproduce) {
            const auto cfg = cli::resolve(o, figure_spec(figure).preset);
            cli::ensure_out_dir(cfg);
            return cli::cmd_reproduce(cfg, figure, out);
        }
        const auto cfg = cli::resolve(o);
        if (*check) return cli::cmd_check(cfg, out);
        cli::ensure_out_dir(cfg);
        if (*solve) return cli::cmd_solve(cfg, out);
        if (*simulate) return cli::cmd_simulate(cfg, out);
        if (*ppaths) return cli::cmd_policy_paths(cfg, out);
        if (*verify) return cli::cmd_verify(cfg, which, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

inline int run_command(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_command(args);
}

} // namespace crashrobust
