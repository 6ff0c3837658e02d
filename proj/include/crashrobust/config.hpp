#pragma once

// Flat `key = value` run configuration with '#' comments.
//
//   model = a            # preset name, or `custom` to start from an empty spec
//   kappa = 3.99         # any ModelSpec key overrides the preset
//   n_t = 1000
//   seed = 42

#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/io.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/presets.hpp"
#include "crashrobust/rng.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace crashrobust {

/// Syntax or type error at a 1-based line/column.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct SimulationConfig {
    /// 0 selects the command's default (2 for figures and paths, 10^4 for verify).
    std::size_t n_paths = 0;
    std::size_t n_steps = 1000;
    RngSpec rng;
    unsigned workers = 1;
};

struct RunConfig {
    std::string preset;
    ModelSpec model;
    SolverConfig solver;
    SimulationConfig sim;
    std::string out_dir = ".";

    void validate() const {
        model.validate();
        solver.validate();
        if (sim.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
        if (sim.workers < 1) throw std::invalid_argument("workers must be >= 1");
        if (out_dir.empty()) throw std::invalid_argument("out must not be empty");
    }
};

namespace detail {

inline constexpr std::array<std::string_view, 31> config_keys{
    "model",     "name",       "factor",         "kappa",   "theta",     "varsigma",     "z0",     "sigma_sq_map",
    "sigma_sq",  "lambda_map", "alpha",          "lambda",  "measure",   "q",            "l_woc",  "l_levy_max",
    "r",         "rho",        "horizon",        "n_t",     "n_x",       "theta_weight", "picard_iters", "tol",
    "x_min",     "x_max",      "n_paths",        "n_steps", "seed",      "workers",      "out"};

inline bool known_key(std::string_view k) {
    for (auto c : config_keys)
        if (c == k) return true;
    return false;
}

inline std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    std::size_t e = s.size();
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    if (lead) *lead = b;
    return s.substr(b, e - b);
}

struct Entry {
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;
};

inline double parse_real(const Entry& e, std::string_view key) {
    double v = 0.0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw ConfigError(e.line, e.column, "'" + std::string(key) + "' expects a number, got '" + e.value + "'");
    return v;
}

inline std::uint64_t parse_unsigned(const Entry& e, std::string_view key) {
    std::uint64_t v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw ConfigError(e.line, e.column,
                          "'" + std::string(key) + "' expects a nonnegative integer, got '" + e.value + "'");
    return v;
}

template <class F>
auto parse_enum(const Entry& e, F&& from_string) {
    try {
        return from_string(e.value);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(e.line, e.column, ex.what());
    }
}

} // namespace detail

/// Key/value pairs in file order; duplicate and unknown keys are errors.
inline std::map<std::string, detail::Entry> parse_key_values(std::string_view text) {
    std::map<std::string, detail::Entry> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        std::size_t lead = 0;
        if (detail::trim(line, &lead).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, lead + 1, "expected 'key = value'");
        std::size_t key_lead = 0, val_lead = 0;
        const auto key = detail::trim(line.substr(0, eq), &key_lead);
        const auto val = detail::trim(line.substr(eq + 1), &val_lead);
        const std::size_t key_col = key_lead + 1;
        const std::size_t val_col = eq + 1 + val_lead + 1;
        if (key.empty()) throw ConfigError(line_no, key_col, "missing key before '='");
        if (val.empty()) throw ConfigError(line_no, val_col, "missing value for '" + std::string(key) + "'");
        if (!detail::known_key(key)) throw ConfigError(line_no, key_col, "unknown key '" + std::string(key) + "'");
        std::string k(key);
        if (out.contains(k)) throw ConfigError(line_no, key_col, "duplicate key '" + k + "'");
        out.emplace(std::move(k), detail::Entry{std::string(val), line_no, val_col});
    }
    return out;
}

/// Parsed and validated run configuration. Validation failures raise std::invalid_argument.
inline RunConfig parse_config(std::string_view text) {
    const auto kv = parse_key_values(text);
    auto get = [&](const char* k) -> const detail::Entry* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    RunConfig cfg;
    const auto* model = get("model");
    if (!model) throw std::invalid_argument("model required");
    cfg.preset = model->value;
    if (model->value == "custom") {
        cfg.model = ModelSpec{};
        cfg.model.name = "custom";
    } else if (is_preset(model->value)) {
        cfg.model = preset(model->value);
    } else {
        throw ConfigError(model->line, model->column, "unknown model preset '" + model->value + "'");
    }

    auto& m = cfg.model;
    auto real = [&](const char* k, double& dst) {
        if (const auto* e = get(k)) dst = detail::parse_real(*e, k);
    };
    auto count = [&](const char* k, auto& dst) {
        if (const auto* e = get(k)) dst = static_cast<std::remove_reference_t<decltype(dst)>>(detail::parse_unsigned(*e, k));
    };

    if (const auto* e = get("name")) m.name = e->value;
    if (const auto* e = get("factor")) m.factor.kind = detail::parse_enum(*e, factor_kind_from_string);
    real("kappa", m.factor.kappa);
    real("theta", m.factor.theta);
    real("varsigma", m.factor.varsigma);
    real("z0", m.factor.z0);
    if (const auto* e = get("sigma_sq_map")) m.coeffs.sigma_sq_kind = detail::parse_enum(*e, sigma_sq_kind_from_string);
    real("sigma_sq", m.coeffs.sigma_sq_value);
    if (const auto* e = get("lambda_map")) m.coeffs.lambda_kind = detail::parse_enum(*e, lambda_kind_from_string);
    real("alpha", m.coeffs.alpha);
    real("lambda", m.coeffs.lambda_value);
    real("l_woc", m.crash.l_woc);
    real("l_levy_max", m.crash.l_levy_max);
    real("r", m.r);
    real("rho", m.rho);
    real("horizon", m.horizon);

    // The measure support follows l_levy_max; an atom keeps its own size when q is given.
    MeasureKind kind = m.measure.kind();
    if (const auto* e = get("measure")) kind = detail::parse_enum(*e, measure_kind_from_string);
    double q = kind == MeasureKind::atom && m.measure.kind() == MeasureKind::atom ? m.measure.q() : m.crash.l_levy_max;
    if (get("l_levy_max") && !get("q")) q = m.crash.l_levy_max;
    real("q", q);
    if (get("q") && kind != MeasureKind::atom) {
        const auto* e = get("q");
        throw ConfigError(e->line, e->column, "'q' only applies to measure = atom");
    }

    count("n_t", cfg.solver.n_t);
    count("n_x", cfg.solver.n_x);
    real("theta_weight", cfg.solver.theta_weight);
    count("picard_iters", cfg.solver.picard_iters);
    real("tol", cfg.solver.tol);
    real("x_min", cfg.solver.x_min);
    real("x_max", cfg.solver.x_max);
    count("n_paths", cfg.sim.n_paths);
    count("n_steps", cfg.sim.n_steps);
    count("seed", cfg.sim.rng.master_seed);
    count("workers", cfg.sim.workers);
    if (const auto* e = get("out")) cfg.out_dir = e->value;

    m.crash.validate();
    switch (kind) {
    case MeasureKind::none: m.measure = JumpMeasure::none(); break;
    case MeasureKind::atom: m.measure = JumpMeasure::atom(q, m.crash.l_levy_max); break;
    case MeasureKind::reciprocal: m.measure = JumpMeasure::reciprocal(m.crash.l_levy_max); break;
    }
    cfg.validate();
    return cfg;
}

/// Config text that parses back to `m` (model = custom, every field explicit).
inline std::string to_config_text(const ModelSpec& m) {
    std::ostringstream os;
    os << "model = custom\n";
    if (!m.name.empty()) os << "name = " << m.name << "\n";
    os << "factor = " << to_string(m.factor.kind) << "\n"
       << "kappa = " << format_double(m.factor.kappa) << "\n"
       << "theta = " << format_double(m.factor.theta) << "\n"
       << "varsigma = " << format_double(m.factor.varsigma) << "\n"
       << "z0 = " << format_double(m.factor.z0) << "\n"
       << "sigma_sq_map = " << to_string(m.coeffs.sigma_sq_kind) << "\n"
       << "sigma_sq = " << format_double(m.coeffs.sigma_sq_value) << "\n"
       << "lambda_map = " << to_string(m.coeffs.lambda_kind) << "\n"
       << "alpha = " << format_double(m.coeffs.alpha) << "\n"
       << "lambda = " << format_double(m.coeffs.lambda_value) << "\n"
       << "measure = " << to_string(m.measure.kind()) << "\n";
    if (m.measure.kind() == MeasureKind::atom) os << "q = " << format_double(m.measure.q()) << "\n";
    os << "l_woc = " << format_double(m.crash.l_woc) << "\n"
       << "l_levy_max = " << format_double(m.crash.l_levy_max) << "\n"
       << "r = " << format_double(m.r) << "\n"
       << "rho = " << format_double(m.rho) << "\n"
       << "horizon = " << format_double(m.horizon) << "\n";
    return os.str();
}

} // namespace crashrobust
