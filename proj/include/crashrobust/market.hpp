#pragma once

// Market model: factor dynamics, coefficient maps sigma^2(x) and lambda(x), crash sizes,
// the log-growth rate Phi and the indifference generator f.

#include "crashrobust/jump_measures.hpp"
#include "crashrobust/post_crash.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crashrobust {

/// Worst-case crash fraction and the largest ordinary jump.
struct CrashSpec {
    double l_woc = 0.5;
    double l_levy_max = 0.2;

    void validate() const {
        if (!(l_woc > 0.0 && l_woc < 1.0)) throw std::invalid_argument("l_woc must lie in (0, 1)");
        if (!(l_levy_max > 0.0 && l_levy_max < 1.0)) throw std::invalid_argument("l_levy_max must lie in (0, 1)");
        if (!(l_levy_max < l_woc)) throw std::invalid_argument("l_levy_max must be < l_woc");
    }

    bool operator==(const CrashSpec&) const = default;
};

enum class FactorKind { cir, ou };

inline std::string_view to_string(FactorKind k) { return k == FactorKind::cir ? "cir" : "ou"; }

inline FactorKind factor_kind_from_string(std::string_view s) {
    if (s == "cir") return FactorKind::cir;
    if (s == "ou") return FactorKind::ou;
    throw std::invalid_argument("unknown factor kind '" + std::string(s) + "'");
}

/// dz = kappa (theta - z) dt + varsigma * (sqrt(z) | 1) dW_hat
struct FactorDynamics {
    FactorKind kind = FactorKind::cir;
    double kappa = 0.0;
    double theta = 0.0;
    double varsigma = 0.0;
    double z0 = 0.0;

    void validate() const {
        if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
        if (!(varsigma > 0.0)) throw std::invalid_argument("varsigma must be > 0");
        if (!std::isfinite(theta) || !std::isfinite(z0)) throw std::invalid_argument("theta and z0 must be finite");
        if (kind == FactorKind::cir) {
            if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0 for a cir factor");
            if (!(z0 >= 0.0)) throw std::invalid_argument("z0 must be >= 0 for a cir factor");
        }
    }

    double drift(double x) const { return kappa * (theta - x); }

    double diffusion(double x) const {
        return kind == FactorKind::cir ? varsigma * std::sqrt(std::max(x, 0.0)) : varsigma;
    }

    /// 2 kappa theta / varsigma^2 (cir only; NaN for ou).
    double feller_index() const {
        return kind == FactorKind::cir ? 2.0 * kappa * theta / (varsigma * varsigma)
                                       : std::numeric_limits<double>::quiet_NaN();
    }

    double stationary_sd() const {
        const double v = kind == FactorKind::cir ? theta * varsigma * varsigma / (2.0 * kappa)
                                                 : varsigma * varsigma / (2.0 * kappa);
        return std::sqrt(v);
    }

    bool operator==(const FactorDynamics&) const = default;
};

enum class SigmaSqKind { sqrt_vol, constant };
enum class LambdaKind { appropriate, constant, identity };

inline std::string_view to_string(SigmaSqKind k) { return k == SigmaSqKind::sqrt_vol ? "sqrt_vol" : "constant"; }

inline std::string_view to_string(LambdaKind k) {
    switch (k) {
    case LambdaKind::appropriate: return "appropriate";
    case LambdaKind::constant: return "constant";
    case LambdaKind::identity: return "identity";
    }
    return "?";
}

inline SigmaSqKind sigma_sq_kind_from_string(std::string_view s) {
    if (s == "sqrt_vol") return SigmaSqKind::sqrt_vol;
    if (s == "constant") return SigmaSqKind::constant;
    throw std::invalid_argument("unknown sigma_sq map '" + std::string(s) + "'");
}

inline LambdaKind lambda_kind_from_string(std::string_view s) {
    if (s == "appropriate") return LambdaKind::appropriate;
    if (s == "constant") return LambdaKind::constant;
    if (s == "identity") return LambdaKind::identity;
    throw std::invalid_argument("unknown lambda map '" + std::string(s) + "'");
}

/// sigma^2(x) and lambda(x). `alpha` is used by the appropriate map, `lambda_value` by constant.
struct CoefficientMap {
    SigmaSqKind sigma_sq_kind = SigmaSqKind::sqrt_vol;
    double sigma_sq_value = 0.0;
    LambdaKind lambda_kind = LambdaKind::appropriate;
    double alpha = 0.0;
    double lambda_value = 0.0;

    double sigma_sq(double x) const { return sigma_sq_kind == SigmaSqKind::sqrt_vol ? x : sigma_sq_value; }

    double lambda(double x, const JumpMeasure& m) const {
        switch (lambda_kind) {
        case LambdaKind::appropriate: return appropriate_lambda(alpha, sigma_sq(x), m);
        case LambdaKind::constant: return lambda_value;
        case LambdaKind::identity: return x;
        }
        return 0.0;
    }

    bool operator==(const CoefficientMap&) const = default;
};

struct ModelSpec {
    std::string name;
    FactorDynamics factor;
    CoefficientMap coeffs;
    CrashSpec crash;
    JumpMeasure measure;
    double r = 0.0;
    double rho = 0.0;
    double horizon = 5.0;

    void validate() const {
        factor.validate();
        crash.validate();
        if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
        if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
        if (!std::isfinite(r)) throw std::invalid_argument("r must be finite");
        if (measure.kind() != MeasureKind::none && measure.l_max() != crash.l_levy_max)
            throw std::invalid_argument("measure l_max must equal l_levy_max");
        if (coeffs.sigma_sq_kind == SigmaSqKind::constant && !(coeffs.sigma_sq_value > 0.0))
            throw std::invalid_argument("sigma_sq_value must be > 0");
        if (coeffs.sigma_sq_kind == SigmaSqKind::sqrt_vol && factor.kind != FactorKind::cir)
            throw std::invalid_argument("sqrt_vol sigma_sq map requires a cir factor");
        if (coeffs.lambda_kind == LambdaKind::appropriate &&
            !(coeffs.alpha > 0.0 && coeffs.alpha < measure.allocation_cap()))
            throw std::invalid_argument("alpha must lie in (0, 1/l_levy_max)");
        if (coeffs.lambda_kind == LambdaKind::constant && !std::isfinite(coeffs.lambda_value))
            throw std::invalid_argument("lambda_value must be finite");
    }

    double sigma_sq(double x) const { return coeffs.sigma_sq(x); }
    double lambda(double x) const { return coeffs.lambda(x, measure); }

    bool operator==(const ModelSpec&) const = default;
};

/// Log-growth rate r + lambda y - sigma^2 y^2 / 2 + log_moment(y) at factor value x.
inline double phi(const ModelSpec& model, double x, double y) {
    if (!(y >= 0.0) || y > model.measure.allocation_cap())
        throw std::domain_error("phi: allocation outside [0, 1/l_levy_max]");
    const double s2 = model.sigma_sq(x);
    return model.r + model.lambda(x) * y - 0.5 * s2 * y * y + log_moment(model.measure, y);
}

/// Post-crash optimum pi^M(x) = psi(lambda(x), sigma^2(x)).
inline double merton_strategy(const ModelSpec& model, double x) {
    return psi_numeric(model.lambda(x), model.sigma_sq(x), model.measure).value;
}

/// (1 - e^{-(y v 0)}) / l_woc
inline double exposure_to_strategy(double y, double l_woc) {
    if (!(y > 0.0)) return 0.0;
    return -std::expm1(-y) / l_woc;
}

/// -log(1 - pi l_woc)
inline double strategy_to_exposure(double pi, double l_woc) {
    if (!(pi >= 0.0) || !(pi * l_woc < 1.0))
        throw std::domain_error("strategy_to_exposure: allocation must lie in [0, 1/l_woc)");
    return -std::log1p(-pi * l_woc);
}

/// Generator f(x, .) with the y-independent parts evaluated once.
class GeneratorAtPoint {
public:
    GeneratorAtPoint(const ModelSpec& model, double x)
        : measure_(model.measure), l_woc_(model.crash.l_woc), lambda_(model.lambda(x)),
          sigma_sq_(model.sigma_sq(x)) {
        merton_ = psi_numeric(lambda_, sigma_sq_, measure_).value;
        gain_ = growth(merton_);
    }

    double operator()(double y) const {
        const double p = exposure_to_strategy(y, l_woc_);
        return gain_ - growth(p);
    }

    /// Phi(y) - r
    double growth(double y) const { return lambda_ * y - 0.5 * sigma_sq_ * y * y + log_moment(measure_, y); }

    double merton() const { return merton_; }
    double lambda() const { return lambda_; }
    double sigma_sq() const { return sigma_sq_; }
    /// Phi(pi^M) - r
    double optimal_growth() const { return gain_; }

private:
    JumpMeasure measure_;
    double l_woc_;
    double lambda_;
    double sigma_sq_;
    double merton_ = 0.0;
    double gain_ = 0.0;
};

/// f(x, y) = [Phi(x, pi^M(x)) - r] - [Phi(x, p(y)) - r]  with p(y) = exposure_to_strategy(y).
inline double generator(const ModelSpec& model, double x, double y) { return GeneratorAtPoint(model, x)(y); }

/// Same model with sigma^2 and lambda frozen at their values in x0.
inline ModelSpec frozen_at(const ModelSpec& model, double x0) {
    ModelSpec out = model;
    out.name = model.name + "_frozen";
    out.coeffs.sigma_sq_kind = SigmaSqKind::constant;
    out.coeffs.sigma_sq_value = model.sigma_sq(x0);
    out.coeffs.lambda_kind = LambdaKind::constant;
    out.coeffs.lambda_value = model.lambda(x0);
    return out;
}

struct ConditionsReport {
    double feller_index = std::numeric_limits<double>::quiet_NaN();
    bool feller_satisfied = false;
    /// 2 kappa / varsigma^2: exp(eps z) moments stay bounded for eps below it (cir).
    double exp_moment_threshold = std::numeric_limits<double>::infinity();
    double admissible_cap = 0.0;
    bool alpha_exceeds_cap = false;
    bool crash_ordering_ok = false;
    double stationary_sd = 0.0;

    std::string to_text() const {
        char buf[512];
        std::string out;
        if (std::isfinite(feller_index)) {
            std::snprintf(buf, sizeof buf, "feller_index = %.4f (%s)\n", feller_index,
                          feller_satisfied ? "paths stay positive" : "zero is attainable");
            out += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "exp_moment_threshold = %.6g\nadmissible_cap = %.6g\nalpha_exceeds_cap = %s\n"
                      "crash_ordering_ok = %s\nstationary_sd = %.6g\n",
                      exp_moment_threshold, admissible_cap, alpha_exceeds_cap ? "true" : "false",
                      crash_ordering_ok ? "true" : "false", stationary_sd);
        out += buf;
        return out;
    }
};

/// Report-only check of the standing assumptions on a model.
inline ConditionsReport check_conditions(const ModelSpec& model) {
    ConditionsReport rep;
    const auto& f = model.factor;
    if (f.kind == FactorKind::cir) {
        rep.feller_index = f.feller_index();
        rep.feller_satisfied = rep.feller_index >= 1.0;
        rep.exp_moment_threshold = 2.0 * f.kappa / (f.varsigma * f.varsigma);
    }
    rep.admissible_cap = 1.0 / model.crash.l_woc;
    rep.alpha_exceeds_cap = model.coeffs.lambda_kind == LambdaKind::appropriate && model.coeffs.alpha > rep.admissible_cap;
    rep.crash_ordering_ok = model.crash.l_levy_max < model.crash.l_woc;
    rep.stationary_sd = f.stationary_sd();
    return rep;
}

} // namespace crashrobust
