#pragma once

// Preset models: four Heston/Bates variants on one CIR volatility factor and Kim-Omberg.
//   a  -- reciprocal jumps dl/l, lambda appropriate for alpha = 2.5
//   b  -- unit atom at q = 0.2, lambda appropriate for alpha = 2.5
//   c  -- no jumps, lambda(z) = 2.5 z
//   d  -- no jumps, constant lambda = 2.5 * theta, sigma^2(z) = z
//   ko -- OU factor, lambda(z) = z, sigma^2 = theta

#include "crashrobust/market.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crashrobust {

namespace presets {

inline constexpr double heston_kappa = 3.99;
inline constexpr double heston_theta = 0.014;
inline constexpr double heston_varsigma = 0.27;
inline constexpr double ko_kappa = 3.5;
inline constexpr double ko_theta = 0.014;
inline constexpr double ko_varsigma = 0.3;
inline constexpr double horizon = 5.0;
inline constexpr double alpha = 2.5;
inline constexpr double l_woc = 0.5;
inline constexpr double l_levy_max = 0.2;

inline constexpr std::array<std::string_view, 5> names{"a", "b", "c", "d", "ko"};

inline FactorDynamics heston_factor() {
    return {FactorKind::cir, heston_kappa, heston_theta, heston_varsigma, heston_theta};
}

} // namespace presets

inline ModelSpec preset(std::string_view name) {
    ModelSpec m;
    m.name = std::string(name);
    m.crash = {presets::l_woc, presets::l_levy_max};
    m.horizon = presets::horizon;
    m.r = 0.0;
    m.rho = 0.0;
    m.factor = presets::heston_factor();
    m.coeffs.sigma_sq_kind = SigmaSqKind::sqrt_vol;

    if (name == "a") {
        m.measure = JumpMeasure::reciprocal(presets::l_levy_max);
        m.coeffs.lambda_kind = LambdaKind::appropriate;
        m.coeffs.alpha = presets::alpha;
    } else if (name == "b") {
        m.measure = JumpMeasure::atom(presets::l_levy_max);
        m.coeffs.lambda_kind = LambdaKind::appropriate;
        m.coeffs.alpha = presets::alpha;
    } else if (name == "c") {
        m.measure = JumpMeasure::none();
        m.coeffs.lambda_kind = LambdaKind::appropriate;
        m.coeffs.alpha = presets::alpha;
    } else if (name == "d") {
        m.measure = JumpMeasure::none();
        m.coeffs.lambda_kind = LambdaKind::constant;
        m.coeffs.lambda_value = presets::alpha * presets::heston_theta;
    } else if (name == "ko") {
        m.factor = {FactorKind::ou, presets::ko_kappa, presets::ko_theta, presets::ko_varsigma, presets::ko_theta};
        m.measure = JumpMeasure::none();
        m.coeffs.sigma_sq_kind = SigmaSqKind::constant;
        m.coeffs.sigma_sq_value = presets::ko_theta;
        m.coeffs.lambda_kind = LambdaKind::identity;
    } else {
        throw std::invalid_argument("unknown model preset '" + std::string(name) + "'");
    }
    m.validate();
    return m;
}

inline bool is_preset(std::string_view name) {
    for (auto n : presets::names)
        if (n == name) return true;
    return false;
}

} // namespace crashrobust
