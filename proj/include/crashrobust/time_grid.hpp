#pragma once

#include <cstddef>
#include <vector>

namespace crashrobust {

/// 0 = t_0 < ... < t_n = horizon, equally spaced.
inline std::vector<double> uniform_grid(double horizon, std::size_t n_steps) {
    std::vector<double> t(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(n_steps);
    t.back() = horizon;
    return t;
}

} // namespace crashrobust
