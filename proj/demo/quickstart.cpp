// Solve preset (a), print the pre-crash strategy at t = 0 and on two simulated paths at t = T/2.

#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/factor_sim.hpp"
#include "crashrobust/presets.hpp"

#include <cstdio>

using namespace crashrobust;

int main() {
    const auto model = preset("a");
    const auto vs = solve_pde(model, SolverConfig{});
    const auto ps = policy_surface(vs, model.crash.l_woc);
    std::printf("v(0, z0) = %.6f, pi(0, z0) = %.6f, pi^M = %.6f\n", eval_value(vs, 0.0, model.factor.z0).value,
                eval_policy(ps, 0.0, model.factor.z0).value, merton_strategy(model, model.factor.z0));

    const auto paths = simulate_paths(model.factor, 2, 1000, model.horizon, RngSpec{42});
    for (std::size_t p = 0; p < paths.n_paths(); ++p) {
        const double z = paths.values[p][500];
        std::printf("path %zu: z(T/2) = %.5f, pi(T/2) = %.5f\n", p, z, eval_policy(ps, paths.times[500], z).value);
    }
}
