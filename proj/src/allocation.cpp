#include "longidesign/allocation.hpp"

#include <cmath>

#include "longidesign/covariance.hpp"
#include "longidesign/solvers.hpp"
#include "longidesign/variance.hpp"

namespace longidesign {

double allocation_objective(int r, double kappa, const DesignQuery& query) {
    if (kappa <= 0.0) throw DomainError("kappa must be positive");
    return (kappa + r) * unit_variance(query.with_r(r)).value;
}

int optimal_r(const DesignQuery& query, double kappa, int r_lo, int r_hi) {
    if (r_lo < 0 || r_hi < r_lo) throw DomainError("invalid r range");
    int best_r = -1;
    double best = 0.0;
    for (int r = r_lo; r <= r_hi; ++r) {
        const double obj = allocation_objective(r, kappa, query);
        if (best_r < 0 || obj < best * (1.0 - 1e-12)) {
            best_r = r;
            best = obj;
        }
    }
    return best_r;
}

long long optimal_n(int r_opt, const CostSpec& cost, const DesignQuery& query) {
    if (cost.c1 <= 0.0) throw DomainError("c1 must be positive");
    if (cost.kappa < 1.0)
        throw DomainError(
            "kappa must be >= 1 (follow-ups cannot cost more than the first "
            "observation)");
    if (const auto* budget = std::get_if<Budget>(&cost.constraint)) {
        if (budget->total <= 0.0) throw DomainError("budget must be positive");
        const long long n = static_cast<long long>(std::floor(
            cost.kappa * budget->total / (cost.c1 * (cost.kappa + r_opt)) + 1e-9));
        if (n < 2)
            throw ComputationError(
                "budget too small for a two-participant study");
        return n;
    }
    const auto& floor = std::get<PowerFloor>(cost.constraint);
    return required_n(floor.pi, query.with_r(r_opt)).n;
}

AllocationSolution solve_allocation(const DesignQuery& query, const CostSpec& cost,
                                    int r_hi) {
    const int r_lo = (query.hyp == Hypothesis::CMD &&
                      query.grid.mode == RelMode::FixedS)
                         ? 0
                         : 1;
    AllocationSolution sol;
    sol.r_opt = optimal_r(query, cost.kappa, r_lo, r_hi);
    sol.r_at_bound = sol.r_opt == r_hi;
    sol.n_opt = optimal_n(sol.r_opt, cost, query);
    sol.power = power(static_cast<double>(sol.n_opt), query.with_r(sol.r_opt));
    sol.cost = sol.n_opt * cost.c1 * (1.0 + sol.r_opt / cost.kappa);
    if (const auto* rs = std::get_if<RsParams>(&query.cov.v)) {
        if (sol.r_opt >= 1) {
            const TimeGrid g = query.grid.with_r(sol.r_opt);
            sol.slope_rel_at_ropt = slope_reliability(
                rs->raw, g.mode,
                g.mode == RelMode::FixedS ? g.spacing() : g.tau(), sol.r_opt);
        }
    }
    return sol;
}

double cmd_cs_continuous_ropt(double kappa, double rho) {
    if (rho <= 0.0 || rho >= 1.0) throw DomainError("rho must lie in (0, 1)");
    if (kappa < 1.0) return 0.0;
    const double r = std::sqrt((kappa - 1.0) * (1.0 - rho) / rho) - 1.0;
    return r > 0.0 ? r : 0.0;
}

}  // namespace longidesign
