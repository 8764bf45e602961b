#pragma once
// Cost-optimal (N, r) allocation.  Total cost is COST = N c1 (1 + r/kappa);
// both the budget-constrained power maximization and the power-constrained
// cost minimization share the same r_opt = argmin (kappa + r) c'Sigma_B c.

#include <optional>

#include "longidesign/types.hpp"

namespace longidesign {

struct Budget {
    double total = 0.0;
};
struct PowerFloor {
    double pi = 0.8;
};

struct CostSpec {
    double c1 = 1.0;     // cost of recruiting + first observation
    double kappa = 1.0;  // follow-up observations are kappa times cheaper
    std::variant<Budget, PowerFloor> constraint;
};

struct AllocationSolution {
    int r_opt = 0;
    long long n_opt = 0;
    double power = 0.0;
    double cost = 0.0;
    bool r_at_bound = false;  // optimum sits on r_hi (the "as large as
                              // possible" regimes)
    std::optional<double> slope_rel_at_ropt;  // RS only: reliability at r_opt
};

// (kappa + r) * unit variance at r; the constraint-free objective whose
// integer argmin is r_opt.
double allocation_objective(int r, double kappa, const DesignQuery& query);

// Integer argmin of the objective over [r_lo, r_hi]; ties break to the
// smaller r.  r_lo is 0 for CMD in fixed-s mode and 1 otherwise.
int optimal_r(const DesignQuery& query, double kappa, int r_lo, int r_hi);

// N at a fixed r: budget mode floor(kappa * COST / (c1 (kappa + r)));
// power mode required_n.
long long optimal_n(int r_opt, const CostSpec& cost, const DesignQuery& query);

// Full solution: r_opt, N, achieved power, exact cost, and (for RS) the
// slope reliability recomputed at r_opt.
AllocationSolution solve_allocation(const DesignQuery& query, const CostSpec& cost,
                                    int r_hi);

// Closed-form continuous optimum for CMD + CS + V(t0) = 0:
// r = sqrt((kappa - 1)(1 - rho)/rho) - 1 (test oracle for the scan).
double cmd_cs_continuous_ropt(double kappa, double rho);

}  // namespace longidesign
