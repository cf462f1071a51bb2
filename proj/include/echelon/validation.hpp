#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "echelon/cost_model.hpp"
#include "echelon/core.hpp"
#include "echelon/enumeration.hpp"
#include "echelon/simulation.hpp"
#include "echelon/unit_costs.hpp"

namespace echelon {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

struct ValidationOptions {
    double trigger_tol = 1e-9;
    double mass_tol = 1e-9;
    double gamma_tol = 1e-10;     // relative, on max(1, |value|)
    bool sim_check = false;       // slower statistical cross-check
    double sim_sigma = 3.0;
    SimConfig sim;
    std::optional<MuPerturbation> corrupt_mu;  // falsifiability hook
    double epsilon = 1e-10;
};

// Cross-checks the analytic trigger law against exhaustive enumeration for
// every reachable state of the given policy, then the unit-cost identities,
// and optionally the simulator. Any injected mu corruption flows into the
// analytic side only, so the comparison must fail when it is active.
inline ValidationReport run_validation(const Policy& pol, const SystemParams& p,
                                       const ValidationOptions& opt = {}) {
    validate(p, pol);
    ValidationReport rep;

    const int state_hi = pol.s > 0 ? p.N : 1;
    double worst_dev = 0.0, worst_mass = 0.0;
    bool support_ok = true;
    int worst_small = 0;
    std::ostringstream det;
    for (int i = 1; i <= state_hi; ++i) {
        const TriggerComparison cmp = compare_trigger_laws(i, pol, p, opt.corrupt_mu);
        worst_dev = std::max(worst_dev, cmp.max_abs_dev);
        worst_mass = std::max(
            worst_mass, std::max(cmp.analytic_mass_residual, cmp.exact_mass_residual));
        support_ok = support_ok && cmp.support_contained;
        worst_small = std::max(worst_small, cmp.max_small_orders);
        det << (i > 1 ? " " : "") << "i=" << i << ":dev=" << cmp.max_abs_dev;
    }
    rep.checks.push_back({"trigger law vs enumeration", worst_dev <= opt.trigger_tol,
                          worst_dev, opt.trigger_tol, det.str()});
    rep.checks.push_back({"trigger mass residual", worst_mass <= opt.mass_tol,
                          worst_mass, opt.mass_tol, ""});
    rep.checks.push_back({"demand support within bounds", support_ok,
                          support_ok ? 0.0 : 1.0, 0.0, ""});
    rep.checks.push_back({"small-order count within retailer count",
                          worst_small <= p.N, static_cast<double>(worst_small),
                          static_cast<double>(p.N), ""});

    // warehouse unit cost: two summation routes must agree
    double gdev = 0.0;
    const int S0_hi = std::max(
        upper_bound_demands(state_hi, pol.s, pol.m, p) + p.Q, 50);
    for (int S0 = 1; S0 <= S0_hi; ++S0) {
        const double a = gamma_warehouse(S0, p);
        const double b = gamma_warehouse_ccdf(S0, p);
        gdev = std::max(gdev, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    rep.checks.push_back({"warehouse unit-cost dual forms", gdev <= opt.gamma_tol,
                          gdev, opt.gamma_tol, ""});

    // retailer unit cost approaches the zero-delay cost at the seed column
    {
        const UnitCostTable tbl = build_cost_table(pol, p, opt.epsilon);
        double dev = 0.0;
        const int top = std::max(pol.R + p.Q, 1);
        for (int Si = 1; Si <= top; ++Si) {
            const double a = tbl.Pi(Si, tbl.s0_bar() - 1);
            const double b = tbl.pi_at_zero(Si);
            dev = std::max(dev, std::abs(a - b) / std::max(1.0, std::abs(b)));
        }
        // the last recursion step moves the cost by at most ~epsilon-scale mass
        const double tol = std::max(1e-6, 1e3 * opt.epsilon);
        rep.checks.push_back({"unit-cost recursion seed convergence", dev <= tol,
                              dev, tol, "s0_bar=" + std::to_string(tbl.s0_bar())});
    }

    if (opt.sim_check) {
        const EvaluationReport ana = total_cost(pol, p, opt.epsilon);
        const SimulationResult sim = simulate(pol, p, opt.sim);
        const double se = std::max(sim.std_error, 1e-12);
        const double z = std::abs(ana.breakdown.total - sim.mean_cost_rate) / se;
        std::ostringstream sd;
        sd << "analytic=" << ana.breakdown.total << " sim=" << sim.mean_cost_rate
           << " se=" << sim.std_error;
        rep.checks.push_back({"simulation agreement (z-score)", z <= opt.sim_sigma,
                              z, opt.sim_sigma, sd.str()});
    }
    return rep;
}

}  // namespace echelon
