#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "echelon/core.hpp"
#include "echelon/demand_bounds.hpp"
#include "echelon/demand_probability.hpp"
#include "echelon/unit_costs.hpp"

namespace echelon {

struct PerStateCost {
    int state = 1;
    double state_prob = 0.0;
    double conditional_unit_cost = 0.0;  // E[unit cost | order placed in state i]
    double mass_residual = 0.0;          // |1 - trigger mass| for this state
};

struct EvaluationReport {
    Policy policy;
    CostBreakdown breakdown;
    std::vector<PerStateCost> per_state;
    double mass_residual_max = 0.0;
};

// Pluggable per-batch cost source. gamma(k): warehouse part for a batch pulled
// by the k-th system demand after its supplier order; retailer_avg(k):
// batch-average retailer part. Splitting the two keeps the breakdown exact.
struct UnitCostProvider {
    std::function<double(int)> gamma;
    std::function<double(int)> retailer_avg;
};

// Batch-average retailer cost: the batch covers order levels R+1 .. R+Q.
inline double expected_unit_cost(int k, const Policy& pol, const SystemParams& p,
                                 const UnitCostTable& table) {
    double acc = 0.0;
    for (int j = 1; j <= p.Q; ++j) acc += table.Pi(pol.R + j, k);
    return gamma_warehouse(k, p) + acc / p.Q;
}

inline UnitCostProvider make_table_provider(const Policy& pol,
                                            const SystemParams& p,
                                            const UnitCostTable& table) {
    UnitCostProvider prov;
    prov.gamma = [&p](int k) { return gamma_warehouse(k, p); };
    prov.retailer_avg = [&pol, &p, &table](int k) {
        double acc = 0.0;
        for (int j = 1; j <= p.Q; ++j) acc += table.Pi(pol.R + j, k);
        return acc / p.Q;
    };
    return prov;
}

// Long-run average cost rate: demand rate times the expected cost carried by
// one batch, decomposed over order-epoch states and pulling classes. Each
// state's trigger law must carry unit mass; a residual above tolerance means
// the probability pipeline is broken, so the evaluation is rejected.
inline EvaluationReport evaluate_with_unit_costs(const Policy& pol,
                                                 const SystemParams& p,
                                                 const UnitCostProvider& prov,
                                                 double mass_tolerance = 1e-9) {
    validate(p, pol);
    EvaluationReport rep;
    rep.policy = pol;
    double wh = 0.0, ret = 0.0;
    const int state_hi = pol.s > 0 ? p.N : 1;
    for (int i = 1; i <= state_hi; ++i) {
        const double ps = state_probability(i, pol.s, p);
        if (ps == 0.0) continue;
        const TriggerDistribution law = trigger_distribution(i, pol, p);
        double mass = 0.0, cwh = 0.0, cret = 0.0;
        for (const TriggerEntry& e : law.entries) {
            if (e.prob == 0.0) continue;
            mass += e.prob;
            cwh += e.prob * prov.gamma(e.k);
            cret += e.prob * prov.retailer_avg(e.k);
        }
        PerStateCost st;
        st.state = i;
        st.state_prob = ps;
        st.conditional_unit_cost = cwh + cret;
        st.mass_residual = std::abs(1.0 - mass);
        rep.per_state.push_back(st);
        rep.mass_residual_max = std::max(rep.mass_residual_max, st.mass_residual);
        if (st.mass_residual > mass_tolerance)
            throw std::runtime_error("trigger law mass residual above tolerance");
        wh += ps * cwh;
        ret += ps * cret;
    }
    const double scale = p.lambda0();
    rep.breakdown.warehouse_holding = scale * wh;
    rep.breakdown.retailer_holding_shortage = scale * ret;
    rep.breakdown.total =
        rep.breakdown.warehouse_holding + rep.breakdown.retailer_holding_shortage;
    return rep;
}

// Rows cover every order level a batch can hold; columns run down to queue
// index 0 (queries past s0_bar use the zero-delay asymptote).
inline UnitCostTable build_cost_table(const Policy& pol, const SystemParams& p,
                                      double epsilon = 1e-10) {
    validate(p, pol);
    return UnitCostTable(p, std::max(pol.R + p.Q, 0), 0, epsilon);
}

inline EvaluationReport total_cost(const Policy& pol, const SystemParams& p,
                                   double epsilon = 1e-10) {
    const UnitCostTable table = build_cost_table(pol, p, epsilon);
    return evaluate_with_unit_costs(pol, p, make_table_provider(pol, p, table));
}

}  // namespace echelon
