#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "echelon/cost_model.hpp"
#include "echelon/core.hpp"

namespace echelon {

struct SearchSpace {
    int m_min = 0, m_max = 0;
    int R_min = 0, R_max = 0;
    int s_min = 0, s_max = 0;   // clipped to [0, Q-1]
    long long budget = -1;      // < 0: unlimited evaluations
    bool pruned = false;        // monotone-in-m early stopping
};

// R_max default when the caller gives no range: cover the lead-time demand
// with a generous safety band plus one batch.
inline int default_R_max(const SystemParams& p) {
    const double mu = p.lambda * (p.L + p.L0);
    return static_cast<int>(std::ceil(mu) + 3.0 * std::ceil(std::sqrt(mu))) + p.Q;
}

struct GridPoint {
    Policy policy;
    CostBreakdown breakdown;
    double mass_residual_max = 0.0;
};

struct OptimizeResult {
    Policy best;
    EvaluationReport best_report;
    std::vector<GridPoint> grid;  // evaluated points, scan order
    long long evaluations = 0;
};

// Exhaustive (or m-pruned) scan of the policy box. Ties in total cost break
// toward the lexicographically smallest (m, R, s), so the returned policy is
// independent of evaluation order.
inline OptimizeResult optimize(const SystemParams& p, SearchSpace space,
                               double epsilon = 1e-10, int threads = 1) {
    validate(p);
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    space.s_min = std::max(space.s_min, 0);
    space.s_max = std::min(space.s_max, p.Q - 1);
    if (space.m_min < 0) space.m_min = 0;
    if (space.m_min > space.m_max || space.R_min > space.R_max ||
        space.s_min > space.s_max)
        throw std::invalid_argument("search space empty after clipping");

    std::vector<Policy> pts;
    for (int m = space.m_min; m <= space.m_max; ++m)
        for (int R = space.R_min; R <= space.R_max; ++R)
            for (int s = space.s_min; s <= space.s_max; ++s)
                pts.push_back({m, R, s});

    if (!space.pruned && space.budget >= 0 &&
        space.budget < static_cast<long long>(pts.size()))
        throw std::runtime_error("budget exhausted before exhaustive scan completed");

    OptimizeResult out;
    const auto eval_one = [&](const Policy& pol) {
        const EvaluationReport rep = total_cost(pol, p, epsilon);
        GridPoint g;
        g.policy = pol;
        g.breakdown = rep.breakdown;
        g.mass_residual_max = rep.mass_residual_max;
        return g;
    };

    if (!space.pruned) {
        out.grid.resize(pts.size());
        if (threads <= 1) {
            for (std::size_t idx = 0; idx < pts.size(); ++idx)
                out.grid[idx] = eval_one(pts[idx]);
        } else {
            std::size_t idx = 0;
            while (idx < pts.size()) {
                std::vector<std::future<GridPoint>> batch;
                const std::size_t hi =
                    std::min(idx + static_cast<std::size_t>(threads), pts.size());
                for (std::size_t j = idx; j < hi; ++j)
                    batch.push_back(
                        std::async(std::launch::async, eval_one, pts[j]));
                for (std::size_t j = idx; j < hi; ++j)
                    out.grid[j] = batch[j - idx].get();
                idx = hi;
            }
        }
        out.evaluations = static_cast<long long>(pts.size());
    } else {
        // for each (R, s) walk m upward; stop after the cost has risen on two
        // consecutive steps (the cost is near-convex in m in practice)
        for (int R = space.R_min; R <= space.R_max; ++R) {
            for (int s = space.s_min; s <= space.s_max; ++s) {
                double prev = 0.0;
                int rises = 0;
                bool have_prev = false;
                for (int m = space.m_min; m <= space.m_max; ++m) {
                    if (space.budget >= 0 && out.evaluations >= space.budget)
                        throw std::runtime_error(
                            "budget exhausted before pruned scan completed");
                    const GridPoint g = eval_one({m, R, s});
                    out.grid.push_back(g);
                    ++out.evaluations;
                    if (have_prev) {
                        rises = g.breakdown.total > prev ? rises + 1 : 0;
                        if (rises >= 2) break;
                    }
                    prev = g.breakdown.total;
                    have_prev = true;
                }
            }
        }
    }

    const GridPoint* best = nullptr;
    for (const GridPoint& g : out.grid) {
        if (!best) {
            best = &g;
            continue;
        }
        // ties break toward the smallest (m, s, R): fewer reserved batches,
        // then the narrower order-ahead band, then the lower reorder point
        const auto key = [](const GridPoint& x) {
            return std::tuple<double, int, int, int>(
                x.breakdown.total, x.policy.m, x.policy.s, x.policy.R);
        };
        if (key(g) < key(*best)) best = &g;
    }
    if (!best) throw std::logic_error("optimizer produced no evaluations");
    out.best = best->policy;
    out.best_report = total_cost(out.best, p, epsilon);
    return out;
}

}  // namespace echelon
