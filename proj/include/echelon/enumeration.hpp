#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "echelon/core.hpp"
#include "echelon/demand_bounds.hpp"
#include "echelon/demand_probability.hpp"

namespace echelon {

// Exact law of (pulling class, demand count) computed by brute force: a
// demand-by-demand dynamic program over the joint retailer state. Serves as
// the independent oracle for the analytic trigger distribution. Only feasible
// for small N, Q, m; the node limit guards against blowup.
struct ExactTriggerLaw {
    int state = 1;
    int m_prime = 0;
    std::map<std::pair<int, int>, double> probs;  // (class label, k) -> mass
    double truncated_mass = 0.0;  // paths dropped below prob_floor
    int max_small_orders = 0;     // most first-cycle (< Q demand) orders seen
};

inline ExactTriggerLaw enumerate_trigger_distribution(
    int i, const Policy& pol, const SystemParams& p, double prob_floor = 1e-14,
    std::size_t node_limit = 10'000'000) {
    validate(p, pol);
    if (i < 1 || i > p.N) throw std::out_of_range("state index i out of [1, N]");
    const int N = p.N, Q = p.Q, s = pol.s;
    ExactTriggerLaw law;
    law.state = i;
    law.m_prime = m_prime(i, s, pol.m);
    if (law.m_prime == 0) {
        law.probs[{static_cast<int>(ClassLabel::at), 0}] = 1.0;
        return law;
    }
    if (Q > 200 || law.m_prime > 200)
        throw std::invalid_argument("enumeration limited to small instances");

    // state key: per retailer the demands until its next order (1..Q) and a
    // flag marking that its first order will have consumed < Q demands, then
    // the running order count and the count of such short first orders.
    using Key = std::vector<std::uint8_t>;
    std::map<Key, double> cur;

    // initial positions at the order epoch: trigger pinned, the i-1 committed
    // retailers uniform below, the rest uniform above
    std::vector<std::pair<int, int>> ranges(N);  // d-range per retailer
    for (int r = 1; r <= N; ++r) {
        if (s > 0) {
            if (r < i) ranges[r - 1] = {1, s};
            else if (r == i) ranges[r - 1] = {s, s};
            else ranges[r - 1] = {s + 1, Q};
        } else {
            ranges[r - 1] = r == 1 ? std::pair<int, int>{Q, Q}
                                   : std::pair<int, int>{1, Q};
        }
    }
    {
        Key key(static_cast<std::size_t>(2 * N + 2), 0);
        std::vector<int> d(N);
        // odometer over the product of ranges
        for (int r = 0; r < N; ++r) d[r] = ranges[r].first;
        while (true) {
            double pr = 1.0;
            for (int r = 0; r < N; ++r)
                pr /= ranges[r].second - ranges[r].first + 1;
            for (int r = 0; r < N; ++r) {
                key[r] = static_cast<std::uint8_t>(d[r]);
                key[N + r] = d[r] < Q ? 1 : 0;
            }
            key[2 * N] = 0;      // orders so far
            key[2 * N + 1] = 0;  // short first orders
            cur[key] += pr;
            int r = 0;
            while (r < N && ++d[r] > ranges[r].second) d[r] = ranges[r].first, ++r;
            if (r == N) break;
        }
    }

    const int hard_cap = (law.m_prime + N + 1) * Q + 2 * N * Q + 64;
    int k = 0;
    while (!cur.empty()) {
        ++k;
        if (k > hard_cap)
            throw std::runtime_error("enumeration failed to absorb all mass");
        std::map<Key, double> nxt;
        for (const auto& [key, pr] : cur) {
            for (int r = 0; r < N; ++r) {
                const double pp = pr / N;
                Key k2 = key;
                if (--k2[r] == 0) {
                    // retailer r+1 places an order
                    k2[2 * N] = static_cast<std::uint8_t>(k2[2 * N] + 1);
                    if (k2[N + r]) {
                        k2[N + r] = 0;
                        k2[2 * N + 1] = static_cast<std::uint8_t>(k2[2 * N + 1] + 1);
                    }
                    k2[r] = static_cast<std::uint8_t>(Q);
                    if (k2[2 * N] == law.m_prime) {
                        ClassLabel lab;
                        if (s == 0)
                            lab = r == 0 ? ClassLabel::at : ClassLabel::above;
                        else
                            lab = r + 1 < i ? ClassLabel::below
                                            : (r + 1 == i ? ClassLabel::at
                                                          : ClassLabel::above);
                        law.probs[{static_cast<int>(lab), k}] += pp;
                        if (k2[2 * N + 1] > law.max_small_orders)
                            law.max_small_orders = k2[2 * N + 1];
                        continue;
                    }
                }
                if (pp < prob_floor) {
                    law.truncated_mass += pp;
                    continue;
                }
                nxt[std::move(k2)] += pp;
            }
        }
        cur = std::move(nxt);
        if (cur.size() > node_limit)
            throw std::runtime_error("enumeration state space exceeds node limit");
    }
    return law;
}

// Deviation summary between the analytic law and the exact one.
struct TriggerComparison {
    double max_abs_dev = 0.0;
    double analytic_mass_residual = 0.0;
    double exact_mass_residual = 0.0;
    bool support_contained = true;  // exact support inside [lb, ub]
    int max_small_orders = 0;
    int support_lo = 0;
    int support_hi = 0;
};

inline TriggerComparison compare_trigger_laws(
    int i, const Policy& pol, const SystemParams& p,
    const std::optional<MuPerturbation>& hook = std::nullopt) {
    const TriggerDistribution ana = trigger_distribution(i, pol, p, hook);
    const ExactTriggerLaw exact = enumerate_trigger_distribution(i, pol, p);
    std::map<std::pair<int, int>, double> amap;
    for (const TriggerEntry& e : ana.entries)
        amap[{static_cast<int>(e.b_class), e.k}] += e.prob;
    TriggerComparison cmp;
    cmp.max_small_orders = exact.max_small_orders;
    std::map<std::pair<int, int>, double> keys = amap;
    for (const auto& [kk, v] : exact.probs) keys.emplace(kk, 0.0);
    for (const auto& [kk, unused] : keys) {
        const auto ia = amap.find(kk);
        const auto ie = exact.probs.find(kk);
        const double a = ia == amap.end() ? 0.0 : ia->second;
        const double e = ie == exact.probs.end() ? 0.0 : ie->second;
        cmp.max_abs_dev = std::max(cmp.max_abs_dev, std::abs(a - e));
    }
    cmp.analytic_mass_residual = std::abs(1.0 - ana.total_mass());
    double em = exact.truncated_mass;
    for (const auto& [kk, v] : exact.probs) em += v;
    cmp.exact_mass_residual = std::abs(1.0 - em);
    const DemandBounds b = demand_bounds(i, pol, p);
    bool first = true;
    for (const auto& [kk, v] : exact.probs) {
        if (v <= 0.0) continue;
        if (first || kk.second < cmp.support_lo) cmp.support_lo = kk.second;
        if (first || kk.second > cmp.support_hi) cmp.support_hi = kk.second;
        first = false;
    }
    if (!first)
        cmp.support_contained = cmp.support_lo >= b.lb && cmp.support_hi <= b.ub;
    return cmp;
}

}  // namespace echelon
