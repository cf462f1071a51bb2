#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace echelon {

inline constexpr const char* k_version = "1.0.0";

// One central warehouse, N identical retailers, unit Poisson demand at each
// retailer, batch ordering in multiples of Q, full backlogging.
struct SystemParams {
    int N = 1;            // retailers, >= 1
    double lambda = 1.0;  // demand rate per retailer, > 0
    double L = 0.0;       // warehouse -> retailer transport time, >= 0
    double L0 = 0.0;      // supplier -> warehouse lead time, >= 0
    double h = 0.0;       // retailer holding cost rate, >= 0
    double h0 = 0.0;      // warehouse holding cost rate, >= 0
    double beta = 0.0;    // retailer shortage cost rate, >= 0
    int Q = 1;            // batch size, >= 1

    double lambda0() const { return N * lambda; }
};

// (m, R, s): the warehouse keeps m batches uncommitted; every retailer runs a
// continuous-review (R, Q) rule; the warehouse releases a supplier order the
// moment any retailer's inventory position falls to R + s.
struct Policy {
    int m = 0;  // >= 0
    int R = 0;  // may be negative
    int s = 0;  // 0 <= s <= Q - 1
};

struct CostBreakdown {
    double warehouse_holding = 0.0;
    double retailer_holding_shortage = 0.0;
    double total = 0.0;  // always the single-addition sum of the two parts
};

inline void validate(const SystemParams& p) {
    if (p.N < 1) throw std::invalid_argument("N must be at least 1");
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw std::invalid_argument("lambda must be positive");
    if (p.L < 0.0 || !std::isfinite(p.L))
        throw std::invalid_argument("L must be non-negative");
    if (p.L0 < 0.0 || !std::isfinite(p.L0))
        throw std::invalid_argument("L0 must be non-negative");
    if (p.h < 0.0 || !std::isfinite(p.h))
        throw std::invalid_argument("h must be non-negative");
    if (p.h0 < 0.0 || !std::isfinite(p.h0))
        throw std::invalid_argument("h0 must be non-negative");
    if (p.beta < 0.0 || !std::isfinite(p.beta))
        throw std::invalid_argument("beta must be non-negative");
    if (p.Q < 1) throw std::invalid_argument("Q must be at least 1");
}

inline void validate(const SystemParams& p, const Policy& pol) {
    validate(p);
    if (pol.m < 0) throw std::invalid_argument("m must be non-negative");
    if (pol.s < 0 || pol.s > p.Q - 1)
        throw std::invalid_argument("s out of range [0, Q-1]");
}

}  // namespace echelon
