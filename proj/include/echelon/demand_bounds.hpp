#pragma once

#include <stdexcept>

#include "echelon/core.hpp"

namespace echelon {

// The number of system demands consumed between a supplier order and the
// moment its batch is pulled by a retailer is bounded by closed forms that
// depend on which of five regimes the (i, s, m) combination falls in:
//   A: s > 0, m + i >= N, every retailer committed (i = N)
//   B: s > 0, m + i >= N, i < N
//   C: s > 0, m + i < N (the queue empties before a full rotation)
//   D: s = 0, m < N
//   E: s = 0, m >= N
enum class Subsystem { A, B, C, D, E };

inline Subsystem classify_subsystem(int i, int s, int m, int N) {
    if (i < 1 || i > N) throw std::out_of_range("state index i out of [1, N]");
    if (s == 0) return m < N ? Subsystem::D : Subsystem::E;
    if (i == N) return Subsystem::A;  // m + i >= N holds automatically
    return m + i >= N ? Subsystem::B : Subsystem::C;
}

// Minimum system demands from supplier-order epoch until the batch leaves the
// warehouse (inclusive of the demand that pulls it).
inline int lower_bound_demands(int i, int s, int m, const SystemParams& p) {
    validate(p);
    if (i < 1 || i > p.N) throw std::out_of_range("state index i out of [1, N]");
    if (s < 0 || s > p.Q - 1) throw std::invalid_argument("s out of range [0, Q-1]");
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    const int N = p.N, Q = p.Q;
    if (s == 0) {
        if (m < N) return m;
        return (N - 1) + (m - N + 1) * Q;
    }
    if (m + i < N) return (i - 1) + s + m * (s + 1);
    return (i - 1) + s + (N - i) * (s + 1) + (m + i - N) * Q;
}

inline int upper_bound_demands(int i, int s, int m, const SystemParams& p) {
    validate(p);
    if (i < 1 || i > p.N) throw std::out_of_range("state index i out of [1, N]");
    if (s < 0 || s > p.Q - 1) throw std::invalid_argument("s out of range [0, Q-1]");
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    const int N = p.N, Q = p.Q;
    if (s == 0) return (N - 1) * (Q - 1) + m * Q;
    if (i < N) return i * (s - 1) + (N - i - 1) * (Q - 1) + (m + i) * Q;
    return (N - 1) * (s - 1) + s + (m + i - 1) * Q;
}

struct DemandBounds {
    int lb = 0;
    int ub = 0;
    Subsystem subsystem = Subsystem::A;
};

// lb <= ub always; the support of the trigger count is contained in [lb, ub]
// (individual endpoints may be unattainable for a specific pulling class).
inline DemandBounds demand_bounds(int i, const Policy& pol, const SystemParams& p) {
    validate(p, pol);
    DemandBounds b;
    b.lb = lower_bound_demands(i, pol.s, pol.m, p);
    b.ub = upper_bound_demands(i, pol.s, pol.m, p);
    b.subsystem = classify_subsystem(i, pol.s, pol.m, p.N);
    return b;
}

}  // namespace echelon
