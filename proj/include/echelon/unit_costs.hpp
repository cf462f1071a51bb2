#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "echelon/core.hpp"

namespace echelon {

namespace detail {

// sum_{k=0}^{j} e^{-x} x^k / k!  (j < 0 -> 0). Incremental term ratios keep
// every partial product in range for the x this model produces.
inline double poisson_cdf(int j, double x) {
    if (j < 0) return 0.0;
    double term = std::exp(-x);
    double acc = term;
    for (int k = 1; k <= j; ++k) {
        term *= x / k;
        acc += term;
    }
    return acc;
}

}  // namespace detail

// P(T_S <= t) for T_S the S-th arrival of a Poisson process with the given
// rate; S = 0 means an already-elapsed arrival.
inline double erlang_cdf(int S, double t, double rate) {
    if (S < 0) throw std::invalid_argument("arrival index S must be non-negative");
    if (t < 0.0) throw std::invalid_argument("time t must be non-negative");
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
    if (S == 0) return 1.0;
    return 1.0 - detail::poisson_cdf(S - 1, rate * t);
}

// Expected warehouse holding cost carried by one batch that leaves S0 demands
// after its supplier order arrives: h0 * E[(T_S0 - L0)^+]. Direct series.
inline double gamma_warehouse(int S0, const SystemParams& p) {
    validate(p);
    if (S0 <= 0) return 0.0;
    const double x = p.lambda0() * p.L0;
    double pw = 1.0;  // x^k / k!
    double acc = S0;
    for (int k = 1; k < S0; ++k) {
        pw *= x / k;
        acc += (S0 - k) * pw;
    }
    return std::exp(-x) * p.h0 / p.lambda0() * acc;
}

// Same quantity through the complementary-cdf identity
// (S0/rate)(1 - G^{S0+1}(L0)) - L0 (1 - G^{S0}(L0)); the two routes share no
// accumulation order, which makes their agreement a real check.
inline double gamma_warehouse_ccdf(int S0, const SystemParams& p) {
    validate(p);
    if (S0 <= 0) return 0.0;
    const double x = p.lambda0() * p.L0;
    return p.h0 * S0 / p.lambda0() * detail::poisson_cdf(S0, x) -
           p.h0 * p.L0 * detail::poisson_cdf(S0 - 1, x);
}

namespace detail {

// Expected holding + shortage cost of one unit that covers the Si-th retailer
// demand after its batch leaves the warehouse with delay t. Si = 0 is the
// boundary row of the recursion (a unit consumed at the order epoch itself).
inline double pi_retailer_raw(int Si, double t, const SystemParams& p) {
    const double a = p.L + t;
    const double x = p.lambda * a;
    double acc = 0.0;
    if (Si >= 1) {
        double pw = 1.0;
        acc = Si;
        for (int k = 1; k < Si; ++k) {
            pw *= x / k;
            acc += (Si - k) * pw;
        }
        acc *= std::exp(-x) / p.lambda;
    }
    return (p.h + p.beta) * acc + p.beta * (a - Si / p.lambda);
}

}  // namespace detail

// Positive order levels only; non-positive levels never experience a wait and
// are covered by the closed forms inside UnitCostTable.
inline double pi_retailer(int Si, double t, const SystemParams& p) {
    validate(p);
    if (Si < 1) throw std::invalid_argument("order level Si must be positive");
    if (t < 0.0) throw std::invalid_argument("delay t must be non-negative");
    return detail::pi_retailer_raw(Si, t, p);
}

// Exact expected retailer cost Pi(Si, S0) for a unit that is the Si-th demand
// at its retailer while its batch is the S0-th warehouse departure after the
// supplier order. Built by downward recursion over S0 from a column s0_bar
// where the warehouse delay is negligible (erlang_cdf < epsilon), seeded with
// the zero-delay cost. Rows at Si <= 0 come from closed forms.
class UnitCostTable {
  public:
    UnitCostTable(const SystemParams& p, int Si_max, int S0_min, double epsilon)
        : p_(p), Si_max_(Si_max), S0_min_(S0_min), eps_(epsilon) {
        validate(p);
        if (!(epsilon > 0.0) || epsilon >= 1.0)
            throw std::invalid_argument("epsilon out of range (0, 1)");
        s0_bar_ = 1;
        while (erlang_cdf(s0_bar_, p.L0, p.lambda0()) >= eps_) ++s0_bar_;
        if (S0_min_ > s0_bar_) S0_min_ = s0_bar_;
        const int rows = std::max(Si_max_, 0) + 1;  // Si = 0 .. Si_max
        pin_.resize(rows);
        for (int Si = 0; Si < rows; ++Si)
            pin_[Si] = detail::pi_retailer_raw(Si, 0.0, p_);
        if (Si_max_ >= 1) fill();
    }

    int s0_bar() const { return s0_bar_; }
    double epsilon() const { return eps_; }

    // zero-delay retailer cost, the recursion seed
    double pi_at_zero(int Si) const {
        if (Si < 0 || Si >= static_cast<int>(pin_.size()))
            throw std::out_of_range("order level Si outside table");
        return pin_[Si];
    }

    double Pi(int Si, int S0) const {
        if (Si > Si_max_) throw std::out_of_range("order level Si outside table");
        if (Si <= 0) return closed_nonpositive(Si, S0);
        if (S0 >= s0_bar_) return pin_[Si];
        if (S0 < S0_min_) throw std::out_of_range("queue index S0 outside table");
        return tbl_[idx(Si, S0)];
    }

  private:
    // Si <= 0: the unit is already demanded (backordered) when its batch
    // leaves; only the shortage clock runs. Warehouse terms carry the
    // warehouse rate, retailer terms the retailer rate.
    double closed_nonpositive(int Si, int S0) const {
        if (S0 > 0) {
            const double g0 = erlang_cdf(S0, p_.L0, p_.lambda0());
            const double g1 = erlang_cdf(S0 + 1, p_.L0, p_.lambda0());
            return p_.beta * (g0 * p_.L0 - g1 * S0 / p_.lambda0() + p_.L -
                              static_cast<double>(Si) / p_.lambda);
        }
        return p_.beta * (p_.L + p_.L0 - static_cast<double>(Si) / p_.lambda -
                          static_cast<double>(S0) / p_.lambda0());
    }

    std::size_t idx(int Si, int S0) const {
        return static_cast<std::size_t>(Si - 1) * cols_ +
               static_cast<std::size_t>(S0 - S0_min_);
    }

    void fill() {
        cols_ = static_cast<std::size_t>(s0_bar_ - S0_min_ + 1);
        tbl_.assign(static_cast<std::size_t>(Si_max_) * cols_, 0.0);
        const double invN = 1.0 / p_.N;
        for (int Si = 1; Si <= Si_max_; ++Si) tbl_[idx(Si, s0_bar_)] = pin_[Si];
        for (int S0 = s0_bar_ - 1; S0 >= S0_min_; --S0) {
            const int src = S0 + 1;
            // survival of the warehouse delay at the source column; the
            // complementary sum avoids cancellation when the cdf is near 1
            const double surv =
                src > 0 ? detail::poisson_cdf(src - 1, p_.lambda0() * p_.L0) : 0.0;
            for (int Si = 1; Si <= Si_max_; ++Si) {
                const double below =
                    Si - 1 >= 1 ? tbl_[idx(Si - 1, src)] : closed_nonpositive(0, src);
                const double here = tbl_[idx(Si, src)];
                double v = invN * below + (1.0 - invN) * here;
                if (src > 0) v += invN * surv * (pin_[Si] - pin_[Si - 1]);
                tbl_[idx(Si, S0)] = v;
            }
        }
    }

    SystemParams p_;
    int Si_max_;
    int S0_min_;
    double eps_;
    int s0_bar_ = 1;
    std::size_t cols_ = 0;
    std::vector<double> pin_;
    std::vector<double> tbl_;
};

// One-off table build for a single query.
inline double Pi_retailer(int Si, int S0, const SystemParams& p,
                          double epsilon = 1e-10) {
    UnitCostTable t(p, std::max(Si, 0), std::min(S0, 0), epsilon);
    return t.Pi(Si, S0);
}

}  // namespace echelon
