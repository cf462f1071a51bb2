#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "echelon/core.hpp"
#include "echelon/demand_bounds.hpp"

namespace echelon {

// Retailer classes at a supplier-order epoch. The trigger retailer sits
// exactly at R+s; the others are split by whether their inventory position is
// at most R+s (below) or above it. With s = 0 the trigger has just jumped to
// R+Q and everyone else is spread over the full band, so only "at" (the
// trigger) and "above" exist.
enum class ClassLabel { below, at, above };

struct RetailerClass {
    ClassLabel label = ClassLabel::at;
    bool is_B = false;  // true for the retailer that eventually pulls the batch
};

// Stationary probability that i retailers (trigger included) sit at or below
// R+s at an order epoch. Positions are independent uniform over the Q-band.
inline double state_probability(int i, int s, const SystemParams& p) {
    validate(p);
    if (i < 1 || i > p.N) throw std::out_of_range("state index i out of [1, N]");
    if (s < 0 || s > p.Q - 1) throw std::invalid_argument("s out of range [0, Q-1]");
    if (s == 0) return i == 1 ? 1.0 : 0.0;
    const double pr = static_cast<double>(s) / p.Q;
    // C(N-1, i-1) pr^(i-1) (1-pr)^(N-i)
    double c = 1.0;
    for (int k = 1; k <= i - 1; ++k) c = c * (p.N - i + k) / k;
    double v = c;
    for (int k = 0; k < i - 1; ++k) v *= pr;
    for (int k = 0; k < p.N - i; ++k) v *= 1.0 - pr;
    return v;
}

// Position of the tracked batch in the warehouse release queue: with s > 0
// every one of the i committed retailers pulls a batch before the tracked one;
// with s = 0 only the m batches already queued do.
inline int m_prime(int i, int s, int m) {
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    if (i < 1) throw std::out_of_range("state index i out of [1, N]");
    if (s < 0) throw std::invalid_argument("s out of range [0, Q-1]");
    return s > 0 ? m + i : m;
}

namespace detail {

struct DRange {
    int lo = 0;
    int hi = 0;
};

// Demands a retailer of the given class needs for its first order, as an
// integer range with uniform mass.
inline DRange initial_demand_range(ClassLabel label, int s, int Q) {
    if (s > 0) {
        switch (label) {
            case ClassLabel::below: return {1, s};
            case ClassLabel::at: return {s, s};
            case ClassLabel::above: return {s + 1, Q};
        }
    } else {
        switch (label) {
            case ClassLabel::at: return {Q, Q};
            case ClassLabel::above: return {1, Q};
            case ClassLabel::below:
                throw std::invalid_argument("no below class when s = 0");
        }
    }
    throw std::logic_error("unreachable class label");
}

}  // namespace detail

// Test hook: additive perturbation of one cell of the order-count table,
// used by the validation command to prove the oracle comparison can fail.
struct MuPerturbation {
    ClassLabel label = ClassLabel::at;
    bool is_B = false;
    int b = 0;
    int u = 0;
    double delta = 0.0;
};

// Probability that a retailer of the given class places exactly b orders while
// absorbing l = b*Q + u of the system's demands. For the pulling retailer B
// the joint event "b orders and final position R+1+u" is returned instead, so
// the mass over b alone is a sub-probability.
inline double mu_prob(RetailerClass cls, int s, int Q, int b, int u,
                      const std::optional<MuPerturbation>& hook = std::nullopt) {
    if (Q < 1) throw std::invalid_argument("Q must be at least 1");
    if (s < 0 || s > Q - 1) throw std::invalid_argument("s out of range [0, Q-1]");
    if (b < 0) throw std::invalid_argument("order count b must be non-negative");
    if (u <= -Q || u >= Q) throw std::invalid_argument("u out of range (-Q, Q)");
    const auto [dlo, dhi] = detail::initial_demand_range(cls.label, s, Q);
    const double width = dhi - dlo + 1;
    double v;
    if (cls.is_B) {
        // B's crossing count is pinned: after b full batches it must stand at
        // R+1+u, which needs initial demand distance u+1.
        v = (u >= 0 && dlo <= u + 1 && u + 1 <= dhi) ? 1.0 / width : 0.0;
    } else if (b == 0 && u < 0) {
        v = 0.0;  // cannot absorb negative demand
    } else {
        const int lo = std::max(dlo, u + 1);
        const int hi = b >= 1 ? std::min(dhi, u + Q) : dhi;
        const int cnt = hi >= lo ? hi - lo + 1 : 0;
        v = cnt / width;
    }
    if (hook && hook->label == cls.label && hook->is_B == cls.is_B &&
        hook->b == b && hook->u == u)
        v += hook->delta;
    return v;
}

// Order-count recursion over the first r retailers: eta(r, l, b) is the
// probability that they place b orders in total while absorbing l demands
// spread uniformly among them, with the pulling retailer's constraint folded
// in once at r = B. Memoized; memoization cannot change results because the
// recursion is evaluated in the same arithmetic order either way.
class EtaEvaluator {
  public:
    EtaEvaluator(const SystemParams& p, int i, int B, int s,
                 std::optional<MuPerturbation> hook = std::nullopt,
                 bool use_memo = true)
        : N_(p.N), Q_(p.Q), s_(s), i_(i), B_(B), hook_(std::move(hook)),
          use_memo_(use_memo) {
        validate(p);
        if (i < 1 || i > N_) throw std::out_of_range("state index i out of [1, N]");
        if (B < 1 || B > N_) throw std::out_of_range("pulling retailer B out of [1, N]");
        if (s < 0 || s > Q_ - 1) throw std::invalid_argument("s out of range [0, Q-1]");
    }

    RetailerClass class_of(int r) const {
        RetailerClass c;
        c.is_B = (r == B_);
        if (s_ == 0)
            c.label = r == 1 ? ClassLabel::at : ClassLabel::above;
        else
            c.label = r < i_ ? ClassLabel::below
                             : (r == i_ ? ClassLabel::at : ClassLabel::above);
        return c;
    }

    double mu(int r, int l, int b) const {
        const int u = l - b * Q_;
        if (u <= -Q_ || u >= Q_ || b < 0) return 0.0;
        return mu_prob(class_of(r), s_, Q_, b, u, hook_);
    }

    double eta(int r, int l, int b) {
        if (r < 1 || r > N_) throw std::out_of_range("retailer count r out of [1, N]");
        if (l < 0 || b < 0) return 0.0;
        if (use_memo_) {
            const Key key{r, l, b};
            auto it = memo_.find(pack(key));
            if (it != memo_.end()) return it->second;
            const double v = compute(r, l, b);
            memo_.emplace(pack(key), v);
            return v;
        }
        return compute(r, l, b);
    }

  private:
    struct Key {
        int r, l, b;
    };
    static std::uint64_t pack(const Key& k) {
        return (static_cast<std::uint64_t>(k.r) << 48) |
               (static_cast<std::uint64_t>(k.l) << 24) |
               static_cast<std::uint64_t>(k.b);
    }

    double compute(int r, int l, int b) {
        if (r == 1) return mu(1, l, b);
        // split l demands binomially between retailer r (share 1/r) and the rest
        double total = 0.0;
        double w = 1.0;  // Pr(lr = 0) = ((r-1)/r)^l
        for (int k = 0; k < l; ++k) w *= static_cast<double>(r - 1) / r;
        for (int lr = 0; lr <= l; ++lr) {
            if (w > 0.0) {
                double inner = 0.0;
                for (int bp = 0; bp <= b; ++bp) {
                    const double mv = mu(r, lr, bp);
                    if (mv != 0.0) inner += mv * eta(r - 1, l - lr, b - bp);
                }
                total += w * inner;
            }
            // advance binomial pmf: lr successes at rate 1/r
            w *= static_cast<double>(l - lr) / ((lr + 1) * (r - 1.0));
        }
        return total;
    }

    int N_, Q_, s_, i_, B_;
    std::optional<MuPerturbation> hook_;
    bool use_memo_;
    std::unordered_map<std::uint64_t, double> memo_;
};

// Stand-alone query form of the recursion.
inline double eta_prob(int r, int l, int b, int i, int B, int s,
                       const SystemParams& p) {
    EtaEvaluator ev(p, i, B, s);
    return ev.eta(r, l, b);
}

// How many retailers a pulling class represents: i-1 interchangeable choices
// below the trigger, the trigger itself, N-i above.
inline int f_count(int i, int B, int N) {
    if (i < 1 || i > N) throw std::out_of_range("state index i out of [1, N]");
    if (B < i - 1 || B > i + 1)
        throw std::out_of_range("pulling class B out of {i-1, i, i+1}");
    if (B < i) return i - 1;
    if (B == i) return 1;
    return N - i;
}

struct TriggerEntry {
    ClassLabel b_class = ClassLabel::at;
    int k = 0;  // system demands from supplier order to batch pull, inclusive
    double prob = 0.0;
};

struct TriggerDistribution {
    int state = 1;    // i
    int m_prime = 0;  // batches released before the tracked one
    std::vector<TriggerEntry> entries;

    double total_mass() const {
        double m = 0.0;
        for (const auto& e : entries) m += e.prob;
        return m;
    }
};

// Joint law of (pulling class, demand count k) for the batch ordered when the
// system enters state i. Mass sums to 1 for every state.
inline TriggerDistribution trigger_distribution(
    int i, const Policy& pol, const SystemParams& p,
    const std::optional<MuPerturbation>& hook = std::nullopt) {
    validate(p, pol);
    if (i < 1 || i > p.N) throw std::out_of_range("state index i out of [1, N]");
    TriggerDistribution out;
    out.state = i;
    out.m_prime = m_prime(i, pol.s, pol.m);
    if (out.m_prime == 0) {
        // the supplier order and the pulling retailer order coincide
        out.entries.push_back({ClassLabel::at, 0, 1.0});
        return out;
    }
    const DemandBounds bounds = demand_bounds(i, pol, p);
    const int k_lo = std::max(bounds.lb, 1);
    // pulling-retailer representatives with their multiplicities: with an
    // order-ahead band the puller sits in class i-1, i or i+1; without one
    // (s = 0) the committed-state index carries no information and the puller
    // is either the trigger retailer or any of the other N-1
    std::vector<std::pair<int, int>> pullers;
    if (pol.s == 0) {
        pullers.emplace_back(1, 1);
        if (p.N > 1) pullers.emplace_back(2, p.N - 1);
    } else {
        for (int B = i - 1; B <= i + 1; ++B) {
            if (B < 1 || B > p.N) continue;
            const int fc = f_count(i, B, p.N);
            if (fc == 0) continue;
            pullers.emplace_back(B, fc);
        }
    }
    for (const auto& [B, fc] : pullers) {
        EtaEvaluator ev(p, i, B, pol.s, hook);
        const ClassLabel lab = ev.class_of(B).label;
        for (int k = k_lo; k <= bounds.ub; ++k) {
            const double pr =
                static_cast<double>(fc) / p.N * ev.eta(p.N, k - 1, out.m_prime - 1);
            out.entries.push_back({lab, k, pr});
        }
    }
    return out;
}

}  // namespace echelon
