#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "echelon/core.hpp"

namespace echelon {

struct SimConfig {
    double horizon = 5000.0;      // per-replication simulated time
    double warmup = 500.0;        // accrual starts here
    int replications = 20;
    std::uint64_t seed = 1;
    double sample_interval = 0.0;  // inventory-position samples; 0 -> 3Q/lambda
    int threads = 1;
};

struct ReplicationAudit {
    long long demands = 0;
    long long satisfied = 0;        // units handed to customers
    long long units_received = 0;   // units arriving at retailers
    long long warehouse_orders = 0;
    long long on_hand_start = 0;
    long long on_hand_end = 0;
    double cost_rate = 0.0;
    double warehouse_rate = 0.0;
    double retailer_rate = 0.0;
};

struct SimulationResult {
    double mean_cost_rate = 0.0;
    double std_error = 0.0;
    int replications = 0;
    double horizon = 0.0;
    double warmup = 0.0;
    CostBreakdown breakdown;  // means of the per-replication component rates
    // counts of inventory position = R+1+offset, pooled over sample epochs
    std::vector<std::vector<long long>> inventory_histograms;  // [retailer][offset]
    std::vector<ReplicationAudit> audits;
};

namespace detail {

// splitmix64: decorrelates per-replication streams from a single master seed.
// The stream index is scaled by the golden-ratio increment before mixing so
// that (seed, rep) and (seed + 1, rep - 1) never share a stream.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t x = master + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct SimEvent {
    double time;
    int kind;  // 0 warehouse receipt, 1 retailer receipt (receipts precede demands)
    long long seq;
    int retailer;
};

struct SimEventLater {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.seq > b.seq;
    }
};

inline ReplicationAudit run_replication(const Policy& pol, const SystemParams& p,
                                        const SimConfig& cfg, std::uint64_t seed,
                                        std::vector<std::vector<long long>>& hist) {
    const int N = p.N, Q = p.Q;
    std::mt19937_64 rng(seed);
    const auto runif = [&rng]() {
        // top 53 bits -> (0, 1]; never 0, so the log below is finite
        return ((rng() >> 11) + 1.0) * 0x1.0p-53;
    };
    const double rate = p.lambda0();
    const auto next_gap = [&]() { return -std::log(runif()) / rate; };
    const auto pick_retailer = [&]() {
        return static_cast<int>(rng() % static_cast<std::uint64_t>(N));
    };

    std::vector<long long> ip(N, pol.R + Q);
    std::vector<long long> oh(N, std::max<long long>(pol.R + Q, 0));
    std::vector<long long> bo(N, std::max<long long>(-(pol.R + Q), 0));
    long long wh = static_cast<long long>(pol.m) * Q;
    long long oh_sum = 0, bo_sum = 0;
    for (int r = 0; r < N; ++r) oh_sum += oh[r], bo_sum += bo[r];

    std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventLater> events;
    std::deque<int> fifo;  // retailers whose batches await warehouse stock
    long long seq = 0;

    ReplicationAudit audit;
    audit.on_hand_start = oh_sum;
    double acc_wh = 0.0, acc_oh = 0.0, acc_bo = 0.0;
    double t = 0.0;
    double next_demand = next_gap();
    const double dt_sample =
        cfg.sample_interval > 0.0 ? cfg.sample_interval : 3.0 * Q / p.lambda;
    double next_sample = cfg.warmup + dt_sample;

    const auto accrue_to = [&](double upto) {
        const double a = std::max(t, cfg.warmup);
        const double b = std::min(upto, cfg.horizon);
        if (b > a) {
            const double dt = b - a;
            acc_wh += dt * static_cast<double>(wh);
            acc_oh += dt * static_cast<double>(oh_sum);
            acc_bo += dt * static_cast<double>(bo_sum);
        }
        while (next_sample <= upto && next_sample <= cfg.horizon) {
            for (int r = 0; r < N; ++r) {
                const long long off = ip[r] - (pol.R + 1);
                ++hist[static_cast<std::size_t>(r)][static_cast<std::size_t>(off)];
            }
            next_sample += dt_sample;
        }
    };

    const auto try_ship = [&](double now) {
        while (!fifo.empty() && wh >= Q) {
            const int r = fifo.front();
            fifo.pop_front();
            wh -= Q;
            events.push({now + p.L, 1, ++seq, r});
        }
    };

    while (true) {
        const double t_event =
            events.empty() ? std::numeric_limits<double>::infinity()
                           : events.top().time;
        const double t_next = std::min(t_event, next_demand);
        if (t_next >= cfg.horizon) {
            accrue_to(cfg.horizon);
            break;
        }
        accrue_to(t_next);
        if (t_event <= next_demand) {
            const SimEvent ev = events.top();
            events.pop();
            t = ev.time;
            if (ev.kind == 0) {
                wh += Q;
                try_ship(t);
            } else {
                const int r = ev.retailer;
                oh[r] += Q;
                oh_sum += Q;
                audit.units_received += Q;
                const long long take = std::min(oh[r], bo[r]);
                oh[r] -= take;
                bo[r] -= take;
                oh_sum -= take;
                bo_sum -= take;
                audit.satisfied += take;
            }
        } else {
            t = next_demand;
            next_demand = t + next_gap();
            const int r = pick_retailer();
            ++audit.demands;
            --ip[r];
            if (oh[r] > 0) {
                --oh[r];
                --oh_sum;
                ++audit.satisfied;
            } else {
                ++bo[r];
                ++bo_sum;
            }
            if (ip[r] == pol.R + pol.s) {
                // warehouse releases a supplier order the moment any retailer
                // position falls to R+s (with s = 0 this precedes the
                // retailer's own order below)
                events.push({t + p.L0, 0, ++seq, -1});
                ++audit.warehouse_orders;
            }
            if (ip[r] == pol.R) {
                ip[r] += Q;
                fifo.push_back(r);
                try_ship(t);
            }
        }
    }
    const double span = cfg.horizon - cfg.warmup;
    audit.warehouse_rate = p.h0 * acc_wh / span;
    audit.retailer_rate = (p.h * acc_oh + p.beta * acc_bo) / span;
    audit.cost_rate = audit.warehouse_rate + audit.retailer_rate;
    audit.on_hand_end = oh_sum;
    return audit;
}

}  // namespace detail

// Discrete-event reference model. Demands form a superposed Poisson stream
// assigned uniformly; costs accrue continuously from warmup to horizon;
// receipts are processed before demands at equal timestamps. Replications are
// seeded independently from cfg.seed, so results do not depend on thread
// count or execution order.
inline SimulationResult simulate(const Policy& pol, const SystemParams& p,
                                 const SimConfig& cfg) {
    validate(p, pol);
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (cfg.warmup < 0.0 || cfg.warmup >= cfg.horizon)
        throw std::invalid_argument("warmup out of range [0, horizon)");
    if (cfg.replications < 1)
        throw std::invalid_argument("replications must be at least 1");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");

    SimulationResult res;
    res.replications = cfg.replications;
    res.horizon = cfg.horizon;
    res.warmup = cfg.warmup;
    res.inventory_histograms.assign(
        static_cast<std::size_t>(p.N),
        std::vector<long long>(static_cast<std::size_t>(p.Q), 0));
    res.audits.resize(static_cast<std::size_t>(cfg.replications));

    std::vector<std::vector<std::vector<long long>>> hists(
        static_cast<std::size_t>(cfg.replications), res.inventory_histograms);

    const auto run_one = [&](int rep) {
        const std::uint64_t seed =
            detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(rep));
        res.audits[static_cast<std::size_t>(rep)] = detail::run_replication(
            pol, p, cfg, seed, hists[static_cast<std::size_t>(rep)]);
    };

    if (cfg.threads <= 1) {
        for (int rep = 0; rep < cfg.replications; ++rep) run_one(rep);
    } else {
        int rep = 0;
        while (rep < cfg.replications) {
            std::vector<std::future<void>> batch;
            for (int j = 0; j < cfg.threads && rep < cfg.replications; ++j, ++rep)
                batch.push_back(std::async(std::launch::async, run_one, rep));
            for (auto& f : batch) f.get();
        }
    }

    // reduce in replication order for determinism
    double mean = 0.0, mean_wh = 0.0, mean_ret = 0.0;
    for (const auto& a : res.audits) {
        mean += a.cost_rate;
        mean_wh += a.warehouse_rate;
        mean_ret += a.retailer_rate;
    }
    mean /= cfg.replications;
    mean_wh /= cfg.replications;
    mean_ret /= cfg.replications;
    double ss = 0.0;
    for (const auto& a : res.audits) {
        const double d = a.cost_rate - mean;
        ss += d * d;
    }
    res.mean_cost_rate = mean;
    res.std_error = cfg.replications >= 2
                        ? std::sqrt(ss / (cfg.replications - 1) / cfg.replications)
                        : 0.0;
    res.breakdown.warehouse_holding = mean_wh;
    res.breakdown.retailer_holding_shortage = mean_ret;
    res.breakdown.total = mean_wh + mean_ret;
    for (int rep = 0; rep < cfg.replications; ++rep)
        for (int r = 0; r < p.N; ++r)
            for (int q = 0; q < p.Q; ++q)
                res.inventory_histograms[static_cast<std::size_t>(r)]
                                        [static_cast<std::size_t>(q)] +=
                    hists[static_cast<std::size_t>(rep)][static_cast<std::size_t>(r)]
                         [static_cast<std::size_t>(q)];
    return res;
}

}  // namespace echelon
