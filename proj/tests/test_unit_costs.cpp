#include <cmath>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "echelon/unit_costs.hpp"
#include "support/oracles.hpp"

using namespace echelon;

namespace {

SystemParams make_params(int N, double lambda, double L, double L0, double h,
                         double h0, double beta) {
    SystemParams p;
    p.N = N;
    p.lambda = lambda;
    p.L = L;
    p.L0 = L0;
    p.h = h;
    p.h0 = h0;
    p.beta = beta;
    p.Q = 2;  // unit costs never read Q
    return p;
}

// Erlang(S, rate) pdf, used only inside quadrature oracles.
double erlang_pdf(int S, double t, double rate) {
    if (t <= 0.0) return 0.0;
    return std::exp(S * std::log(rate) + (S - 1) * std::log(t) - rate * t -
                    std::lgamma(static_cast<double>(S)));
}

// E[pi^Si((L0 - T_S0)^+)] by Gauss-Legendre on [0, L0] plus the no-delay tail,
// the defining expectation that the table recursion must reproduce.
double pi_table_quadrature(int Si, int S0, const SystemParams& p) {
    const double lam0 = p.lambda0();
    std::vector<double> x, w;
    testsupport::gauss_legendre(96, 0.0, p.L0, x, w);
    double acc = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q)
        acc += w[q] * detail::pi_retailer_raw(Si, p.L0 - x[q], p) *
               erlang_pdf(S0, x[q], lam0);
    const double tail = 1.0 - testsupport::erlang_cdf_gamma(S0, p.L0, lam0);
    return acc + tail * detail::pi_retailer_raw(Si, 0.0, p);
}

// E[(T_S - a)^+] by quadrature over the Erlang density.
double excess_quadrature(int S, double a, double rate) {
    const double cut = a + (S + 60.0) / rate;
    std::vector<double> x, w;
    testsupport::gauss_legendre(128, a, cut, x, w);
    double acc = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q)
        acc += w[q] * (x[q] - a) * erlang_pdf(S, x[q], rate);
    return acc;
}

}  // namespace

TEST_CASE("erlang cdf agrees with the incomplete-gamma route", "[unit_costs]") {
    for (double rate : {0.5, 2.0, 7.3}) {
        for (double t : {0.1, 1.0, 2.5}) {
            for (int S = 1; S <= 40; ++S) {
                const double lib = erlang_cdf(S, t, rate);
                const double ref = testsupport::gamma_p(S, rate * t);
                REQUIRE(lib == Catch::Approx(ref).margin(1e-12));
            }
        }
    }
    REQUIRE(erlang_cdf(0, 3.0, 1.0) == 1.0);
    REQUIRE(erlang_cdf(4, 0.0, 1.0) == 0.0);
}

TEST_CASE("erlang cdf input validation", "[unit_costs]") {
    REQUIRE_THROWS_AS(erlang_cdf(-1, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(erlang_cdf(2, -0.5, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(erlang_cdf(2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("warehouse unit holding cost spot value", "[unit_costs]") {
    // one demand outstanding, lambda0 = 2, L0 = 1: h0 E[(T_1 - 1)^+]
    // = h0 e^{-2} / 2
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    REQUIRE(gamma_warehouse(1, p) ==
            Catch::Approx(std::exp(-2.0) / 2.0).margin(1e-15));
    REQUIRE(gamma_warehouse(0, p) == 0.0);
    REQUIRE(gamma_warehouse(-3, p) == 0.0);
}

TEST_CASE("warehouse unit holding cost dual forms agree", "[unit_costs]") {
    // series accumulation vs complementary-cdf identity, disjoint arithmetic
    for (auto [N, lambda, L0] : {std::tuple{2, 0.5, 0.5}, {4, 1.0, 1.0},
                                 {5, 2.0, 2.0}}) {
        const SystemParams p = make_params(N, lambda, 1.0, L0, 1.0, 2.3, 5.0);
        for (int S0 = 1; S0 <= 200; ++S0) {
            const double a = gamma_warehouse(S0, p);
            const double b = gamma_warehouse_ccdf(S0, p);
            REQUIRE(std::abs(a - b) / std::max(1.0, std::abs(a)) < 1e-12);
        }
    }
}

TEST_CASE("warehouse unit holding cost vs Monte Carlo", "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.7, 5.0);
    for (int S0 : {1, 3, 8}) {
        const auto mc = testsupport::mc_warehouse_excess(
            S0, 400000, p.lambda0(), p.L0, 0x9e3779b97f4a7c15ULL + S0);
        const double lib = gamma_warehouse(S0, p) / p.h0;
        REQUIRE(std::abs(lib - mc.mean) <= 4.0 * mc.std_error);
    }
}

TEST_CASE("retailer unit cost spot values", "[unit_costs]") {
    // zero lead time, zero delay: the unit waits exactly one demand,
    // cost h E[T_1] - beta (E[T_1] - 0) ... = h / lambda
    const SystemParams p0 = make_params(2, 1.0, 0.0, 1.0, 1.0, 1.0, 5.0);
    REQUIRE(pi_retailer(1, 0.0, p0) == Catch::Approx(1.0).margin(1e-14));

    // L = 1, h = 1, beta = 2, lambda = 1: (h+beta) E[(T_1-1)^+] + beta(1-1)
    // = 3 e^{-1}
    const SystemParams p1 = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0);
    REQUIRE(pi_retailer(1, 0.0, p1) ==
            Catch::Approx(3.0 * std::exp(-1.0)).margin(1e-14));
}

TEST_CASE("retailer unit cost vs quadrature of the excess expectation",
          "[unit_costs]") {
    const SystemParams p = make_params(3, 0.8, 1.2, 1.0, 1.1, 1.0, 4.0);
    for (int S = 1; S <= 6; ++S) {
        for (double t : {0.0, 0.3, 2.0}) {
            const double a = p.L + t;
            const double ref = (p.h + p.beta) * excess_quadrature(S, a, p.lambda) +
                               p.beta * (a - S / p.lambda);
            const double lib = pi_retailer(S, t, p);
            REQUIRE(std::abs(lib - ref) / std::max(1.0, std::abs(ref)) < 1e-9);
        }
    }
}

TEST_CASE("retailer unit cost input validation", "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    REQUIRE_THROWS_AS(pi_retailer(0, 0.0, p), std::invalid_argument);
    REQUIRE_THROWS_AS(pi_retailer(1, -0.1, p), std::invalid_argument);
}

TEST_CASE("unit cost table matches direct quadrature of the delay expectation",
          "[unit_costs]") {
    const SystemParams sets[] = {
        make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0),
        make_params(3, 0.7, 0.4, 2.0, 2.0, 1.0, 9.0),
        make_params(4, 1.3, 2.0, 0.6, 0.5, 1.0, 3.0),
    };
    for (const SystemParams& p : sets) {
        UnitCostTable tbl(p, 8, 0, 1e-10);
        for (int Si = 1; Si <= 8; ++Si) {
            for (int S0 = 1; S0 <= std::min(tbl.s0_bar() - 1, 11); ++S0) {
                const double ref = pi_table_quadrature(Si, S0, p);
                const double lib = tbl.Pi(Si, S0);
                REQUIRE(std::abs(lib - ref) / std::max(1.0, std::abs(ref)) <
                        1e-9);
            }
        }
    }
}

TEST_CASE("unit cost table column zero is the deterministic-delay cost",
          "[unit_costs]") {
    // S0 = 0: the batch is free to leave the moment the supplier order is
    // placed, so the delay is exactly L0
    const SystemParams p = make_params(3, 0.7, 0.4, 2.0, 2.0, 1.0, 9.0);
    UnitCostTable tbl(p, 8, 0, 1e-10);
    for (int Si = 1; Si <= 8; ++Si) {
        const double direct = pi_retailer(Si, p.L0, p);
        REQUIRE(std::abs(tbl.Pi(Si, 0) - direct) /
                    std::max(1.0, std::abs(direct)) <
                1e-10);
    }
}

TEST_CASE("unit cost table is pinned beyond the convergence column",
          "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    UnitCostTable tbl(p, 5, 0, 1e-10);
    REQUIRE(tbl.s0_bar() >= 1);
    REQUIRE(erlang_cdf(tbl.s0_bar(), p.L0, p.lambda0()) < tbl.epsilon());
    for (int Si = 1; Si <= 5; ++Si) {
        REQUIRE(tbl.Pi(Si, tbl.s0_bar()) == tbl.pi_at_zero(Si));
        REQUIRE(tbl.Pi(Si, tbl.s0_bar() + 7) == tbl.pi_at_zero(Si));
        REQUIRE(tbl.pi_at_zero(Si) == pi_retailer(Si, 0.0, p));
    }
}

TEST_CASE("unit cost table closed forms for backordered units", "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    UnitCostTable tbl(p, 4, -3, 1e-10);

    // S0 = 0: wait is L + L0 plus the time the demand has already been open
    for (int Si : {0, -1, -3}) {
        const double expect = p.beta * (p.L + p.L0 - Si / p.lambda);
        REQUIRE(tbl.Pi(Si, 0) == Catch::Approx(expect).margin(1e-12));
    }

    // S0 > 0: only the shortage clock runs; E[(L0 - T_S0)^+] by quadrature
    for (int Si : {0, -2}) {
        for (int S0 : {1, 4}) {
            std::vector<double> x, w;
            testsupport::gauss_legendre(96, 0.0, p.L0, x, w);
            double mean_delay = 0.0;
            for (std::size_t q = 0; q < x.size(); ++q)
                mean_delay +=
                    w[q] * (p.L0 - x[q]) * erlang_pdf(S0, x[q], p.lambda0());
            const double expect =
                p.beta * (mean_delay + p.L - Si / p.lambda);
            REQUIRE(tbl.Pi(Si, S0) == Catch::Approx(expect).margin(1e-10));
        }
    }
}

TEST_CASE("unit cost table vs tagged-unit Monte Carlo", "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    UnitCostTable tbl(p, 6, 0, 1e-10);
    const std::pair<int, int> probes[] = {{1, 1}, {3, 2}, {5, 6}};
    for (auto [Si, S0] : probes) {
        const auto mc = testsupport::mc_unit_retailer_cost(
            Si, S0, 600000, p.lambda, p.lambda0(), p.L, p.L0, p.h, p.beta,
            0xc0ffee123ULL + 97 * Si + S0);
        REQUIRE(std::abs(tbl.Pi(Si, S0) - mc.mean) <= 4.0 * mc.std_error);
    }
}

TEST_CASE("halving the convergence tolerance leaves the table unchanged",
          "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    UnitCostTable coarse(p, 6, 0, 1e-10);
    UnitCostTable fine(p, 6, 0, 5e-11);
    for (int Si = 1; Si <= 6; ++Si)
        for (int S0 = 0; S0 <= coarse.s0_bar(); ++S0)
            REQUIRE(std::abs(coarse.Pi(Si, S0) - fine.Pi(Si, S0)) < 1e-8);
}

TEST_CASE("unit cost table input validation", "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0);
    REQUIRE_THROWS_AS(UnitCostTable(p, 4, 0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(UnitCostTable(p, 4, 0, 1.0), std::invalid_argument);
    UnitCostTable tbl(p, 4, 0, 1e-10);
    REQUIRE_THROWS_AS(tbl.Pi(5, 1), std::out_of_range);
    REQUIRE_THROWS_AS(tbl.Pi(2, -1), std::out_of_range);
    REQUIRE_THROWS_AS(tbl.pi_at_zero(-1), std::out_of_range);
    REQUIRE_THROWS_AS(tbl.pi_at_zero(5), std::out_of_range);
}

TEST_CASE("one-off query matches the full table", "[unit_costs]") {
    const SystemParams p = make_params(3, 0.7, 0.4, 2.0, 2.0, 1.0, 9.0);
    UnitCostTable tbl(p, 8, 0, 1e-10);
    REQUIRE(Pi_retailer(3, 2, p) == tbl.Pi(3, 2));
    REQUIRE(Pi_retailer(-1, 2, p) == tbl.Pi(-1, 2));
}

TEST_CASE("zero warehouse lead time removes the delay", "[unit_costs]") {
    const SystemParams p = make_params(2, 1.0, 1.0, 0.0, 1.0, 1.0, 5.0);
    UnitCostTable tbl(p, 4, 0, 1e-10);
    for (int Si = 1; Si <= 4; ++Si)
        for (int S0 = 0; S0 <= tbl.s0_bar(); ++S0)
            REQUIRE(tbl.Pi(Si, S0) ==
                    Catch::Approx(pi_retailer(Si, 0.0, p)).margin(1e-12));
    REQUIRE(gamma_warehouse(5, p) == Catch::Approx(5.0 / p.lambda0() * p.h0)
                                         .margin(1e-12));
}
