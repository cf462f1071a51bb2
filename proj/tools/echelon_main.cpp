// Command-line front end: evaluate / simulate / validate / optimize / sweep.
// Exit codes: 0 success, 1 validation-suite failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "echelon/echelon.hpp"

namespace {

using echelon::RunConfig;
using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// bit-exact grid header (documented in README)
constexpr const char* k_grid_header =
    "m,R,s,tc_total,tc_warehouse,tc_retailer,mass_residual_max";

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string format;  // empty: take from config
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<int> replications;
    std::optional<double> horizon;
    std::optional<int> threads;
    bool corrupt_mu = false;
    bool sim_check = false;
};

RunConfig load_config(const CliOptions& opt) {
    if (opt.config_path.empty())
        throw std::invalid_argument("--config PATH is required");
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot open config file '" + opt.config_path + "'");
    RunConfig c = echelon::parse_config(in);
    if (opt.seed) c.sim.seed = *opt.seed;
    if (opt.epsilon) c.epsilon = *opt.epsilon;
    if (opt.replications) c.sim.replications = *opt.replications;
    if (opt.horizon) c.sim.horizon = *opt.horizon;
    if (opt.threads) c.threads = *opt.threads;
    if (!opt.format.empty()) {
        if (opt.format != "table" && opt.format != "csv" && opt.format != "structured")
            throw std::invalid_argument("unknown format '" + opt.format + "'");
        c.format = opt.format;
    }
    return c;
}

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["params"] = {{"N", c.params.N},       {"lambda", c.params.lambda},
                   {"L", c.params.L},       {"L0", c.params.L0},
                   {"h", c.params.h},       {"h0", c.params.h0},
                   {"beta", c.params.beta}, {"Q", c.params.Q}};
    if (c.policy)
        j["policy"] = {{"m", c.policy->m}, {"R", c.policy->R}, {"s", c.policy->s}};
    if (c.search)
        j["search"] = {{"m_min", c.search->m_min}, {"m_max", c.search->m_max},
                       {"R_min", c.search->R_min}, {"R_max", c.search->R_max},
                       {"s_min", c.search->s_min}, {"s_max", c.search->s_max},
                       {"budget", c.search->budget}, {"pruned", c.search->pruned}};
    j["sim"] = {{"horizon", c.sim.horizon},
                {"warmup", c.sim.warmup},
                {"replications", c.sim.replications},
                {"seed", c.sim.seed},
                {"sample_interval", c.sim.sample_interval}};
    j["cost"] = {{"epsilon", c.epsilon}};
    j["output"] = {{"format", c.format}};
    j["run"] = {{"threads", c.threads}};
    if (c.sweep) {
        j["sweep"] = {{"param", c.sweep->param}, {"values", c.sweep->values}};
    }
    return j;
}

ordered_json wrap_structured(const std::string& command, const RunConfig& c,
                             ordered_json results) {
    ordered_json j;
    j["tool"] = "echelon";
    j["version"] = echelon::k_version;
    j["command"] = command;
    j["config"] = config_json(c);
    j["results"] = std::move(results);
    return j;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write output file '" + out_path + "'");
    out << text;
}

std::string grid_row(const echelon::Policy& pol, const echelon::CostBreakdown& b,
                     double residual) {
    std::ostringstream os;
    os << pol.m << "," << pol.R << "," << pol.s << "," << fmt17(b.total) << ","
       << fmt17(b.warehouse_holding) << "," << fmt17(b.retailer_holding_shortage)
       << "," << fmt17(residual);
    return os.str();
}

// ---- evaluate ----

int cmd_evaluate(const CliOptions& opt) {
    const RunConfig c = load_config(opt);
    if (!c.policy) throw std::invalid_argument("config must contain a policy section");
    const echelon::EvaluationReport rep =
        echelon::total_cost(*c.policy, c.params, c.epsilon);
    std::string text;
    if (c.format == "csv") {
        std::ostringstream os;
        os << k_grid_header << "\n"
           << grid_row(rep.policy, rep.breakdown, rep.mass_residual_max) << "\n";
        text = os.str();
    } else if (c.format == "structured") {
        ordered_json r;
        r["policy"] = {{"m", rep.policy.m}, {"R", rep.policy.R}, {"s", rep.policy.s}};
        r["tc_total"] = rep.breakdown.total;
        r["tc_warehouse"] = rep.breakdown.warehouse_holding;
        r["tc_retailer"] = rep.breakdown.retailer_holding_shortage;
        r["mass_residual_max"] = rep.mass_residual_max;
        ordered_json st = ordered_json::array();
        for (const auto& s : rep.per_state)
            st.push_back({{"state", s.state},
                          {"probability", s.state_prob},
                          {"conditional_unit_cost", s.conditional_unit_cost},
                          {"mass_residual", s.mass_residual}});
        r["per_state"] = std::move(st);
        text = wrap_structured("evaluate", c, std::move(r)).dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "policy              m=" << rep.policy.m << " R=" << rep.policy.R
           << " s=" << rep.policy.s << "\n";
        os << "total cost rate     " << fmt17(rep.breakdown.total) << "\n";
        os << "  warehouse         " << fmt17(rep.breakdown.warehouse_holding) << "\n";
        os << "  retailers         " << fmt17(rep.breakdown.retailer_holding_shortage)
           << "\n";
        os << "mass residual max   " << fmt17(rep.mass_residual_max) << "\n";
        for (const auto& s : rep.per_state)
            os << "  state " << s.state << "  p=" << fmt17(s.state_prob)
               << "  unit_cost=" << fmt17(s.conditional_unit_cost)
               << "  residual=" << fmt17(s.mass_residual) << "\n";
        text = os.str();
    }
    emit(text, opt.out_path);
    return 0;
}

// ---- simulate ----

int cmd_simulate(const CliOptions& opt) {
    RunConfig c = load_config(opt);
    if (!c.policy) throw std::invalid_argument("config must contain a policy section");
    echelon::SimConfig sc = c.sim;
    sc.threads = c.threads;
    const echelon::SimulationResult res =
        echelon::simulate(*c.policy, c.params, sc);
    long long demands = 0, satisfied = 0, received = 0, wh_orders = 0;
    for (const auto& a : res.audits) {
        demands += a.demands;
        satisfied += a.satisfied;
        received += a.units_received;
        wh_orders += a.warehouse_orders;
    }
    std::string text;
    if (c.format == "csv") {
        std::ostringstream os;
        os << "mean_cost_rate,std_error,replications,horizon,warmup,tc_warehouse,"
              "tc_retailer\n";
        os << fmt17(res.mean_cost_rate) << "," << fmt17(res.std_error) << ","
           << res.replications << "," << fmt17(res.horizon) << ","
           << fmt17(res.warmup) << "," << fmt17(res.breakdown.warehouse_holding)
           << "," << fmt17(res.breakdown.retailer_holding_shortage) << "\n";
        text = os.str();
    } else if (c.format == "structured") {
        ordered_json r;
        r["mean_cost_rate"] = res.mean_cost_rate;
        r["std_error"] = res.std_error;
        r["replications"] = res.replications;
        r["horizon"] = res.horizon;
        r["warmup"] = res.warmup;
        r["tc_warehouse"] = res.breakdown.warehouse_holding;
        r["tc_retailer"] = res.breakdown.retailer_holding_shortage;
        r["inventory_position_histograms"] = res.inventory_histograms;
        r["totals"] = {{"demands", demands},
                       {"satisfied", satisfied},
                       {"units_received", received},
                       {"warehouse_orders", wh_orders}};
        text = wrap_structured("simulate", c, std::move(r)).dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "mean cost rate      " << fmt17(res.mean_cost_rate) << " +/- "
           << fmt17(res.std_error) << "\n";
        os << "  warehouse         " << fmt17(res.breakdown.warehouse_holding) << "\n";
        os << "  retailers         " << fmt17(res.breakdown.retailer_holding_shortage)
           << "\n";
        os << "replications        " << res.replications << "  horizon "
           << fmt17(res.horizon) << "  warmup " << fmt17(res.warmup) << "\n";
        os << "demands             " << demands << "  satisfied " << satisfied
           << "  received " << received << "  warehouse orders " << wh_orders << "\n";
        for (std::size_t r = 0; r < res.inventory_histograms.size(); ++r) {
            os << "ip histogram r" << (r + 1) << "     ";
            for (std::size_t q = 0; q < res.inventory_histograms[r].size(); ++q)
                os << (q ? "," : "") << res.inventory_histograms[r][q];
            os << "\n";
        }
        text = os.str();
    }
    emit(text, opt.out_path);
    return 0;
}

// ---- validate ----

int cmd_validate(const CliOptions& opt) {
    const RunConfig c = load_config(opt);
    if (!c.policy) throw std::invalid_argument("config must contain a policy section");
    echelon::ValidationOptions vo;
    vo.epsilon = c.epsilon;
    vo.sim_check = opt.sim_check;
    vo.sim = c.sim;
    vo.sim.threads = c.threads;
    if (opt.corrupt_mu) {
        // poison one live cell of the order-count table; the enumeration
        // comparison must then fail, proving the harness can reject
        echelon::MuPerturbation mp;
        mp.label = echelon::ClassLabel::above;
        mp.is_B = false;
        mp.b = 0;
        mp.u = 0;
        mp.delta = 0.01;
        vo.corrupt_mu = mp;
    }
    const echelon::ValidationReport rep = echelon::run_validation(*c.policy, c.params, vo);
    std::string text;
    if (c.format == "csv") {
        std::ostringstream os;
        os << "check,passed,observed,threshold\n";
        for (const auto& ch : rep.checks)
            os << '"' << ch.name << "\"," << (ch.passed ? 1 : 0) << ","
               << fmt17(ch.observed) << "," << fmt17(ch.threshold) << "\n";
        text = os.str();
    } else if (c.format == "structured") {
        ordered_json r;
        ordered_json arr = ordered_json::array();
        for (const auto& ch : rep.checks)
            arr.push_back({{"name", ch.name},
                           {"passed", ch.passed},
                           {"observed", ch.observed},
                           {"threshold", ch.threshold},
                           {"detail", ch.detail}});
        r["checks"] = std::move(arr);
        r["all_passed"] = rep.all_passed();
        text = wrap_structured("validate", c, std::move(r)).dump(2) + "\n";
    } else {
        std::ostringstream os;
        for (const auto& ch : rep.checks) {
            os << (ch.passed ? "[PASS] " : "[FAIL] ") << ch.name << ": observed "
               << fmt17(ch.observed) << " vs threshold " << fmt17(ch.threshold);
            if (!ch.detail.empty()) os << "  (" << ch.detail << ")";
            os << "\n";
        }
        os << (rep.all_passed() ? "all checks passed\n" : "checks FAILED\n");
        text = os.str();
    }
    emit(text, opt.out_path);
    return rep.all_passed() ? 0 : 1;
}

// ---- optimize / sweep ----

int cmd_optimize(const CliOptions& opt) {
    const RunConfig c = load_config(opt);
    if (!c.search) throw std::invalid_argument("config must contain a search section");
    const echelon::OptimizeResult res =
        echelon::optimize(c.params, *c.search, c.epsilon, c.threads);
    std::string text;
    if (c.format == "csv") {
        std::ostringstream os;
        os << k_grid_header << "\n";
        for (const auto& g : res.grid)
            os << grid_row(g.policy, g.breakdown, g.mass_residual_max) << "\n";
        text = os.str();
    } else if (c.format == "structured") {
        ordered_json r;
        ordered_json rows = ordered_json::array();
        for (const auto& g : res.grid)
            rows.push_back({{"m", g.policy.m},
                            {"R", g.policy.R},
                            {"s", g.policy.s},
                            {"tc_total", g.breakdown.total},
                            {"tc_warehouse", g.breakdown.warehouse_holding},
                            {"tc_retailer", g.breakdown.retailer_holding_shortage},
                            {"mass_residual_max", g.mass_residual_max}});
        r["grid"] = std::move(rows);
        r["best"] = {{"m", res.best.m},
                     {"R", res.best.R},
                     {"s", res.best.s},
                     {"tc_total", res.best_report.breakdown.total},
                     {"tc_warehouse", res.best_report.breakdown.warehouse_holding},
                     {"tc_retailer", res.best_report.breakdown.retailer_holding_shortage}};
        r["evaluations"] = res.evaluations;
        text = wrap_structured("optimize", c, std::move(r)).dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << k_grid_header << "\n";
        for (const auto& g : res.grid)
            os << grid_row(g.policy, g.breakdown, g.mass_residual_max) << "\n";
        os << "argmin m=" << res.best.m << " R=" << res.best.R << " s=" << res.best.s
           << " tc_total=" << fmt17(res.best_report.breakdown.total) << " ("
           << res.evaluations << " evaluations)\n";
        text = os.str();
    }
    emit(text, opt.out_path);
    return 0;
}

int cmd_sweep(const CliOptions& opt) {
    const RunConfig c = load_config(opt);
    if (!c.policy) throw std::invalid_argument("config must contain a policy section");
    if (!c.sweep) throw std::invalid_argument("config must contain a sweep section");
    struct Row {
        int value;
        echelon::EvaluationReport rep;
    };
    std::vector<Row> rows;
    for (const int v : c.sweep->values) {
        echelon::Policy pol = *c.policy;
        if (c.sweep->param == "m") pol.m = v;
        else if (c.sweep->param == "R") pol.R = v;
        else pol.s = v;
        rows.push_back({v, echelon::total_cost(pol, c.params, c.epsilon)});
    }
    std::string text;
    if (c.format == "csv") {
        std::ostringstream os;
        os << "param,value," << k_grid_header << "\n";
        for (const auto& row : rows)
            os << c.sweep->param << "," << row.value << ","
               << grid_row(row.rep.policy, row.rep.breakdown, row.rep.mass_residual_max)
               << "\n";
        text = os.str();
    } else if (c.format == "structured") {
        ordered_json r;
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows)
            arr.push_back({{"param", c.sweep->param},
                           {"value", row.value},
                           {"m", row.rep.policy.m},
                           {"R", row.rep.policy.R},
                           {"s", row.rep.policy.s},
                           {"tc_total", row.rep.breakdown.total},
                           {"tc_warehouse", row.rep.breakdown.warehouse_holding},
                           {"tc_retailer", row.rep.breakdown.retailer_holding_shortage},
                           {"mass_residual_max", row.rep.mass_residual_max}});
        r["rows"] = std::move(arr);
        text = wrap_structured("sweep", c, std::move(r)).dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "param,value," << k_grid_header << "\n";
        for (const auto& row : rows)
            os << c.sweep->param << "," << row.value << ","
               << grid_row(row.rep.policy, row.rep.breakdown, row.rep.mass_residual_max)
               << "\n";
        text = os.str();
    }
    emit(text, opt.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact evaluation, simulation and optimization of a two-echelon "
                 "inventory system with information sharing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("echelon ") + echelon::k_version);

    CliOptions opt;
    const auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "run configuration file");
        sub->add_option("--out", opt.out_path, "write rendered output to this file");
        sub->add_option("--format", opt.format, "table, csv, or structured");
        sub->add_option("--seed", opt.seed, "override sim.seed");
        sub->add_option("--epsilon", opt.epsilon, "override cost.epsilon");
        sub->add_option("--replications", opt.replications, "override sim.replications");
        sub->add_option("--horizon", opt.horizon, "override sim.horizon");
        sub->add_option("--threads", opt.threads, "override run.threads");
    };

    CLI::App* ev = app.add_subcommand("evaluate", "exact long-run average cost of one policy");
    CLI::App* si = app.add_subcommand("simulate", "discrete-event estimate of the same cost");
    CLI::App* va = app.add_subcommand("validate", "analytic pipeline vs exhaustive enumeration");
    CLI::App* op = app.add_subcommand("optimize", "scan a policy box for the cheapest (m, R, s)");
    CLI::App* sw = app.add_subcommand("sweep", "vary one policy parameter over a list");
    for (CLI::App* sub : {ev, si, va, op, sw}) add_common(sub);
    va->add_flag("--corrupt-mu", opt.corrupt_mu,
                 "poison one probability cell; validation must then fail");
    va->add_flag("--sim-check", opt.sim_check, "add the statistical simulation check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (ev->parsed()) return cmd_evaluate(opt);
        if (si->parsed()) return cmd_simulate(opt);
        if (va->parsed()) return cmd_validate(opt);
        if (op->parsed()) return cmd_optimize(opt);
        if (sw->parsed()) return cmd_sweep(opt);
        std::fprintf(stderr, "error: no command given\n");
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
