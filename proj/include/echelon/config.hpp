#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "echelon/core.hpp"
#include "echelon/optimizer.hpp"
#include "echelon/simulation.hpp"

namespace echelon {

struct SweepSpec {
    std::string param;          // one of: m, R, s
    std::vector<int> values;
    bool operator==(const SweepSpec&) const = default;
};

// Flat key-value run description shared by every command. Unset optional
// sections stay absent through a serialize/parse round trip.
struct RunConfig {
    SystemParams params;
    std::optional<Policy> policy;
    std::optional<SearchSpace> search;
    SimConfig sim;
    double epsilon = 1e-10;
    std::string format = "table";  // table | csv | structured
    int threads = 1;
    std::optional<SweepSpec> sweep;

    bool operator==(const RunConfig& o) const {
        const auto pe = [](const SystemParams& a, const SystemParams& b) {
            return a.N == b.N && a.lambda == b.lambda && a.L == b.L &&
                   a.L0 == b.L0 && a.h == b.h && a.h0 == b.h0 &&
                   a.beta == b.beta && a.Q == b.Q;
        };
        const auto pole = [](const std::optional<Policy>& a,
                             const std::optional<Policy>& b) {
            if (a.has_value() != b.has_value()) return false;
            if (!a) return true;
            return a->m == b->m && a->R == b->R && a->s == b->s;
        };
        const auto se = [](const std::optional<SearchSpace>& a,
                           const std::optional<SearchSpace>& b) {
            if (a.has_value() != b.has_value()) return false;
            if (!a) return true;
            return a->m_min == b->m_min && a->m_max == b->m_max &&
                   a->R_min == b->R_min && a->R_max == b->R_max &&
                   a->s_min == b->s_min && a->s_max == b->s_max &&
                   a->budget == b->budget && a->pruned == b->pruned;
        };
        const auto sime = [](const SimConfig& a, const SimConfig& b) {
            return a.horizon == b.horizon && a.warmup == b.warmup &&
                   a.replications == b.replications && a.seed == b.seed &&
                   a.sample_interval == b.sample_interval;
        };
        return pe(params, o.params) && pole(policy, o.policy) &&
               se(search, o.search) && sime(sim, o.sim) &&
               epsilon == o.epsilon && format == o.format &&
               threads == o.threads && sweep == o.sweep;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    return parse_int(key, v) != 0;
}

}  // namespace detail

// Lines of "dotted.key = value"; '#' starts a comment; unknown keys are
// errors so typos surface instead of silently using defaults.
inline RunConfig parse_config(std::istream& in) {
    RunConfig c;
    Policy pol;
    bool has_policy = false;
    SearchSpace sp;
    bool has_search = false;
    SweepSpec sw;
    bool has_sweep = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        using detail::parse_double;
        using detail::parse_int;
        if (key == "params.N") c.params.N = static_cast<int>(parse_int(key, val));
        else if (key == "params.lambda") c.params.lambda = parse_double(key, val);
        else if (key == "params.L") c.params.L = parse_double(key, val);
        else if (key == "params.L0") c.params.L0 = parse_double(key, val);
        else if (key == "params.h") c.params.h = parse_double(key, val);
        else if (key == "params.h0") c.params.h0 = parse_double(key, val);
        else if (key == "params.beta") c.params.beta = parse_double(key, val);
        else if (key == "params.Q") c.params.Q = static_cast<int>(parse_int(key, val));
        else if (key == "policy.m") pol.m = static_cast<int>(parse_int(key, val)), has_policy = true;
        else if (key == "policy.R") pol.R = static_cast<int>(parse_int(key, val)), has_policy = true;
        else if (key == "policy.s") pol.s = static_cast<int>(parse_int(key, val)), has_policy = true;
        else if (key == "search.m_min") sp.m_min = static_cast<int>(parse_int(key, val)), has_search = true;
        else if (key == "search.m_max") sp.m_max = static_cast<int>(parse_int(key, val)), has_search = true;
        else if (key == "search.R_min") sp.R_min = static_cast<int>(parse_int(key, val)), has_search = true;
        else if (key == "search.R_max") sp.R_max = static_cast<int>(parse_int(key, val)), has_search = true;
        else if (key == "search.s_min") sp.s_min = static_cast<int>(parse_int(key, val)), has_search = true;
        else if (key == "search.s_max") sp.s_max = static_cast<int>(parse_int(key, val)), has_search = true;
        else if (key == "search.budget") sp.budget = parse_int(key, val), has_search = true;
        else if (key == "search.pruned") sp.pruned = detail::parse_bool(key, val), has_search = true;
        else if (key == "sim.horizon") c.sim.horizon = parse_double(key, val);
        else if (key == "sim.warmup") c.sim.warmup = parse_double(key, val);
        else if (key == "sim.replications") c.sim.replications = static_cast<int>(parse_int(key, val));
        else if (key == "sim.seed") c.sim.seed = static_cast<std::uint64_t>(parse_int(key, val));
        else if (key == "sim.sample_interval") c.sim.sample_interval = parse_double(key, val);
        else if (key == "cost.epsilon") c.epsilon = parse_double(key, val);
        else if (key == "output.format") {
            if (val != "table" && val != "csv" && val != "structured")
                throw std::invalid_argument("config key 'output.format': unknown format '" + val + "'");
            c.format = val;
        } else if (key == "run.threads") c.threads = static_cast<int>(parse_int(key, val));
        else if (key == "sweep.param") {
            if (val != "m" && val != "R" && val != "s")
                throw std::invalid_argument("config key 'sweep.param': must be m, R, or s");
            sw.param = val;
            has_sweep = true;
        } else if (key == "sweep.values") {
            sw.values.clear();
            std::stringstream ss(val);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = detail::trim(tok);
                if (!tok.empty())
                    sw.values.push_back(static_cast<int>(parse_int(key, tok)));
            }
            if (sw.values.empty())
                throw std::invalid_argument("config key 'sweep.values': empty list");
            has_sweep = true;
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    if (has_policy) c.policy = pol;
    if (has_search) c.search = sp;
    if (has_sweep) {
        if (sw.param.empty())
            throw std::invalid_argument("sweep.values given without sweep.param");
        if (sw.values.empty())
            throw std::invalid_argument("sweep.param given without sweep.values");
        c.sweep = sw;
    }
    return c;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline std::string serialize_config(const RunConfig& c) {
    using detail::fmt_double;
    std::ostringstream out;
    out << "params.N = " << c.params.N << "\n";
    out << "params.lambda = " << fmt_double(c.params.lambda) << "\n";
    out << "params.L = " << fmt_double(c.params.L) << "\n";
    out << "params.L0 = " << fmt_double(c.params.L0) << "\n";
    out << "params.h = " << fmt_double(c.params.h) << "\n";
    out << "params.h0 = " << fmt_double(c.params.h0) << "\n";
    out << "params.beta = " << fmt_double(c.params.beta) << "\n";
    out << "params.Q = " << c.params.Q << "\n";
    if (c.policy) {
        out << "policy.m = " << c.policy->m << "\n";
        out << "policy.R = " << c.policy->R << "\n";
        out << "policy.s = " << c.policy->s << "\n";
    }
    if (c.search) {
        out << "search.m_min = " << c.search->m_min << "\n";
        out << "search.m_max = " << c.search->m_max << "\n";
        out << "search.R_min = " << c.search->R_min << "\n";
        out << "search.R_max = " << c.search->R_max << "\n";
        out << "search.s_min = " << c.search->s_min << "\n";
        out << "search.s_max = " << c.search->s_max << "\n";
        out << "search.budget = " << c.search->budget << "\n";
        out << "search.pruned = " << (c.search->pruned ? 1 : 0) << "\n";
    }
    out << "sim.horizon = " << fmt_double(c.sim.horizon) << "\n";
    out << "sim.warmup = " << fmt_double(c.sim.warmup) << "\n";
    out << "sim.replications = " << c.sim.replications << "\n";
    out << "sim.seed = " << c.sim.seed << "\n";
    out << "sim.sample_interval = " << fmt_double(c.sim.sample_interval) << "\n";
    out << "cost.epsilon = " << fmt_double(c.epsilon) << "\n";
    out << "output.format = " << c.format << "\n";
    out << "run.threads = " << c.threads << "\n";
    if (c.sweep) {
        out << "sweep.param = " << c.sweep->param << "\n";
        out << "sweep.values = ";
        for (std::size_t j = 0; j < c.sweep->values.size(); ++j) {
            if (j) out << ",";
            out << c.sweep->values[j];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace echelon
