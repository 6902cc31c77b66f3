#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "discern/beliefs.hpp"
#include "discern/dag.hpp"
#include "discern/errors.hpp"
#include "discern/market.hpp"
#include "discern/solution.hpp"
#include "discern/solver.hpp"
#include "discern/state_space.hpp"
#include "discern/transition.hpp"

namespace discern::io {

using json = nlohmann::ordered_json;

inline constexpr int format_version = 1;

/// Numbers in every report use 12 significant digits.
inline std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// The double closest to num(x), so JSON output carries at most 12 significant digits.
inline json jnum(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(num(x));
}

struct ScenarioConfig {
    MarketSpec spec;
    SolverOptions solver;
};

// ---- parsing ---------------------------------------------------------------

namespace detail {

[[noreturn]] inline void fail(const std::string& pointer, const std::string& what) { throw SpecError(pointer, what); }

inline const json& need(const json& j, const std::string& key, const std::string& ptr) {
    if (!j.is_object()) fail(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(ptr + "/" + key, "missing field");
    return *it;
}

inline double need_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
}

inline std::string need_string(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

inline void only_keys(const json& j, const std::vector<std::string>& allowed, const std::string& ptr) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == it.key();
        if (!ok) fail(ptr + "/" + it.key(), "unknown field");
    }
}

inline std::size_t variable_index(const StateSpace& space, const std::string& name, const std::string& ptr) {
    auto v = space.find_variable(name);
    if (!v) fail(ptr, "unknown variable '" + name + "'");
    return *v;
}

inline std::vector<Variable> parse_variables(const json& j, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array of variables");
    std::vector<Variable> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = ptr + "/" + std::to_string(i);
        only_keys(j[i], {"name", "domain"}, p);
        Variable v;
        v.name = need_string(need(j[i], "name", p), p + "/name");
        const json& d = need(j[i], "domain", p);
        if (!d.is_array()) fail(p + "/domain", "expected an array of strings");
        for (std::size_t k = 0; k < d.size(); ++k) v.domain.push_back(need_string(d[k], p + "/domain/" + std::to_string(k)));
        out.push_back(std::move(v));
    }
    return out;
}

inline StateTuple parse_tuple(const json& j, const std::vector<Variable>& vars, const std::string& ptr) {
    if (!j.is_array() || j.size() != vars.size())
        fail(ptr, "expected an array of " + std::to_string(vars.size()) + " domain values");
    StateTuple t(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string val = need_string(j[i], ptr + "/" + std::to_string(i));
        const auto& dom = vars[i].domain;
        auto it = std::find(dom.begin(), dom.end(), val);
        if (it == dom.end()) fail(ptr + "/" + std::to_string(i), "'" + val + "' is not in the domain of " + vars[i].name);
        t[i] = static_cast<std::size_t>(it - dom.begin());
    }
    return t;
}

inline NodeKind parse_kind(const std::string& s, const std::string& ptr) {
    if (s == "state") return NodeKind::state_var;
    if (s == "price") return NodeKind::price;
    if (s == "addon") return NodeKind::addon;
    if (s == "signal") return NodeKind::signal;
    fail(ptr, "node kind must be one of state, price, addon, signal");
}

inline const char* kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::state_var: return "state";
    case NodeKind::price: return "price";
    case NodeKind::addon: return "addon";
    case NodeKind::signal: return "signal";
    }
    return "?";
}

inline CausalDag parse_dag(const json& j, const StateSpace& space, const std::string& ptr) {
    only_keys(j, {"nodes", "edges"}, ptr);
    const json& nodes = need(j, "nodes", ptr);
    if (!nodes.is_array()) fail(ptr + "/nodes", "expected an array");
    CausalDag g;
    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string p = ptr + "/nodes/" + std::to_string(i);
        only_keys(nodes[i], {"name", "kind", "variable"}, p);
        const std::string name = need_string(need(nodes[i], "name", p), p + "/name");
        const NodeKind kind = parse_kind(need_string(need(nodes[i], "kind", p), p + "/kind"), p + "/kind");
        if (ids.count(name)) fail(p + "/name", "duplicate node name '" + name + "'");
        std::size_t var = 0;
        if (kind == NodeKind::state_var)
            var = variable_index(space, need_string(need(nodes[i], "variable", p), p + "/variable"), p + "/variable");
        else if (nodes[i].contains("variable"))
            fail(p + "/variable", "only state nodes name a variable");
        ids[name] = g.add_node(kind, name, var);
    }
    const json& edges = need(j, "edges", ptr);
    if (!edges.is_array()) fail(ptr + "/edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string p = ptr + "/edges/" + std::to_string(i);
        if (!edges[i].is_array() || edges[i].size() != 2) fail(p, "expected [parent, child]");
        std::size_t ends[2];
        for (std::size_t e = 0; e < 2; ++e) {
            const std::string n = need_string(edges[i][e], p + "/" + std::to_string(e));
            auto it = ids.find(n);
            if (it == ids.end()) fail(p + "/" + std::to_string(e), "unknown node '" + n + "'");
            ends[e] = it->second;
        }
        g.add_edge(ends[0], ends[1]);
    }
    auto viol = validate_dag(g, space.num_variables());
    if (!viol.empty()) fail(ptr, "invalid DAG: " + viol.front().message);
    return g;
}

} // namespace detail

/// One type entry: {"name": ..., "coarse": [variable names]} or {"name": ..., "dag": {"nodes": [...], "edges": [...]}}.
inline CognitiveType parse_type(const json& j, const StateSpace& space, const std::string& ptr = "") {
    detail::only_keys(j, {"name", "coarse", "dag"}, ptr);
    const std::string name = detail::need_string(detail::need(j, "name", ptr), ptr + "/name");
    const bool has_c = j.contains("coarse"), has_d = j.contains("dag");
    if (has_c == has_d) detail::fail(ptr, "type needs exactly one of 'coarse' or 'dag'");
    if (has_c) {
        const json& c = j["coarse"];
        if (!c.is_array()) detail::fail(ptr + "/coarse", "expected an array of variable names");
        std::vector<std::size_t> vars;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string p = ptr + "/coarse/" + std::to_string(i);
            const auto v = detail::variable_index(space, detail::need_string(c[i], p), p);
            if (std::find(vars.begin(), vars.end(), v) != vars.end()) detail::fail(p, "variable listed twice");
            vars.push_back(v);
        }
        return CognitiveType::coarse(name, std::move(vars));
    }
    return CognitiveType::from_dag(name, detail::parse_dag(j["dag"], space, ptr + "/dag"));
}

/// Parses text, mapping syntax errors to line and column.
inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        auto pos = msg.find(": ", msg.find("parse error"));
        throw SpecError("line " + std::to_string(line) + ", column " + std::to_string(col),
                        pos == std::string::npos ? msg : msg.substr(pos + 2));
    }
}

inline ScenarioConfig parse_config(const json& j) {
    detail::only_keys(j, {"format_version", "variables", "states", "v_star", "c", "variant", "types", "solver"}, "");
    if (j.contains("format_version") &&
        (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != format_version))
        detail::fail("/format_version", "unsupported version (expected " + std::to_string(format_version) + ")");
    const auto vars = detail::parse_variables(detail::need(j, "variables", ""), "/variables");

    const json& states = detail::need(j, "states", "");
    if (!states.is_array()) detail::fail("/states", "expected an array of {state, mu, S}");
    std::vector<StateTuple> support;
    std::vector<double> mus, ss;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string p = "/states/" + std::to_string(i);
        detail::only_keys(states[i], {"state", "mu", "S"}, p);
        support.push_back(detail::parse_tuple(detail::need(states[i], "state", p), vars, p + "/state"));
        for (std::size_t k = 0; k < i; ++k)
            if (support[k] == support[i]) detail::fail(p + "/state", "duplicate state");
        mus.push_back(detail::need_number(detail::need(states[i], "mu", p), p + "/mu"));
        ss.push_back(detail::need_number(detail::need(states[i], "S", p), p + "/S"));
    }
    StateSpace space = [&] {
        try {
            return StateSpace(vars, support);
        } catch (const SpecError& e) {
            throw SpecError("/states", e.what());
        }
    }();
    const auto n = static_cast<Eigen::Index>(space.size());
    Eigen::VectorXd mu(n), s(n);
    for (std::size_t i = 0; i < support.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(*space.index_of(support[i]));
        mu(k) = mus[i];
        s(k) = ss[i];
    }
    const double v_star = detail::need_number(detail::need(j, "v_star", ""), "/v_star");
    const double c = detail::need_number(detail::need(j, "c", ""), "/c");
    const std::string vs = detail::need_string(detail::need(j, "variant", ""), "/variant");
    Variant variant;
    if (vs == "exploitative") variant = Variant::exploitative;
    else if (vs == "beneficial") variant = Variant::beneficial;
    else detail::fail("/variant", "must be 'exploitative' or 'beneficial'");

    const json& tj = detail::need(j, "types", "");
    if (!tj.is_array()) detail::fail("/types", "expected an array");
    std::vector<CognitiveType> types;
    for (std::size_t i = 0; i < tj.size(); ++i) types.push_back(parse_type(tj[i], space, "/types/" + std::to_string(i)));

    SolverOptions opt;
    if (j.contains("solver")) {
        const json& so = j["solver"];
        detail::only_keys(so, {"tol", "max_iter", "cross_check"}, "/solver");
        if (so.contains("tol")) opt.tol = detail::need_number(so["tol"], "/solver/tol");
        if (so.contains("max_iter")) {
            if (!so["max_iter"].is_number_integer() || so["max_iter"].get<long long>() < 1)
                detail::fail("/solver/max_iter", "expected a positive integer");
            opt.max_iter = so["max_iter"].get<int>();
        }
        if (so.contains("cross_check")) {
            if (!so["cross_check"].is_boolean()) detail::fail("/solver/cross_check", "expected true or false");
            opt.cross_check = so["cross_check"].get<bool>();
        }
        if (!(opt.tol > 0.0)) detail::fail("/solver/tol", "must be positive");
    }

    try {
        return {MarketSpec(std::move(space), std::move(mu), std::move(s), v_star, c, variant, std::move(types)), opt};
    } catch (const SpecError& e) {
        const std::string f = e.field();
        const std::string ptr = f == "mu" ? "/states/*/mu" : f == "S" ? "/states/*/S" : f == "v_star" ? "/v_star"
                                : f.rfind("types[", 0) == 0 ? "/types/" + f.substr(6, f.size() - 7)
                                                            : "/" + f;
        std::string what = e.what();
        if (what.rfind(f + ": ", 0) == 0) what = what.substr(f.size() + 2);
        throw SpecError(ptr, what);
    }
}

inline ScenarioConfig parse_config(const std::string& text) { return parse_config(parse_json_text(text)); }

// ---- serialization ---------------------------------------------------------

inline json serialize_type(const CognitiveType& t, const StateSpace& space) {
    json j;
    j["name"] = t.name;
    if (t.is_coarse()) {
        json vars = json::array();
        for (auto v : t.coarse_model().variables) vars.push_back(space.variable(v).name);
        j["coarse"] = vars;
        return j;
    }
    const auto& g = t.dag();
    json nodes = json::array(), edges = json::array();
    for (const auto& nd : g.nodes()) {
        json o;
        o["name"] = nd.name;
        o["kind"] = detail::kind_name(nd.kind);
        if (nd.kind == NodeKind::state_var) o["variable"] = space.variable(nd.variable).name;
        nodes.push_back(o);
    }
    for (const auto& [p, c] : g.edges()) edges.push_back(json::array({g.node(p).name, g.node(c).name}));
    j["dag"] = {{"nodes", nodes}, {"edges", edges}};
    return j;
}

inline json serialize_config_json(const MarketSpec& spec, const SolverOptions& opt = {}) {
    const auto& space = spec.space();
    json j;
    j["format_version"] = format_version;
    json vars = json::array();
    for (std::size_t i = 0; i < space.num_variables(); ++i)
        vars.push_back({{"name", space.variable(i).name}, {"domain", space.variable(i).domain}});
    j["variables"] = vars;
    json states = json::array();
    for (std::size_t k = 0; k < space.size(); ++k) {
        json tuple = json::array();
        for (std::size_t i = 0; i < space.num_variables(); ++i)
            tuple.push_back(space.variable(i).domain[space.value(k, i)]);
        states.push_back({{"state", tuple}, {"mu", spec.mu()(static_cast<Eigen::Index>(k))}, {"S", spec.S(k)}});
    }
    j["states"] = states;
    j["v_star"] = spec.v_star();
    j["c"] = spec.c();
    j["variant"] = to_string(spec.variant());
    json types = json::array();
    for (const auto& t : spec.types()) types.push_back(serialize_type(t, space));
    j["types"] = types;
    j["solver"] = {{"tol", opt.tol}, {"max_iter", opt.max_iter}, {"cross_check", opt.cross_check}};
    return j;
}

/// Lossless: doubles are written with round-trip precision.
inline std::string serialize_config(const MarketSpec& spec, const SolverOptions& opt = {}) {
    return serialize_config_json(spec, opt).dump(2) + "\n";
}

enum class Format { table, csv, json };

inline Format parse_format(const std::string& s) {
    if (s == "table") return Format::table;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw DomainError("format must be table, csv or json");
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

inline std::string join_types(const EquilibriumSolution& sol, std::size_t k, const char* sep) {
    std::string out;
    if (k >= sol.trading_types.size()) return out;
    for (auto t : sol.trading_types[k]) {
        if (!out.empty()) out += sep;
        out += t < sol.type_names.size() ? sol.type_names[t] : std::to_string(t);
    }
    return out;
}

inline json solution_json(const EquilibriumSolution& sol, const MarketSpec& spec) {
    auto vec = [](const Eigen::VectorXd& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
        return a;
    };
    json j;
    j["variant"] = to_string(sol.variant);
    json states = json::array();
    for (std::size_t k = 0; k < spec.num_states(); ++k) states.push_back(spec.space().label(k));
    j["states"] = states;
    j["q_bar"] = vec(sol.q_bar);
    j["h"] = vec(sol.h);
    j["pi_star"] = vec(sol.pi_star);
    j["type_names"] = sol.type_names;
    json est = json::array();
    for (Eigen::Index t = 0; t < sol.estimates.rows(); ++t) est.push_back(vec(sol.estimates.row(t).transpose()));
    j["estimates"] = est;
    json trading = json::array();
    for (std::size_t k = 0; k < sol.trading_types.size(); ++k) {
        json names = json::array();
        for (auto t : sol.trading_types[k]) names.push_back(sol.type_names.at(t));
        trading.push_back(names);
    }
    j["trading_types"] = trading;
    json interior = json::array();
    for (bool b : sol.interior) interior.push_back(b);
    j["interior"] = interior;
    j["welfare"] = {{"social_surplus", vec(sol.welfare.social_surplus)},
                    {"trading_consumer_net_payoff", vec(sol.welfare.trading_consumer_net_payoff)},
                    {"exante_consumer_loss", jnum(sol.welfare.exante_consumer_loss)},
                    {"total_social_surplus", jnum(sol.welfare.total_social_surplus)}};
    json coll = json::array();
    for (const auto& [a, b] : sol.revelation.collisions) coll.push_back(json::array({a, b}));
    j["revelation"] = {{"ok", sol.revelation.ok}, {"min_gap", jnum(sol.revelation.min_gap)}, {"collisions", coll}};
    j["diagnostics"] = {{"method", sol.diagnostics.method},
                        {"iterations", sol.diagnostics.iterations},
                        {"residual", jnum(sol.diagnostics.residual)},
                        {"cross_checked", sol.diagnostics.cross_checked},
                        {"cross_check_gap", jnum(sol.diagnostics.cross_check_gap)}};
    return j;
}

inline std::string serialize_solution(const EquilibriumSolution& sol, const MarketSpec& spec, Format f) {
    std::ostringstream out;
    const auto n = spec.num_states();
    if (f == Format::json) return solution_json(sol, spec).dump(2) + "\n";
    if (f == Format::csv) {
        out << "state,S,mu,q_bar,h,pi_star,argmin_types,interior\n";
        for (std::size_t k = 0; k < n; ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            out << csv_field(spec.space().label(k)) << ',' << num(spec.S(k)) << ',' << num(spec.mu()(i)) << ','
                << num(sol.q_bar(i)) << ',' << num(sol.h(i)) << ',' << num(sol.pi_star(i)) << ','
                << csv_field(join_types(sol, k, ";")) << ',' << (sol.interior[k] ? "true" : "false") << '\n';
        }
        return out.str();
    }
    char line[512];
    std::snprintf(line, sizeof line, "%-12s %16s %16s %16s %16s %16s  %s\n", "state", "S", "mu", "q_bar", "h",
                  "pi_star", sol.variant == Variant::exploitative ? "argmin" : "argmax");
    out << "variant: " << to_string(sol.variant) << "\n" << line;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        std::snprintf(line, sizeof line, "%-12s %16s %16s %16s %16s %16s  %s%s\n", spec.space().label(k).c_str(),
                      num(spec.S(k)).c_str(), num(spec.mu()(i)).c_str(), num(sol.q_bar(i)).c_str(),
                      num(sol.h(i)).c_str(), num(sol.pi_star(i)).c_str(), join_types(sol, k, ", ").c_str(),
                      sol.interior[k] ? "" : "  [not interior]");
        out << line;
    }
    if (sol.all_interior()) {
        out << "\nwelfare\n";
        out << "  total social surplus    " << num(sol.welfare.total_social_surplus) << "\n";
        out << "  ex-ante consumer loss   " << num(sol.welfare.exante_consumer_loss) << "\n";
        out << "  full revelation         " << (sol.revelation.ok ? "yes" : "no") << " (min price gap "
            << num(sol.revelation.min_gap) << ")\n";
    }
    out << "\ndiagnostics: " << sol.diagnostics.method << ", " << sol.diagnostics.iterations << " iterations, residual "
        << num(sol.diagnostics.residual);
    if (sol.diagnostics.cross_checked) out << ", policy-iteration gap " << num(sol.diagnostics.cross_check_gap);
    out << "\n";
    return out.str();
}

inline std::string serialize_beta(const TransitionMatrix& beta, const StateSpace& space, Format f) {
    const auto n = beta.size();
    std::ostringstream out;
    if (f == Format::json) {
        json rows = json::array();
        for (std::size_t a = 0; a < n; ++a) {
            json r = json::array();
            for (std::size_t b = 0; b < n; ++b) r.push_back(jnum(beta(a, b)));
            rows.push_back(r);
        }
        json states = json::array();
        for (std::size_t k = 0; k < n; ++k) states.push_back(space.label(k));
        return json{{"states", states}, {"beta", rows}}.dump(2) + "\n";
    }
    const char sep = f == Format::csv ? ',' : ' ';
    out << (f == Format::csv ? "from" : "from\\to");
    for (std::size_t b = 0; b < n; ++b) out << sep << (f == Format::csv ? csv_field(space.label(b)) : space.label(b));
    out << '\n';
    for (std::size_t a = 0; a < n; ++a) {
        out << (f == Format::csv ? csv_field(space.label(a)) : space.label(a));
        for (std::size_t b = 0; b < n; ++b) out << sep << num(beta(a, b));
        out << '\n';
    }
    return out.str();
}

} // namespace discern::io
