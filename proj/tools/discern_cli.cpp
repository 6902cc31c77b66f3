// discern: command-line front end for the market solver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "discern/discern.hpp"

namespace {

using namespace discern;
using io::json;
using io::num;

enum Exit { ok = 0, usage = 1, no_interior = 2, no_convergence = 3, other = 4, oracle_mismatch = 5 };

struct Options {
    std::string config;
    std::string format = "table";
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::uint64_t seed = 1;
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError(path, "cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

io::ScenarioConfig load(const Options& o) {
    auto cfg = io::parse_config(read_file(o.config));
    if (o.tol) cfg.solver.tol = *o.tol;
    if (o.max_iter) cfg.solver.max_iter = *o.max_iter;
    return cfg;
}

io::Format text_or_json(const Options& o) {
    const auto f = io::parse_format(o.format);
    if (f == io::Format::csv) throw SpecError("--format", "csv is only available for solve, ree and beta");
    return f;
}

json vec_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(io::jnum(v(i)));
    return a;
}

int cmd_solve(const Options& o) {
    const auto cfg = load(o);
    const auto f = io::parse_format(o.format);
    std::cout << io::serialize_solution(solve(cfg.spec, cfg.solver), cfg.spec, f);
    return ok;
}

int cmd_ree(const Options& o) {
    const auto cfg = load(o);
    const auto f = io::parse_format(o.format);
    std::cout << io::serialize_solution(ree_solution(cfg.spec), cfg.spec, f);
    return ok;
}

int cmd_compare(const Options& o, const std::string& typefile) {
    const auto cfg = load(o);
    const auto f = text_or_json(o);
    const auto t = io::parse_type(io::parse_json_text(read_file(typefile)), cfg.spec.space());
    const auto r = add_type_experiment(cfg.spec, t, cfg.solver);
    const auto& sp = cfg.spec.space();
    if (f == io::Format::json) {
        json j;
        j["added_type"] = t.name;
        json states = json::array();
        for (std::size_t k = 0; k < sp.size(); ++k) states.push_back(sp.label(k));
        j["states"] = states;
        j["q_bar_before"] = vec_json(r.before.q_bar);
        j["q_bar_after"] = vec_json(r.after.q_bar);
        j["d_q_bar"] = vec_json(r.d_q_bar);
        j["d_h"] = vec_json(r.d_h);
        j["d_social_surplus"] = vec_json(r.d_surplus);
        j["d_trading_consumer_net_payoff"] = vec_json(r.d_net_payoff);
        j["d_exante_consumer_loss"] = io::jnum(r.d_exante_loss);
        j["rational_present"] = r.rational_present;
        j["checks"] = {{"addon_weakly_falls", r.addon_weakly_falls},
                       {"price_weakly_rises", r.price_weakly_rises},
                       {"surplus_weakly_rises", r.surplus_weakly_rises},
                       {"net_payoff_weakly_falls", r.net_payoff_weakly_falls},
                       {"exante_loss_weakly_rises",
                        r.exante_loss_weakly_rises ? json(*r.exante_loss_weakly_rises) : json(nullptr)}};
        std::cout << j.dump(2) << "\n";
        return ok;
    }
    char line[256];
    std::printf("adding type '%s' (%s variant)\n", t.name.c_str(), to_string(cfg.spec.variant()));
    std::snprintf(line, sizeof line, "%-12s %16s %16s %16s %16s %16s\n", "state", "q_bar before", "q_bar after",
                  "d q_bar", "d h", "d surplus");
    std::cout << line;
    for (std::size_t k = 0; k < sp.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        std::snprintf(line, sizeof line, "%-12s %16s %16s %16s %16s %16s\n", sp.label(k).c_str(),
                      num(r.before.q_bar(i)).c_str(), num(r.after.q_bar(i)).c_str(), num(r.d_q_bar(i)).c_str(),
                      num(r.d_h(i)).c_str(), num(r.d_surplus(i)).c_str());
        std::cout << line;
    }
    auto yn = [](bool b) { return b ? "yes" : "NO"; };
    std::cout << "\nadd-on weakly falls everywhere      " << yn(r.addon_weakly_falls) << "\n"
              << "price weakly rises everywhere       " << yn(r.price_weakly_rises) << "\n";
    if (cfg.spec.variant() == Variant::exploitative)
        std::cout << "social surplus weakly rises         " << yn(r.surplus_weakly_rises) << "\n";
    std::cout << "trading consumers' payoff falls     " << yn(r.net_payoff_weakly_falls) << "\n"
              << "ex-ante consumer loss change        " << num(r.d_exante_loss);
    if (r.exante_loss_weakly_rises) std::cout << " (weakly rises: " << yn(*r.exante_loss_weakly_rises) << ")";
    else std::cout << " (no rational type; not asserted)";
    std::cout << "\n";
    return ok;
}

int cmd_beta(const Options& o, const std::string& type) {
    const auto cfg = load(o);
    const auto f = io::parse_format(o.format);
    const auto idx = cfg.spec.find_type(type);
    if (!idx) throw SpecError("--type", "no type named '" + type + "'");
    const auto beta = type_to_beta(cfg.spec.types()[*idx], cfg.spec.space(), cfg.spec.mu());
    std::cout << io::serialize_beta(beta, cfg.spec.space(), f);
    return ok;
}

int cmd_check(const Options& o) {
    const auto cfg = load(o);
    const auto f = text_or_json(o);
    const auto& spec = cfg.spec;
    const auto c = check_conditions(spec);
    json types = json::array();
    for (const auto& t : spec.types()) {
        json e;
        e["name"] = t.name;
        e["model"] = t.is_coarse() ? "coarse" : "dag";
        if (!t.is_coarse()) {
            json v = json::array();
            for (const auto& x : validate_dag(t.dag(), spec.space().num_variables())) v.push_back(x.message);
            e["violations"] = v;
            e["perfect"] = is_perfect(t.dag());
            e["signal"] = t.dag().signal_node().has_value();
        }
        e["rational"] = is_rational(t, spec.space(), spec.mu());
        types.push_back(e);
    }
    if (f == io::Format::json) {
        json j;
        j["variant"] = to_string(spec.variant());
        j["delta"] = io::jnum(spec.delta());
        j["s_min"] = io::jnum(spec.s_min());
        j["s_max"] = io::jnum(spec.s_max());
        j["s_bar"] = io::jnum(spec.s_bar());
        j["condition_exploitative"] = c.condition9;
        j["condition_beneficial"] = c.condition16;
        j["ree_interior"] = c.ree_condition;
        j["guarantee"] = c.guarantee;
        j["types"] = types;
        std::cout << j.dump(2) << "\n";
        return ok;
    }
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "variant              " << to_string(spec.variant()) << "\n"
              << "delta                " << num(spec.delta()) << "\n"
              << "S min / max / mean   " << num(spec.s_min()) << " / " << num(spec.s_max()) << " / " << num(spec.s_bar())
              << "\n"
              << "S_max - S_min < 2 delta < S_min        " << yn(c.condition9) << "\n"
              << "-2/3 delta < S_min < S_max < -delta    " << yn(c.condition16) << "\n"
              << "interior REE                           " << yn(c.ree_condition) << "\n"
              << "guarantee: " << c.guarantee << "\n\ntypes\n";
    for (const auto& e : types) {
        std::cout << "  " << e["name"].get<std::string>() << ": " << e["model"].get<std::string>();
        if (e.contains("perfect")) {
            std::cout << (e["violations"].empty() ? ", valid" : ", INVALID") << (e["perfect"].get<bool>() ? ", perfect" : ", not perfect");
            if (e["signal"].get<bool>()) std::cout << ", signal node";
            for (const auto& v : e["violations"]) std::cout << "\n    - " << v.get<std::string>();
        }
        std::cout << (e["rational"].get<bool>() ? ", rational" : "") << "\n";
    }
    return ok;
}

int cmd_oracle(const Options& o) {
    const auto cfg = load(o);
    const auto f = text_or_json(o);
    const auto betas = types_to_betas(cfg.spec.types(), cfg.spec.space(), cfg.spec.mu());
    const auto vi = value_iteration(cfg.spec, betas, cfg.solver.tol, cfg.solver.max_iter);
    const auto pi = policy_iteration(cfg.spec, betas);
    const auto bf = brute_force_oracle(cfg.spec, betas);
    const double gap_pi = (pi.q_bar - vi.q_bar).cwiseAbs().maxCoeff();
    const double gap_bf = (bf - vi.q_bar).cwiseAbs().maxCoeff();
    const bool agree = gap_pi <= check_tol && gap_bf <= check_tol;
    if (f == io::Format::json) {
        json j;
        j["value_iteration"] = vec_json(vi.q_bar);
        j["policy_iteration"] = vec_json(pi.q_bar);
        j["brute_force"] = vec_json(bf);
        j["max_gap_policy"] = io::jnum(gap_pi);
        j["max_gap_brute_force"] = io::jnum(gap_bf);
        j["agree"] = agree;
        std::cout << j.dump(2) << "\n";
    } else {
        char line[256];
        std::snprintf(line, sizeof line, "%-12s %18s %18s %18s\n", "state", "value iteration", "policy iteration",
                      "brute force");
        std::cout << line;
        for (std::size_t k = 0; k < cfg.spec.num_states(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            std::snprintf(line, sizeof line, "%-12s %18s %18s %18s\n", cfg.spec.space().label(k).c_str(),
                          num(vi.q_bar(i)).c_str(), num(pi.q_bar(i)).c_str(), num(bf(i)).c_str());
            std::cout << line;
        }
        std::cout << "max gap (policy)       " << num(gap_pi) << "\nmax gap (brute force)  " << num(gap_bf) << "\n"
                  << (agree ? "agree" : "MISMATCH") << "\n";
    }
    return agree ? ok : oracle_mismatch;
}

int cmd_scenario(const std::string& name, bool list) {
    if (list) {
        for (const auto& n : scenarios::names()) std::cout << n << "\n";
        return ok;
    }
    const auto all = scenarios::names();
    if (std::find(all.begin(), all.end(), name) == all.end())
        throw SpecError("name", "unknown scenario '" + name + "' (see --list)");
    std::cout << io::serialize_config(scenarios::by_name(name));
    return ok;
}

int cmd_sweep(const Options& o, const std::string& kind, int trials) {
    const auto f = text_or_json(o);
    if (kind != "exploitative" && kind != "beneficial") throw SpecError("--kind", "must be exploitative or beneficial");
    random::Rng rng(o.seed);
    int solved = 0, no_int = 0, mismatches = 0, tied = 0;
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto spec = kind == "exploitative" ? random::random_exploitative_spec(rng) : random::random_beneficial_spec(rng);
        SolverOptions opt;
        if (o.tol) opt.tol = *o.tol;
        if (o.max_iter) opt.max_iter = *o.max_iter;
        try {
            const auto sol = solve(spec, opt);
            ++solved;
            if (!sol.revelation.ok) ++tied;
            if (spec.variant() == Variant::exploitative) {
                const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
                const double gap = std::max(sol.diagnostics.cross_check_gap,
                                            (brute_force_oracle(spec, betas) - sol.q_bar).cwiseAbs().maxCoeff());
                worst = std::max(worst, gap);
                if (gap > check_tol) ++mismatches;
            }
        } catch (const NoInteriorEquilibrium&) {
            ++no_int;
        }
    }
    if (f == io::Format::json) {
        json j{{"kind", kind},           {"seed", o.seed},          {"trials", trials},
               {"interior", solved},     {"not_interior", no_int},  {"tied_prices", tied},
               {"oracle_mismatches", mismatches}, {"worst_oracle_gap", io::jnum(worst)}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "kind                 " << kind << "\nseed                 " << o.seed << "\ntrials               "
                  << trials << "\ninterior             " << solved << "\nnot interior         " << no_int
                  << "\ntied prices          " << tied << "\n";
        if (kind == "exploitative")
            std::cout << "oracle mismatches    " << mismatches << "\nworst oracle gap     " << num(worst) << "\n";
    }
    return mismatches ? oracle_mismatch : ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discern: competitive markets with imperfectly discerning consumers"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub, bool config) {
        if (config) sub->add_option("config", o.config, "scenario config (JSON), '-' for stdin")->required();
        sub->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
        sub->add_option("--tol", o.tol, "sup-norm stopping tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", o.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    };

    auto* solve_cmd = app.add_subcommand("solve", "solve for the interior equilibrium");
    add_common(solve_cmd, true);
    auto* ree_cmd = app.add_subcommand("ree", "rational-expectations benchmark");
    add_common(ree_cmd, true);
    std::string typefile;
    auto* cmp_cmd = app.add_subcommand("compare-types", "effect of adding a cognitive type");
    add_common(cmp_cmd, true);
    cmp_cmd->add_option("--add", typefile, "JSON file with one type entry")->required();
    std::string type_name;
    auto* beta_cmd = app.add_subcommand("beta", "print a type's transition matrix");
    add_common(beta_cmd, true);
    beta_cmd->add_option("--type", type_name, "type name")->required();
    auto* check_cmd = app.add_subcommand("check", "primitive conditions and DAG validation");
    add_common(check_cmd, true);
    auto* oracle_cmd = app.add_subcommand("oracle", "value iteration vs policy iteration vs enumeration");
    add_common(oracle_cmd, true);
    std::string scen;
    bool list = false;
    auto* scen_cmd = app.add_subcommand("scenario", "emit a built-in scenario config");
    scen_cmd->add_option("name", scen, "scenario name");
    scen_cmd->add_flag("--list", list, "list scenario names");
    std::string kind = "exploitative";
    int trials = 100;
    auto* sweep_cmd = app.add_subcommand("sweep", "randomized solves with oracle cross-checks");
    add_common(sweep_cmd, false);
    sweep_cmd->add_option("--seed", o.seed, "random seed");
    sweep_cmd->add_option("--kind", kind, "exploitative or beneficial");
    sweep_cmd->add_option("--trials", trials, "number of random markets")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*solve_cmd) return cmd_solve(o);
        if (*ree_cmd) return cmd_ree(o);
        if (*cmp_cmd) return cmd_compare(o, typefile);
        if (*beta_cmd) return cmd_beta(o, type_name);
        if (*check_cmd) return cmd_check(o);
        if (*oracle_cmd) return cmd_oracle(o);
        if (*scen_cmd) {
            if (!list && scen.empty()) throw SpecError("name", "scenario name required (or --list)");
            return cmd_scenario(scen, list);
        }
        if (*sweep_cmd) return cmd_sweep(o, kind, trials);
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const NoInteriorEquilibrium& e) {
        std::cerr << "error: " << e.what() << "\n";
        return no_interior;
    } catch (const ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return no_convergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return other;
    }
    return usage;
}
