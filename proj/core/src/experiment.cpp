#include "lcrl/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lcrl/grid.hpp"
#include "lcrl/pacman.hpp"

namespace lcrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + value + "'");
    }
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + value + "'");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
    params.validate();
    int sources = 0;
    if (!property.empty()) ++sources;
    if (!automaton.empty()) ++sources;
    if (!automaton_file.empty()) ++sources;
    if (sources != 1)
        throw ConfigError("property", "exactly one of property/automaton/automaton_file required");
    if (seeds.empty()) throw ConfigError("seeds", "need at least one seed");
    if (eval_runs < 1) throw ConfigError("eval_runs", "must be >= 1");
    if (horizon < 2) throw ConfigError("horizon", "must be >= 2");
    if (psp_tol <= 0) throw ConfigError("psp_tol", "must be positive");
}

void apply_config_entry(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "fixture") c.fixture = value;
    else if (key == "size") c.size = static_cast<int>(to_int(key, value));
    else if (key == "property") c.property = value;
    else if (key == "automaton") c.automaton = value;
    else if (key == "automaton_file") c.automaton_file = value;
    else if (key == "episodes") c.params.episodes = static_cast<int>(to_int(key, value));
    else if (key == "it_threshold") c.params.it_threshold = static_cast<int>(to_int(key, value));
    else if (key == "gamma") c.params.gamma = to_double(key, value);
    else if (key == "mu") c.params.mu = to_double(key, value);
    else if (key == "rp") c.params.r_p = to_double(key, value);
    else if (key == "epsilon0") c.params.epsilon0 = to_double(key, value);
    else if (key == "tau") c.params.tau = to_double(key, value);
    else if (key == "convergence_window")
        c.params.convergence_window = static_cast<int>(to_int(key, value));
    else if (key == "convergence_eps") c.params.convergence_eps = to_double(key, value);
    else if (key == "seed") c.seeds = {static_cast<std::uint64_t>(to_int(key, value))};
    else if (key == "seeds") {
        c.seeds.clear();
        std::istringstream in(value);
        std::string tok;
        while (in >> tok) c.seeds.push_back(static_cast<std::uint64_t>(to_int(key, tok)));
    } else if (key == "out") c.out_dir = value;
    else if (key == "eval_runs") c.eval_runs = static_cast<int>(to_int(key, value));
    else if (key == "horizon") c.horizon = static_cast<int>(to_int(key, value));
    else if (key == "psp_tol") c.psp_tol = to_double(key, value);
    else if (key == "psp_trace") c.psp_trace = value == "true" || value == "1";
    else throw ConfigError(key, "unknown configuration key");
}

ExperimentConfig load_config_file(const std::string& path) {
    ExperimentConfig c;
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(line_no) + ": expected key = value");
        apply_config_entry(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Fixture and property factories

FixtureBundle make_fixture(const ExperimentConfig& config) {
    const std::string& name = config.fixture;
    FixtureBundle out;
    if (name == "region3") {
        out.env = std::make_unique<GridEnv>(region3_spec());
        out.name = "region3";
    } else if (name == "five_by_five") {
        out.env = std::make_unique<GridEnv>(five_by_five_spec());
        out.name = "five_by_five";
    } else if (name == "region1" || name == "region2") {
        out.env = std::make_unique<GridEnv>(region_spec(name, config.size));
        out.name = name + "@" + std::to_string(config.size);
    } else if (name == "pacman" || name == "pacman_small") {
        out.env = std::make_unique<PacmanEnv>(pacman_small_spec());
        out.name = "pacman_small";
    } else if (name.size() > 5 && name.substr(name.size() - 5) == ".grid") {
        out.env = std::make_unique<GridEnv>(parse_grid(read_file(name)));
        out.name = name;
    } else if (name.size() > 4 && name.substr(name.size() - 4) == ".pac") {
        out.env = std::make_unique<PacmanEnv>(parse_pacman(read_file(name)));
        out.name = name;
    } else {
        throw ConfigError("fixture", "unknown fixture '" + name + "'");
    }
    return out;
}

PropertyBundle make_property(const ExperimentConfig& config, const LabeledEnv& env) {
    PropertyBundle out;
    if (!config.automaton.empty()) {
        out.ldba = builtin_automaton(config.automaton);
        out.text = "automaton:" + config.automaton;
    } else if (!config.automaton_file.empty()) {
        out.ldba = load_automaton(read_file(config.automaton_file));
        out.text = "automaton_file:" + config.automaton_file;
    } else {
        const LtlPtr f = parse_ltl(config.property, env.ap());
        const auto alphabet = atoms_of(f);
        out.ldba = translate_fragment(f, alphabet);
        out.text = "ltl:" + to_string(f);
    }
    return out;
}

LtlPtr parse_ltl_loose(const std::string& text) {
    // Collect candidate atoms first, then parse against them.
    std::vector<std::string> atoms;
    std::string word;
    auto flush = [&] {
        if (!word.empty() && word != "true" && word != "false" && word != "X" && word != "U" &&
            word != "F" && word != "G")
            if (std::find(atoms.begin(), atoms.end(), word) == atoms.end()) atoms.push_back(word);
        word.clear();
    };
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') word += ch;
        else flush();
    }
    flush();
    return parse_ltl(text, atoms);
}

// ---------------------------------------------------------------------------
// Train pipeline

namespace {

json param_json(const LearnParams& p) {
    return json{{"mu", p.mu},
                {"gamma", p.gamma},
                {"rp", p.r_p},
                {"episodes", p.episodes},
                {"it_threshold", p.it_threshold},
                {"epsilon0", p.epsilon0},
                {"tau", p.effective_tau()},
                {"convergence_window", p.convergence_window},
                {"convergence_eps", p.convergence_eps}};
}

std::string runlog_csv(const std::vector<EpisodeRecord>& log) {
    std::ostringstream out;
    out << "# lcrl-csv v1\nepisode,iterations,reward,terminal,steps,psp0\n";
    for (const auto& r : log) {
        out << r.episode << ',' << r.iterations << ',' << format_double(r.reward) << ','
            << r.terminal << ',';
        if (r.steps_to_target >= 0) out << r.steps_to_target;
        out << ',' << format_double(r.psp_initial) << '\n';
    }
    return out.str();
}

}  // namespace

std::string run_train(const ExperimentConfig& config) {
    config.validate();
    const FixtureBundle fixture = make_fixture(config);
    const PropertyBundle prop = make_property(config, *fixture.env);
    const ProductContext ctx(*fixture.env, prop.ldba);

    for (const std::uint64_t seed : config.seeds) {
        TrainResult result = train(*fixture.env, prop.ldba, config.params, seed, config.psp_trace);
        const fs::path dir = fs::path(config.out_dir) / ("seed_" + std::to_string(seed));

        write_file(dir / "runlog.csv", runlog_csv(result.log));

        json meta{{"fixture", fixture.name},
                  {"property", prop.text},
                  {"seed", seed},
                  {"aut_states", prop.ldba.num_states()},
                  {"reject_index", prop.ldba.num_states()},
                  {"params", param_json(config.params)},
                  {"config",
                   {{"fixture", config.fixture},
                    {"size", config.size},
                    {"property", config.property},
                    {"automaton", config.automaton},
                    {"automaton_file", config.automaton_file}}}};
        write_file(dir / "meta.json", meta.dump(2) + "\n");

        json policy = json::array();
        const GreedyPolicy greedy(result.q, ctx);
        for (const std::uint64_t key : result.visited) {
            const ProductState p = unpack_product(key);
            const ActionId a = greedy(p);
            policy.push_back({{"s", p.env},
                              {"q", p.aut},
                              {"action", a},
                              {"action_name", ctx.action_name(a)}});
        }
        write_file(dir / "policy.json",
                   json{{"fixture", fixture.name}, {"property", prop.text}, {"entries", policy}}
                           .dump(2) +
                       "\n");

        json psp = json::array();
        for (const std::uint64_t key : result.visited) {
            const ProductState p = unpack_product(key);
            psp.push_back(
                {{"env_state", p.env}, {"aut_state", p.aut}, {"value", result.psp.get(p)}});
        }
        write_file(dir / "psp.json",
                   json{{"fixture", fixture.name}, {"property", prop.text}, {"entries", psp}}
                           .dump(2) +
                       "\n");

        json summary{{"entries", result.q.size()},
                     {"q_min", result.q_min},
                     {"q_max", result.q_max},
                     {"q_bound", config.params.q_bound()},
                     {"bound_violations", result.bound_violations},
                     {"episodes_run", result.log.size()},
                     {"converged_early", result.converged_early}};
        write_file(dir / "q_summary.json", summary.dump(2) + "\n");

        if (config.psp_trace) {
            std::ostringstream trace;
            trace << "# lcrl-csv v1\nepisode,env_state,aut_state,value\n";
            for (std::size_t ep = 0; ep < result.psp_trace.size(); ++ep)
                for (const auto& [key, value] : result.psp_trace[ep]) {
                    const ProductState p = unpack_product(key);
                    trace << (ep + 1) << ',' << p.env << ',' << p.aut << ','
                          << format_double(value) << '\n';
                }
            write_file(dir / "psp_trace.csv", trace.str());
        }
    }
    return config.out_dir;
}

// ---------------------------------------------------------------------------
// Oracle pipeline

namespace {

json values_json(const ExplicitProduct& product, const std::vector<double>& values) {
    json out = json::array();
    for (int x = 0; x < product.total; ++x) {
        out.push_back({{"env_state", product.env_of(x)},
                       {"aut_state", product.aut_of(x)},
                       {"value", values[x]}});
    }
    return out;
}

}  // namespace

std::string run_oracle(const ExperimentConfig& config) {
    config.validate();
    const FixtureBundle fixture = make_fixture(config);
    const PropertyBundle prop = make_property(config, *fixture.env);
    const ExplicitMdp mdp = explicit_mdp(*fixture.env);
    const ExplicitProduct product = build_product(mdp, prop.ldba);
    const OracleReport report = oracle_solve(product);

    json policy = json::array();
    for (int x = 0; x < product.total; ++x) {
        if (!product.reachable[x]) continue;
        policy.push_back({{"s", product.env_of(x)},
                          {"q", product.aut_of(x)},
                          {"action", report.policy[x]},
                          {"action_name", product.action_name(report.policy[x], prop.ldba)}});
    }

    json out{{"fixture", fixture.name},
             {"property", prop.text},
             {"product_states", product.n_pairs},
             {"reject_reachable", static_cast<bool>(product.reachable[product.reject])},
             {"mec_count", report.mecs.size()},
             {"amec_count", report.amec_count},
             {"value_at_initial", report.value_at_initial},
             {"values", values_json(product, report.values)},
             {"policy", policy}};
    const fs::path path = fs::path(config.out_dir) / "oracle.json";
    write_file(path, out.dump(2) + "\n");
    return path.string();
}

std::string run_psp(const ExperimentConfig& config) {
    config.validate();
    const FixtureBundle fixture = make_fixture(config);
    const PropertyBundle prop = make_property(config, *fixture.env);
    const ExplicitMdp mdp = explicit_mdp(*fixture.env);
    const ExplicitProduct product = build_product(mdp, prop.ldba);
    const auto mecs = mec_decomposition(product);
    const auto target = accepting_mec_union(product, mecs);
    const auto pinned = prob0_states(product, target);
    const auto values = psp_fixed_point(product, pinned, config.psp_tol);

    json out{{"fixture", fixture.name},
             {"property", prop.text},
             {"value_at_initial", values[product.initial]},
             {"values", values_json(product, values)}};
    const fs::path path = fs::path(config.out_dir) / "psp_exact.json";
    write_file(path, out.dump(2) + "\n");
    return path.string();
}

// ---------------------------------------------------------------------------
// Compare pipeline

std::string run_compare(const std::string& train_dir, const std::string& oracle_file,
                        const std::string& out_dir) {
    const json meta = json::parse(read_file((fs::path(train_dir) / "meta.json").string()));
    const json oracle = json::parse(read_file(oracle_file));
    if (meta.at("fixture") != oracle.at("fixture") || meta.at("property") != oracle.at("property"))
        throw MismatchedFixtureError("train artifacts and oracle report describe different runs");

    // Oracle values keyed by (env state, automaton state).
    std::map<std::pair<std::int64_t, int>, double> exact;
    for (const auto& v : oracle.at("values"))
        exact[{v.at("env_state").get<std::int64_t>(), v.at("aut_state").get<int>()}] =
            v.at("value").get<double>();
    const int reject_index = meta.at("reject_index").get<int>();

    auto value_of = [&](std::int64_t s, int q) {
        if (q == reject_index) return 0.0;
        const auto it = exact.find({s, q});
        if (it == exact.end()) throw MismatchedFixtureError("state missing from oracle report");
        return it->second;
    };

    // Per-episode max error over the traced states.
    std::ifstream trace((fs::path(train_dir) / "psp_trace.csv").string());
    if (!trace) throw Error("missing psp_trace.csv (train with psp_trace = true)");
    std::string line;
    std::map<int, double> max_error;
    while (std::getline(trace, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'e') continue;
        std::istringstream row(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(row, tok, ',')) cols.push_back(tok);
        if (cols.size() != 4) throw Error("bad psp_trace.csv row: " + line);
        const int episode = std::stoi(cols[0]);
        const std::int64_t s = std::stoll(cols[1]);
        const int q = std::stoi(cols[2]);
        const double v = std::stod(cols[3]);
        const double err = std::abs(v - value_of(s, q));
        max_error[episode] = std::max(max_error[episode], err);
    }
    if (max_error.empty()) throw Error("empty psp_trace.csv");

    std::ostringstream csv;
    csv << "# lcrl-csv v1\nepisode,max_error\n";
    for (const auto& [ep, err] : max_error) csv << ep << ',' << format_double(err) << '\n';
    write_file(fs::path(out_dir) / "compare.csv", csv.str());

    // Exact satisfaction probability of the learned greedy policy.
    ExperimentConfig rebuild;
    const json& raw = meta.at("config");
    rebuild.fixture = raw.at("fixture").get<std::string>();
    rebuild.size = raw.at("size").get<int>();
    rebuild.property = raw.at("property").get<std::string>();
    rebuild.automaton = raw.at("automaton").get<std::string>();
    rebuild.automaton_file = raw.at("automaton_file").get<std::string>();
    const FixtureBundle fixture = make_fixture(rebuild);
    const PropertyBundle prop = make_property(rebuild, *fixture.env);
    const ExplicitMdp mdp = explicit_mdp(*fixture.env);
    const ExplicitProduct product = build_product(mdp, prop.ldba);

    const json policy_doc = json::parse(read_file((fs::path(train_dir) / "policy.json").string()));
    std::map<std::pair<std::int64_t, int>, ActionId> learned;
    for (const auto& e : policy_doc.at("entries"))
        learned[{e.at("s").get<std::int64_t>(), e.at("q").get<int>()}] = e.at("action").get<ActionId>();
    auto policy = [&](int x) {
        const auto it = learned.find({product.env_of(x), product.aut_of(x)});
        return it != learned.end() ? it->second : product.actions[x].front();
    };
    const ChainAnalysis chain = chain_analysis(product, policy);
    const double oracle_value = oracle.at("value_at_initial").get<double>();

    json out{{"fixture", meta.at("fixture")},
             {"property", meta.at("property")},
             {"episodes", max_error.rbegin()->first},
             {"final_max_error", max_error.rbegin()->second},
             {"policy_probability", chain.satisfaction_probability},
             {"oracle_value", oracle_value},
             {"policy_probability_gap",
              std::abs(chain.satisfaction_probability - oracle_value)}};
    const fs::path path = fs::path(out_dir) / "compare.json";
    write_file(path, out.dump(2) + "\n");
    return path.string();
}

// ---------------------------------------------------------------------------
// Flat pacman baseline

FlatBaselineResult train_flat_pacman(const PacmanEnv& env, const LearnParams& params,
                                     std::uint64_t seed) {
    params.validate();
    FlatBaselineResult result;
    std::mt19937_64 rng(seed);
    const double tau = params.effective_tau();
    for (int ep = 1; ep <= params.episodes; ++ep) {
        ++result.episodes_run;
        EnvState s = env.reset();
        const double epsilon = params.epsilon0 / (1.0 + (ep - 1) / tau);
        for (int it = 0; it < params.it_threshold; ++it) {
            const ProductState ps{s, 0};
            const auto actions = env.actions(s);
            const ActionId a = select_action(result.q, ps, actions, epsilon, rng);
            const EnvState next = env.step(s, a, rng);
            const bool crash = env.ghost_collision(next);
            const bool win = !crash && env.both_foods_eaten(next);
            const double reward = win ? params.r_p : 0.0;
            const ProductState pn{next, 0};
            const bool terminal = crash || win;
            q_update(result.q, ps, a, reward, pn,
                     terminal ? std::vector<ActionId>{} : env.actions(next), params.mu,
                     params.gamma);
            if (terminal) break;
            s = next;
        }
    }
    return result;
}

double pacman_win_rate(const PacmanEnv& env, const std::function<ActionId(EnvState)>& policy,
                       int games, int horizon, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int wins = 0;
    for (int g = 0; g < games; ++g) {
        EnvState s = env.reset();
        for (int step = 0; step < horizon; ++step) {
            if (env.ghost_collision(s)) break;
            if (env.both_foods_eaten(s)) {
                ++wins;
                break;
            }
            s = env.step(s, policy(s), rng);
        }
    }
    return static_cast<double>(wins) / games;
}

double pacman_win_rate_product(const PacmanEnv& env, const Ldba& ldba,
                               const std::function<ActionId(const ProductState&)>& policy,
                               int games, int horizon, std::uint64_t seed) {
    ProductContext ctx(env, ldba);
    std::mt19937_64 rng(seed);
    int wins = 0;
    for (int g = 0; g < games; ++g) {
        ProductState p = ctx.initial();
        for (int step = 0; step < horizon; ++step) {
            if (env.ghost_collision(p.env)) break;
            if (env.both_foods_eaten(p.env)) {
                ++wins;
                break;
            }
            p = ctx.step(p, policy(p), rng);
        }
    }
    return static_cast<double>(wins) / games;
}

}  // namespace lcrl
