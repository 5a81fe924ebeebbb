#include "sastep/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sastep {

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& i : issues)
              msg += "\n  " + (i.line > 0 ? "line " + std::to_string(i.line) + ": " : std::string()) +
                     i.message;
          return msg;
      }()),
      issues_(std::move(issues)) {}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::rl: return "rl";
        case Algorithm::saga: return "saga";
        case Algorithm::pass: return "pass";
        case Algorithm::pass_vec: return "pass_vec";
    }
    return "?";
}

std::string to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::inverse_power: return "inv";
        case ScheduleKind::piecewise_constant: return "pc";
        case ScheduleKind::optimal: return "optimal";
    }
    return "?";
}

std::string to_string(EnvironmentKind e) {
    switch (e) {
        case EnvironmentKind::drift: return "drift";
        case EnvironmentKind::placement: return "placement";
        case EnvironmentKind::execution: return "execution";
    }
    return "?";
}

namespace {

template <class E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> names,
             const char* what) {
    std::string valid;
    for (const auto& [n, e] : names) {
        if (s == n) return e;
        valid += (valid.empty() ? "" : ", ") + std::string(n);
    }
    throw std::invalid_argument("unknown " + std::string(what) + " '" + s + "' (expected one of " + valid + ")");
}

}  // namespace

Algorithm parse_algorithm(const std::string& s) {
    return parse_enum<Algorithm>(s, {{"rl", Algorithm::rl}, {"saga", Algorithm::saga},
                                     {"pass", Algorithm::pass}, {"pass_vec", Algorithm::pass_vec}},
                                 "algorithm");
}

ScheduleKind parse_policy(const std::string& s) {
    return parse_enum<ScheduleKind>(s, {{"constant", ScheduleKind::constant},
                                        {"inv", ScheduleKind::inverse_power},
                                        {"pc", ScheduleKind::piecewise_constant},
                                        {"optimal", ScheduleKind::optimal}},
                                    "policy");
}

EnvironmentKind parse_environment(const std::string& s) {
    return parse_enum<EnvironmentKind>(s, {{"drift", EnvironmentKind::drift},
                                           {"placement", EnvironmentKind::placement},
                                           {"execution", EnvironmentKind::execution}},
                                       "environment");
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_real(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double as_real(const std::string& s) {
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::invalid_argument("expects a real number, got '" + s + "'");
    return x;
}

template <class I>
I as_int(const std::string& s) {
    I x{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::invalid_argument("expects an integer, got '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

struct Field {
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

using Schema = std::map<std::string, std::map<std::string, Field>>;

#define REAL(expr)                                                                  \
    Field {                                                                         \
        [](const ExperimentConfig& c) { return fmt_real(c.expr); },                 \
            [](ExperimentConfig& c, const std::string& v) { c.expr = as_real(v); }  \
    }
#define INT(expr)                                                                             \
    Field {                                                                                   \
        [](const ExperimentConfig& c) { return std::to_string(c.expr); },                     \
            [](ExperimentConfig& c, const std::string& v) {                                   \
                c.expr = as_int<std::remove_reference_t<decltype(c.expr)>>(v);                \
            }                                                                                 \
    }

const Schema& schema() {
    static const Schema s = [] {
        Schema m;
        auto& run = m["run"];
        run["environment"] = {[](const ExperimentConfig& c) { return to_string(c.environment); },
                              [](ExperimentConfig& c, const std::string& v) { c.environment = parse_environment(v); }};
        run["runs"] = {[](const ExperimentConfig& c) {
                           std::string out;
                           for (const auto& r : c.runs)
                               out += (out.empty() ? "" : ", ") + to_string(r.algorithm) + ":" + to_string(r.policy);
                           return out;
                       },
                       [](ExperimentConfig& c, const std::string& v) {
                           c.runs.clear();
                           for (const auto& item : split(v, ',')) {
                               const auto colon = item.find(':');
                               if (colon == std::string::npos)
                                   throw std::invalid_argument("run '" + item + "' must read algo:policy");
                               c.runs.push_back({parse_algorithm(trim(item.substr(0, colon))),
                                                 parse_policy(trim(item.substr(colon + 1)))});
                           }
                           if (c.runs.empty()) throw std::invalid_argument("runs must not be empty");
                       }};
        run["episodes"] = INT(episodes);
        run["paths"] = INT(paths);
        run["seed"] = INT(seed);
        run["workers"] = INT(workers);
        run["cadence"] = INT(cadence);
        run["saga_c"] = REAL(saga_c);
        run["output_dir"] = {[](const ExperimentConfig& c) { return c.output_dir; },
                             [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }};

        auto& st = m["stepsize"];
        st["gamma0"] = REAL(engine.stepsize.gamma0);
        st["eta"] = REAL(engine.stepsize.eta);
        st["alpha_exponent"] = REAL(engine.stepsize.alpha_exponent);
        st["pc_window"] = INT(engine.stepsize.pc.window);
        st["pc_improvement"] = REAL(engine.stepsize.pc.improvement);
        st["pc_floor"] = REAL(engine.stepsize.pc.floor);
        st["pc_mode"] = {[](const ExperimentConfig& c) {
                             return std::string(c.engine.stepsize.pc.mode == PcMode::halve ? "halve" : "subtract");
                         },
                         [](ExperimentConfig& c, const std::string& v) {
                             c.engine.stepsize.pc.mode = parse_enum<PcMode>(
                                 v, {{"halve", PcMode::halve}, {"subtract", PcMode::subtract}}, "pc_mode");
                         }};
        st["pc_decrement"] = REAL(engine.stepsize.pc.decrement);
        st["L0"] = REAL(engine.stepsize.lb.L);
        st["B0"] = REAL(engine.stepsize.lb.B);
        st["kappa_up"] = REAL(engine.stepsize.lb.kappa_up);
        st["proxy_window"] = INT(engine.stepsize.proxy_window);
        st["proxy_mode"] = {[](const ExperimentConfig& c) {
                                return std::string(c.engine.stepsize.proxy_mode == ProxyMode::squared_mean
                                                       ? "squared_mean"
                                                       : "mean_square");
                            },
                            [](ExperimentConfig& c, const std::string& v) {
                                c.engine.stepsize.proxy_mode = parse_enum<ProxyMode>(
                                    v, {{"squared_mean", ProxyMode::squared_mean},
                                        {"mean_square", ProxyMode::mean_square}},
                                    "proxy_mode");
                            }};
        st["d1"] = REAL(engine.stepsize.d1);
        st["hl_scheme"] = {[](const ExperimentConfig& c) {
                               return std::string(c.engine.hl == HlScheme::additive ? "additive" : "two_thirds");
                           },
                           [](ExperimentConfig& c, const std::string& v) {
                               c.engine.hl = parse_enum<HlScheme>(
                                   v, {{"additive", HlScheme::additive}, {"two_thirds", HlScheme::two_thirds}},
                                   "hl_scheme");
                           }};
        st["saga_depth"] = INT(engine.saga_depth);
        st["initial_value"] = REAL(engine.initial_value);

        auto& dr = m["drift"];
        dr["f"] = {[](const ExperimentConfig& c) {
                       std::string out;
                       for (double x : c.drift.f) out += (out.empty() ? "" : ", ") + fmt_real(x);
                       return out;
                   },
                   [](ExperimentConfig& c, const std::string& v) {
                       c.drift.f.clear();
                       for (const auto& item : split(v, ',')) c.drift.f.push_back(as_real(item));
                   }};
        dr["sigma"] = REAL(drift.noise_sigma);

        auto& pl = m["placement"];
        pl["q_before_max"] = INT(placement.grid.q_before_max);
        pl["q_after_max"] = INT(placement.grid.q_after_max);
        pl["q_opp_max"] = INT(placement.grid.q_opp_max);
        pl["market_sell"] = REAL(placement.rates.market_sell);
        pl["same_arrival"] = REAL(placement.rates.same_arrival);
        pl["same_cancel"] = REAL(placement.rates.same_cancel);
        pl["opp_arrival"] = REAL(placement.rates.opp_arrival);
        pl["opp_depletion"] = REAL(placement.rates.opp_depletion);
        pl["psi"] = REAL(placement.costs.spread_psi);
        pl["wait_cost"] = REAL(placement.costs.wait_cost_c);
        pl["horizon"] = INT(placement.costs.horizon_T);
        pl["tick"] = REAL(placement.costs.tick);

        auto& ex = m["execution"];
        ex["alpha"] = REAL(execution.alpha);
        ex["sigma"] = REAL(execution.sigma);
        ex["kappa"] = REAL(execution.kappa);
        ex["phi"] = REAL(execution.phi);
        ex["A"] = REAL(execution.A_terminal);
        ex["T"] = REAL(execution.T);
        ex["k_T"] = INT(execution.k_T);
        ex["k_q"] = INT(execution.k_q);
        ex["q_bar"] = REAL(execution.q_bar);
        ex["iterations"] = INT(exec_run.iterations);
        ex["action_mode"] = {[](const ExperimentConfig& c) {
                                 switch (c.exec_run.policy.mode) {
                                     case ActionPolicyMode::explore_softmax: return std::string("explore_softmax");
                                     case ActionPolicyMode::boltzmann: return std::string("boltzmann");
                                     case ActionPolicyMode::epsilon_uniform: return std::string("epsilon_uniform");
                                 }
                                 return std::string("?");
                             },
                             [](ExperimentConfig& c, const std::string& v) {
                                 c.exec_run.policy.mode = parse_enum<ActionPolicyMode>(
                                     v, {{"explore_softmax", ActionPolicyMode::explore_softmax},
                                         {"boltzmann", ActionPolicyMode::boltzmann},
                                         {"epsilon_uniform", ActionPolicyMode::epsilon_uniform}},
                                     "action_mode");
                             }};
        ex["beta_bar"] = REAL(exec_run.policy.beta_bar);
        ex["b_unvisited"] = REAL(exec_run.policy.b_unvisited);
        ex["epsilon"] = REAL(exec_run.policy.epsilon);

        auto& bd = m["bounds"];
        bd["switch_p"] = REAL(chain.switch_p);
        bd["gamma"] = REAL(chain.gamma);
        bd["sigma"] = REAL(chain.sigma);
        bd["delta0"] = REAL(chain.delta0);
        bd["horizon"] = INT(bound_horizon);
        bd["replications"] = INT(bound_replications);
        bd["calibration"] = INT(bound_calibration);
        return m;
    }();
    return s;
}

#undef REAL
#undef INT

template <class Map>
std::string nearest(const std::string& key, const Map& options) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& [name, unused] : options) {
        (void)unused;
        // A key the typed name starts is a better guess than any short edit.
        const bool prefix = !key.empty() && name.rfind(key, 0) == 0;
        const std::size_t d = prefix ? 0 : edit_distance(key, name) + 1;
        if (d < best_d) {
            best_d = d;
            best = name;
        }
    }
    return best;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::vector<ConfigIssue> issues;
    std::set<std::string> sections_seen;
    std::set<std::pair<std::string, std::string>> keys_seen;
    const auto& s = schema();

    std::istringstream in(text);
    std::string raw, section;
    bool section_valid = false;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back({line_no, "unterminated section header '" + line + "'"});
                section_valid = false;
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            section_valid = s.count(section) > 0;
            if (!section_valid)
                issues.push_back({line_no, "unknown section [" + section + "] (did you mean [" +
                                               nearest(section, s) + "]?)"});
            else
                sections_seen.insert(section);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line_no, "expected key = value, got '" + line + "'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            issues.push_back({line_no, "key '" + key + "' appears before any [section]"});
            continue;
        }
        if (!section_valid) continue;

        const auto& fields = s.at(section);
        const auto it = fields.find(key);
        if (it == fields.end()) {
            issues.push_back({line_no, "unknown key '" + key + "' in [" + section + "] (nearest valid key: '" +
                                           nearest(key, fields) + "')"});
            continue;
        }
        if (!keys_seen.insert({section, key}).second)
            issues.push_back({line_no, "duplicate key '" + key + "' in [" + section + "]"});
        try {
            it->second.set(c, value);
        } catch (const std::exception& e) {
            issues.push_back({line_no, "key '" + key + "' " + e.what()});
        }
    }

    if (issues.empty()) {
        const std::string env = to_string(c.environment);
        if (keys_seen.count({"run", "environment"}) && !sections_seen.count(env))
            issues.push_back({0, "missing [" + env + "] block for environment '" + env + "'"});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({{0, "cannot open config file '" + path + "'"}});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::string out;
    for (const char* sec : {"run", "stepsize", "drift", "placement", "execution", "bounds"}) {
        out += std::string(out.empty() ? "" : "\n") + "[" + sec + "]\n";
        for (const auto& [key, field] : schema().at(sec)) out += key + " = " + field.get(c) + "\n";
    }
    return out;
}

std::int64_t effective_cadence(const ExperimentConfig& c) {
    if (c.cadence > 0) return c.cadence;
    return c.environment == EnvironmentKind::execution ? 100 : 1;
}

void validate_config(const ExperimentConfig& c) {
    std::vector<ConfigIssue> issues;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) issues.push_back({0, msg});
    };
    check(c.paths >= 1, "paths must be >= 1");
    check(c.workers >= 1, "workers must be >= 1");
    check(c.episodes >= 1, "episodes must be >= 1");
    check(c.cadence >= 0, "cadence must be >= 0");
    const std::int64_t cadence = effective_cadence(c);
    check(!c.runs.empty(), "runs must not be empty");
    if (c.environment == EnvironmentKind::execution)
        check(c.exec_run.iterations % cadence == 0, "cadence must divide execution iterations");
    else
        check(c.episodes % cadence == 0, "cadence must divide episodes");
    try {
        c.drift.validate();
        c.placement.validate();
        c.execution.validate();
        StepSizeConfig st = c.engine.stepsize;
        StepSizePolicy probe(st, 1);
        (void)probe;
        check(c.engine.saga_depth >= 1, "saga_depth must be >= 1");
    } catch (const std::exception& e) {
        issues.push_back({0, e.what()});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace sastep
