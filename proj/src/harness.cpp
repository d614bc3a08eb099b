#include "worstpath/harness.hpp"

#include "worstpath/format.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace worstpath {

GenerationResult direct_generate(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root,
                                 std::size_t max_steps) {
    SynTree tree = explore_greedy(mdp, pi, root, max_steps);
    const bool ok = is_successful(tree);
    return {ok, std::move(tree)};
}

SearchResult budgeted_search(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t budget,
                             const Rng& rng, std::size_t max_steps) {
    if (budget == 0) throw ConfigError("budget must be at least 1");
    std::optional<SynTree> best;
    double best_return = -1.0;
    std::size_t used = 0;
    for (std::uint64_t attempt = 0;; ++attempt) {
        const ExploreOptions opts{std::min(max_steps, budget - used), true};
        Rng attempt_rng = rng.split(attempt);
        SynTree tree = attempt == 0
                           ? explore_with(mdp, root, opts, [&](StateId s) { return pi.argmax(s); })
                           : explore_with(mdp, root, opts, [&](StateId s) { return pi.sample(s, attempt_rng); });
        used += tree.num_expanded();
        if (is_successful(tree)) return {true, std::move(tree), used};
        const double ret = tree_worst_path_return(tree, mdp);
        if (!best || ret > best_return) {
            best_return = ret;
            best = std::move(tree);
        }
        if (used >= budget) break;
    }
    return {false, std::move(*best), used};
}

std::size_t route_length(const SynTree& tree) {
    if (!is_successful(tree)) throw NotSolvedError("route length requested for an unsuccessful tree");
    return tree.num_expanded();
}

std::vector<StateId> solvable_states(const TreeMdp& mdp) {
    const ValueTable v = value_iteration(mdp);
    std::vector<StateId> out;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (!mdp.building_blocks()[s] && v.values[s] > 0.0) out.push_back(state_id(s));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string serialize_snapshot(const Environment& env, const StochasticPolicy& pi, const ValueTable* values) {
    std::ostringstream os;
    os << serialize(env.mdp, env.base);
    for (std::size_t s = 0; s < pi.probs.size(); ++s) {
        if (pi.probs[s].empty()) continue;
        os << "pi " << s;
        for (double p : pi.probs[s]) os << ' ' << format_double(p);
        os << '\n';
    }
    if (values) {
        for (std::size_t s = 0; s < values->size(); ++s) os << "v " << s << ' ' << format_double(values->values[s]) << '\n';
    }
    return os.str();
}

Snapshot deserialize_snapshot(std::string_view doc) {
    // Policy and value lines are blanked out so the environment reader keeps
    // the original line numbers in its errors.
    std::string env_doc;
    env_doc.reserve(doc.size());
    std::map<std::size_t, std::vector<double>> pi_rows;
    std::map<std::size_t, double> v_rows;
    std::size_t line_no = 0, pos = 0;
    while (pos < doc.size()) {
        std::size_t nl = doc.find('\n', pos);
        const bool terminated = nl != std::string_view::npos;
        if (!terminated) nl = doc.size();
        ++line_no;
        const std::string_view line = doc.substr(pos, nl - pos);
        pos = nl + 1;
        const auto toks = split_tokens(line);
        const bool ours = !toks.empty() && (toks[0] == "pi" || toks[0] == "v");
        if (ours && terminated) {
            if (toks.size() < 2) throw ParseError(line_no, "expected a state id");
            const auto s = parse_unsigned(toks[1]);
            if (!s) throw ParseError(line_no, "expected a state id, got '" + std::string(toks[1]) + "'");
            if (toks[0] == "pi") {
                std::vector<double> probs;
                for (std::size_t i = 2; i < toks.size(); ++i) {
                    const auto p = parse_double(toks[i]);
                    if (!p) throw ParseError(line_no, "expected a number, got '" + std::string(toks[i]) + "'");
                    probs.push_back(*p);
                }
                if (!pi_rows.emplace(*s, std::move(probs)).second) throw ParseError(line_no, "duplicate pi line");
            } else {
                const auto v = toks.size() == 3 ? parse_double(toks[2]) : std::nullopt;
                if (!v) throw ParseError(line_no, "expected 'v <s> <value>'");
                if (!v_rows.emplace(*s, *v).second) throw ParseError(line_no, "duplicate v line");
            }
            env_doc += '\n';
        } else {
            env_doc.append(line);
            if (terminated) env_doc += '\n';
        }
    }

    Snapshot snap{deserialize(env_doc), {}, std::nullopt};
    const TreeMdp& mdp = snap.env.mdp;
    snap.policy = StochasticPolicy::from_base(snap.env.base);
    for (auto& [s, probs] : pi_rows) {
        if (s >= mdp.num_states()) throw ParseError(line_no, "pi line for unknown state " + std::to_string(s));
        snap.policy.probs[s] = std::move(probs);
    }
    std::vector<std::string> violations;
    for (const auto& v : validate(mdp, snap.policy)) violations.push_back(v.describe());
    if (!violations.empty()) throw ValidationError(std::move(violations));
    if (!v_rows.empty()) {
        ValueTable v(mdp.num_states(), 0.0);
        if (v_rows.size() != mdp.num_states()) throw ParseError(line_no, "value table does not cover every state");
        for (auto [s, x] : v_rows) {
            if (s >= mdp.num_states()) throw ParseError(line_no, "v line for unknown state " + std::to_string(s));
            v.values[s] = x;
        }
        snap.values = std::move(v);
    }
    return snap;
}

// ---------------------------------------------------------------------------

void check_config(const EvalConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0)) throw ConfigError("fraction must lie in (0,1]");
    if (cfg.max_steps == 0) throw ConfigError("max_steps must be positive");
    for (std::size_t b : cfg.budgets) {
        if (b == 0) throw ConfigError("budgets must be positive");
    }
}

std::vector<StateId> training_roots(const TreeMdp& mdp, double fraction, std::uint64_t seed) {
    std::vector<StateId> pool;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (!mdp.building_blocks()[s]) pool.push_back(state_id(s));
    }
    Rng rng = Rng(seed).split(0x726f6f74);
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.uniform_index(i)]);
    const auto keep = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pool.size()))), 1, pool.size());
    pool.resize(keep);
    return pool;
}

namespace {

std::string seed_path(const std::string& out, std::uint64_t seed, bool many) {
    if (!many) return out;
    const std::filesystem::path p(out);
    return (p.parent_path() / (p.stem().string() + "_seed" + std::to_string(seed) + p.extension().string())).string();
}

}  // namespace

EvalReport run_experiment(const EvalConfig& cfg) {
    check_config(cfg);
    std::optional<Snapshot> snapshot;
    Environment env;
    if (!cfg.snapshot_file.empty()) {
        snapshot = deserialize_snapshot(read_file(cfg.snapshot_file));
        env = snapshot->env;
    } else if (!cfg.env_file.empty()) {
        env = deserialize(read_file(cfg.env_file));
    } else {
        env = generate(cfg.env);
    }
    const TreeMdp& mdp = env.mdp;
    const std::vector<StateId> targets = cfg.targets.empty() ? solvable_states(mdp) : cfg.targets;
    if (targets.empty()) throw ConfigError("no evaluation targets");

    std::vector<std::optional<std::size_t>> budgets{std::nullopt};
    for (std::size_t b : cfg.budgets) budgets.emplace_back(b);

    EvalReport report;
    std::vector<double> rate_sum(budgets.size(), 0.0);
    std::vector<double> length_sum(budgets.size(), 0.0);
    std::size_t length_count = 0;

    for (std::uint64_t seed : cfg.seeds) {
        StochasticPolicy pi;
        if (snapshot) {
            pi = snapshot->policy;
        } else if (cfg.untrained) {
            pi = StochasticPolicy::from_base(env.base);
        } else {
            TrainConfig tc = cfg.train;
            tc.seed = seed;
            const auto roots = training_roots(mdp, cfg.train_fraction, seed);
            pi = train(mdp, env.base, roots, tc).policy;
        }

        std::vector<TargetOutcome> rows;
        const Rng search_rng = Rng(seed).split(0x6576616c);
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                const StateId t = targets[ti];
                TargetOutcome row;
                row.seed = seed;
                row.target = t;
                row.budget = budgets[bi];
                if (!budgets[bi]) {
                    auto dg = direct_generate(mdp, pi, t, cfg.max_steps);
                    row.success = dg.success;
                    row.calls = dg.tree.num_expanded();
                    row.worst_path_return = tree_worst_path_return(dg.tree, mdp);
                } else {
                    auto sr = budgeted_search(mdp, pi, t, *budgets[bi], search_rng.split(ti), cfg.max_steps);
                    row.success = sr.success;
                    row.calls = sr.calls_used;
                    row.worst_path_return = tree_worst_path_return(sr.tree, mdp);
                    if (sr.success) row.route_length = route_length(sr.tree);
                }
                if (!budgets[bi] && row.success) row.route_length = row.calls;
                rows.push_back(row);
            }
        }

        // Route lengths compare only the targets every budget solved.
        for (std::size_t ti = 0; ti < targets.size(); ++ti) {
            bool all = true;
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) all = all && rows[bi * targets.size() + ti].success;
            if (!all) continue;
            ++length_count;
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                length_sum[bi] += static_cast<double>(rows[bi * targets.size() + ti].route_length);
            }
        }
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            std::size_t solved = 0;
            for (std::size_t ti = 0; ti < targets.size(); ++ti) solved += rows[bi * targets.size() + ti].success;
            rate_sum[bi] += 100.0 * static_cast<double>(solved) / static_cast<double>(targets.size());
        }

        if (!cfg.out.empty()) {
            std::ostringstream os;
            write_report_csv(os, rows);
            write_file(seed_path(cfg.out, seed, cfg.seeds.size() > 1), os.str());
        }
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }

    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
        BudgetSummary b;
        b.budget = budgets[bi];
        b.success_rate = rate_sum[bi] / static_cast<double>(cfg.seeds.size());
        b.mean_route_length = length_count ? length_sum[bi] / static_cast<double>(length_count) : 0.0;
        report.budgets.push_back(b);
    }
    return report;
}

void write_report_csv(std::ostream& os, std::span<const TargetOutcome> rows) {
    os << "target,budget,success,calls,route_length,worst_path_return\n";
    for (const auto& r : rows) {
        os << index(r.target) << ',' << (r.budget ? std::to_string(*r.budget) : std::string("dg")) << ','
           << (r.success ? 1 : 0) << ',' << r.calls << ',' << r.route_length << ','
           << format_double(r.worst_path_return) << '\n';
    }
}

void write_summary(std::ostream& os, const EvalReport& report) {
    os << "budget      success%  mean_route_length\n";
    for (const auto& b : report.budgets) {
        std::string label = b.budget ? std::to_string(*b.budget) : std::string("dg");
        label.resize(12, ' ');
        std::string rate = format_double(std::round(b.success_rate * 100.0) / 100.0);
        rate.resize(10, ' ');
        os << label << rate << format_double(std::round(b.mean_route_length * 1000.0) / 1000.0) << '\n';
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace worstpath
