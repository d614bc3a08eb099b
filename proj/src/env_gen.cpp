#include "worstpath/env_gen.hpp"

#include "worstpath/format.hpp"
#include "worstpath/rng.hpp"
#include "worstpath/values.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace worstpath {

namespace {

constexpr int kMaxAttempts = 100;

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

std::size_t draw_child_count(const std::vector<double>& weights, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i + 1;
    }
    return weights.size();
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[rng.uniform_index(v.size())];
}

struct Draft {
    std::vector<bool> bb;
    std::vector<std::vector<ChildList>> trans;
    std::vector<std::optional<std::size_t>> safe_action;
};

Draft draft_model(const EnvConfig& cfg, Rng& rng) {
    const std::size_t n = cfg.num_states;
    std::vector<StateId> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = state_id(i);
    shuffle(perm, rng);

    const auto n_bb = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(cfg.bb_fraction * n)), 1, n - 1);
    const std::size_t n_nonbb = n - n_bb;
    std::size_t n_trap = 0;
    if (cfg.dead_end_fraction > 0.0 && n_nonbb >= 2) {
        n_trap = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(cfg.trap_fraction * n_nonbb)), 1,
                                         n_nonbb - 1);
    }
    const std::vector<StateId> bbs(perm.begin(), perm.begin() + n_bb);
    const std::vector<StateId> traps(perm.begin() + n_bb, perm.begin() + n_bb + n_trap);
    // Rank order: regular[r] may only decompose into building blocks and regular[< r].
    const std::vector<StateId> regular(perm.begin() + n_bb + n_trap, perm.end());

    Draft d;
    d.bb.assign(n, false);
    d.trans.assign(n, {});
    d.safe_action.assign(n, std::nullopt);
    for (StateId s : bbs) d.bb[index(s)] = true;

    const std::size_t max_k = cfg.max_actions_per_state;
    for (StateId t : traps) {
        const std::size_t k = 1 + rng.uniform_index(max_k);
        for (std::size_t a = 0; a < k; ++a) {
            const std::size_t c = draw_child_count(cfg.child_count_weights, rng);
            ChildList kids{pick(traps, rng)};
            for (std::size_t i = 1; i < c; ++i) kids.push_back(rng.bernoulli(0.5) ? pick(bbs, rng) : pick(traps, rng));
            d.trans[index(t)].push_back(std::move(kids));
        }
    }

    for (std::size_t r = 0; r < regular.size(); ++r) {
        const StateId s = regular[r];
        auto draw_child = [&]() {
            if (r == 0 || rng.bernoulli(cfg.bb_child_prob)) return pick(bbs, rng);
            return regular[rng.uniform_index(r)];
        };
        const bool dead_ends = !traps.empty() && rng.bernoulli(cfg.dead_end_fraction);
        std::size_t k = 1 + rng.uniform_index(max_k);
        if (dead_ends && k == 1 && max_k > 1) k = 2;
        const std::size_t safe = rng.uniform_index(k);
        d.safe_action[index(s)] = safe;

        std::vector<std::size_t> dead;
        if (dead_ends) {
            for (std::size_t a = 0; a < k; ++a) {
                if (a != safe && rng.bernoulli(0.5)) dead.push_back(a);
            }
            if (dead.empty() && k > 1) dead.push_back(safe == 0 ? 1 : 0);
        }
        for (std::size_t a = 0; a < k; ++a) {
            const std::size_t c = draw_child_count(cfg.child_count_weights, rng);
            ChildList kids;
            for (std::size_t i = 0; i < c; ++i) kids.push_back(draw_child());
            if (a != safe && r + 1 < regular.size() && rng.bernoulli(cfg.back_edge_prob)) {
                kids[rng.uniform_index(kids.size())] = regular[r + 1 + rng.uniform_index(regular.size() - r - 1)];
            }
            if (std::find(dead.begin(), dead.end(), a) != dead.end()) {
                kids[rng.uniform_index(kids.size())] = pick(traps, rng);
            }
            d.trans[index(s)].push_back(std::move(kids));
        }
    }
    return d;
}

BasePolicy draft_base_policy(const EnvConfig& cfg, const Draft& d, Rng& rng) {
    BasePolicy base;
    base.probs.resize(d.trans.size());
    for (std::size_t s = 0; s < d.trans.size(); ++s) {
        const std::size_t k = d.trans[s].size();
        if (k == 0) continue;
        // The safe action (or action 0 for traps) is never masked.
        const std::size_t keep = d.safe_action[s].value_or(0);
        std::vector<double> logits(k);
        std::vector<bool> masked(k, false);
        for (std::size_t a = 0; a < k; ++a) {
            logits[a] = rng.normal();
            masked[a] = a != keep && rng.bernoulli(cfg.masked_fraction);
        }
        double mx = -INFINITY;
        for (std::size_t a = 0; a < k; ++a) {
            if (!masked[a]) mx = std::max(mx, logits[a]);
        }
        std::vector<double> p(k, 0.0);
        double z = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            if (masked[a]) continue;
            p[a] = std::exp(logits[a] - mx);
            z += p[a];
        }
        for (double& x : p) x /= z;
        base.probs[s] = std::move(p);
    }
    return base;
}

double solvable_share(const TreeMdp& mdp) {
    const ValueTable v = value_iteration(mdp);
    std::size_t nonbb = 0, solvable = 0;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (mdp.building_blocks()[s]) continue;
        ++nonbb;
        if (v.values[s] > 0.0) ++solvable;
    }
    return nonbb ? static_cast<double>(solvable) / static_cast<double>(nonbb) : 0.0;
}

}  // namespace

void check_config(const EnvConfig& cfg) {
    if (cfg.num_states < 2) throw ConfigError("num_states must be at least 2");
    if (cfg.max_actions_per_state < 1) throw ConfigError("max_actions_per_state must be positive");
    if (!(cfg.bb_fraction > 0.0 && cfg.bb_fraction < 1.0)) throw ConfigError("bb_fraction must lie in (0,1)");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
    if (cfg.child_count_weights.empty()) throw ConfigError("child_count_weights is empty");
    double sum = 0.0;
    for (double w : cfg.child_count_weights) {
        if (!(w >= 0.0)) throw ConfigError("child_count_weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("child_count_weights must sum to 1");
    for (double f : {cfg.dead_end_fraction, cfg.trap_fraction, cfg.bb_child_prob, cfg.back_edge_prob,
                     cfg.masked_fraction}) {
        if (!in_unit(f)) throw ConfigError("fractions must lie in [0,1]");
    }
}

Environment generate(const EnvConfig& cfg) {
    check_config(cfg);
    const Rng root(cfg.seed);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Rng rng = root.split(static_cast<std::uint64_t>(attempt));
        Draft d = draft_model(cfg, rng);
        BasePolicy base = draft_base_policy(cfg, d, rng);
        TreeMdp mdp(cfg.gamma, std::move(d.bb), std::move(d.trans));
        if (!validate(mdp).empty() || !validate(mdp, base).empty()) continue;
        if (solvable_share(mdp) < 0.5) continue;
        return {std::move(mdp), std::move(base)};
    }
    throw GenerationError("no solvable environment after " + std::to_string(kMaxAttempts) + " attempts");
}

std::string serialize(const TreeMdp& mdp, const BasePolicy& base) {
    std::ostringstream os;
    os << "states " << mdp.num_states() << " gamma " << format_double(mdp.gamma()) << '\n';
    os << "bb";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (mdp.building_blocks()[s]) os << ' ' << s;
    }
    os << '\n';
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const auto& acts = mdp.transitions()[s];
        for (std::size_t a = 0; a < acts.size(); ++a) {
            os << "t " << s << ' ' << a << " ->";
            for (StateId c : acts[a]) os << ' ' << index(c);
            os << '\n';
        }
    }
    for (std::size_t s = 0; s < base.probs.size(); ++s) {
        if (base.probs[s].empty()) continue;
        os << "pi0 " << s;
        for (double p : base.probs[s]) os << ' ' << format_double(p);
        os << '\n';
    }
    return os.str();
}

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

namespace {

struct EnvReader {
    std::optional<std::size_t> num_states;
    double gamma = 0.0;
    std::vector<bool> bb;
    std::vector<std::vector<ChildList>> trans;
    std::vector<std::optional<std::vector<double>>> pi0;
    bool saw_bb = false;

    std::size_t state_token(std::string_view tok, std::size_t line) const {
        const auto v = parse_unsigned(tok);
        if (!v) throw ParseError(line, "expected a state id, got '" + std::string(tok) + "'");
        if (*v >= *num_states) throw ParseError(line, "state id " + std::string(tok) + " out of range");
        return static_cast<std::size_t>(*v);
    }

    std::vector<double> probabilities(const std::vector<std::string_view>& toks, std::size_t from,
                                      std::size_t line) const {
        std::vector<double> out;
        for (std::size_t i = from; i < toks.size(); ++i) {
            const auto p = parse_double(toks[i]);
            if (!p) throw ParseError(line, "expected a number, got '" + std::string(toks[i]) + "'");
            out.push_back(*p);
        }
        return out;
    }

    /// Returns false when the line kind is not one of the environment kinds.
    bool consume(const std::vector<std::string_view>& toks, std::size_t line) {
        const std::string_view kind = toks[0];
        if (!num_states) {
            if (kind != "states" || toks.size() != 4 || toks[2] != "gamma") {
                throw ParseError(line, "expected header 'states <N> gamma <g>'");
            }
            const auto n = parse_unsigned(toks[1]);
            const auto g = parse_double(toks[3]);
            if (!n || !g) throw ParseError(line, "malformed header");
            num_states = static_cast<std::size_t>(*n);
            gamma = *g;
            bb.assign(*num_states, false);
            trans.assign(*num_states, {});
            pi0.assign(*num_states, std::nullopt);
            return true;
        }
        if (kind == "bb") {
            if (saw_bb) throw ParseError(line, "duplicate bb line");
            saw_bb = true;
            for (std::size_t i = 1; i < toks.size(); ++i) bb[state_token(toks[i], line)] = true;
            return true;
        }
        if (kind == "t") {
            if (toks.size() < 4 || toks[3] != "->") throw ParseError(line, "expected 't <s> <a> -> <children>'");
            const std::size_t s = state_token(toks[1], line);
            const auto a = parse_unsigned(toks[2]);
            if (!a) throw ParseError(line, "expected an action id");
            if (*a != trans[s].size()) {
                throw ParseError(line, "action " + std::string(toks[2]) + " of state " + std::string(toks[1]) +
                                           " out of order (expected " + std::to_string(trans[s].size()) + ")");
            }
            ChildList kids;
            for (std::size_t i = 4; i < toks.size(); ++i) {
                const auto c = parse_unsigned(toks[i]);
                if (!c) throw ParseError(line, "expected a child id, got '" + std::string(toks[i]) + "'");
                // Range is a model invariant, reported by validation.
                kids.push_back(state_id(static_cast<std::size_t>(*c)));
            }
            trans[s].push_back(std::move(kids));
            return true;
        }
        if (kind == "pi0") {
            if (toks.size() < 2) throw ParseError(line, "expected 'pi0 <s> <probs...>'");
            const std::size_t s = state_token(toks[1], line);
            if (pi0[s]) throw ParseError(line, "duplicate pi0 line for state " + std::string(toks[1]));
            pi0[s] = probabilities(toks, 2, line);
            return true;
        }
        return false;
    }

    Environment finish(std::size_t last_line) {
        if (!num_states) throw ParseError(last_line, "missing header");
        if (!saw_bb) throw ParseError(last_line, "unexpected end of document: missing bb line");
        BasePolicy base;
        base.probs.resize(*num_states);
        for (std::size_t s = 0; s < *num_states; ++s) {
            if (!trans[s].empty() && !pi0[s]) {
                throw ParseError(last_line, "unexpected end of document: no pi0 line for state " + std::to_string(s));
            }
            if (pi0[s]) base.probs[s] = *pi0[s];
        }
        TreeMdp mdp(gamma, std::move(bb), std::move(trans));
        std::vector<std::string> violations;
        for (const auto& v : validate(mdp)) violations.push_back(v.describe());
        if (violations.empty()) {
            for (const auto& v : validate(mdp, base)) violations.push_back(v.describe());
        }
        if (!violations.empty()) throw ValidationError(std::move(violations));
        return {std::move(mdp), std::move(base)};
    }
};

}  // namespace

Environment deserialize(std::string_view doc) {
    EnvReader reader;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < doc.size()) {
        const std::size_t nl = doc.find('\n', pos);
        ++line_no;
        if (nl == std::string_view::npos) {
            throw ParseError(line_no, "truncated line (no terminating newline)");
        }
        const std::string_view line = doc.substr(pos, nl - pos);
        pos = nl + 1;
        const auto toks = split_tokens(line);
        if (toks.empty() || toks[0].front() == '#') continue;
        if (!reader.consume(toks, line_no)) {
            throw ParseError(line_no, "unknown line kind '" + std::string(toks[0]) + "'");
        }
    }
    return reader.finish(line_no);
}

}  // namespace worstpath
