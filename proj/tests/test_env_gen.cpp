#include "fixtures.hpp"

#include "worstpath/errors.hpp"

#include <doctest.h>

#include <sstream>

using namespace worstpath;
using namespace fixtures;

namespace {

std::vector<std::string> lines_of(const std::string& doc) {
    std::vector<std::string> out;
    std::istringstream in(doc);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("env_gen") {

TEST_CASE("generated building block count") {
    EnvConfig cfg;
    cfg.num_states = 20;
    cfg.bb_fraction = 0.4;
    cfg.seed = 1;
    const auto env = generate(cfg);
    const auto& bb = env.mdp.building_blocks();
    CHECK(bb.size() == 20);
    CHECK(std::count(bb.begin(), bb.end(), true) == 8);
}

TEST_CASE("generated envs validate") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EnvConfig cfg;
        cfg.num_states = 10 + 13 * seed;
        cfg.seed = seed;
        const auto env = generate(cfg);
        CHECK(validate(env.mdp).empty());
        CHECK(validate(env.mdp, env.base).empty());
    }
}

TEST_CASE("half the non-terminal states are solvable") {
    const auto env = benchmark(5, 200);
    const auto bb = env.mdp.building_blocks();
    const auto non_terminal = static_cast<std::size_t>(std::count(bb.begin(), bb.end(), false));
    CHECK(2 * solvable_states(env.mdp).size() >= non_terminal);
}

TEST_CASE("same seed, same bytes") {
    const auto a = benchmark(7, 100), b = benchmark(7, 100);
    CHECK(serialize(a.mdp, a.base) == serialize(b.mdp, b.base));
    const auto c = benchmark(8, 100);
    CHECK(serialize(a.mdp, a.base) != serialize(c.mdp, c.base));
}

TEST_CASE("config errors") {
    EnvConfig cfg;
    cfg.num_states = 1;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
    cfg = {};
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
    cfg = {};
    cfg.child_count_weights = {};
    CHECK_THROWS_AS(generate(cfg), ConfigError);
    cfg = {};
    cfg.bb_fraction = 1.5;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("serialized children match the model") {
    const auto env = benchmark(42, 100);
    std::size_t s = 0;
    while (env.mdp.is_building_block(state_id(s))) ++s;
    const std::string prefix = "t " + std::to_string(s) + " 0 -> ";
    std::string found;
    for (const auto& line : lines_of(serialize(env.mdp, env.base))) {
        if (line.starts_with(prefix)) found = line.substr(prefix.size());
    }
    std::string expected;
    for (StateId c : expand(env.mdp, state_id(s), a0)) {
        expected += (expected.empty() ? "" : " ") + std::to_string(index(c));
    }
    CHECK(found == expected);
}

TEST_CASE("two-state document header") {
    TreeMdp mdp(0.9, {false, true}, {{{state_id(1)}}, {}});
    const auto doc = serialize(mdp, BasePolicy{{{1.0}, {}}});
    CHECK(lines_of(doc).front() == "states 2 gamma 0.9");
}

TEST_CASE("round trip") {
    const auto env = benchmark(42, 300);
    const auto doc = serialize(env.mdp, env.base);
    const auto back = deserialize(doc);
    CHECK(back == env);
    CHECK(serialize(back.mdp, back.base) == doc);
}

TEST_CASE("fixture parses to eight states") {
    const auto env = example();
    CHECK(env.mdp.num_states() == 8);
    CHECK(env.mdp.gamma() == 0.95);
    CHECK(env.mdp.building_blocks() == std::vector<bool>{false, false, true, true, false, true, false, true});
}

TEST_CASE("truncated document names its last line") {
    const auto env = benchmark(2, 40);
    std::string doc = serialize(env.mdp, env.base);
    const auto n = lines_of(doc).size();
    doc.resize(doc.size() - 3);
    try {
        deserialize(doc);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == n);
    }
}

TEST_CASE("missing sections are parse errors") {
    CHECK_THROWS_AS(deserialize(""), ParseError);
    CHECK_THROWS_AS(deserialize("states 2 gamma 0.9\nt 0 0 -> 1\npi0 0 1\n"), ParseError);
    CHECK_THROWS_AS(deserialize("states 2 gamma 0.9\nbb 1\nt 0 0 -> 1\n"), ParseError);
    CHECK_THROWS_AS(deserialize("states 2 gamma 0.9\nbb 1\nt 0 1 -> 1\npi0 0 1\n"), ParseError);
    CHECK_THROWS_AS(deserialize("states 2 gamma zero\nbb 1\nt 0 0 -> 1\npi0 0 1\n"), ParseError);
    CHECK_THROWS_AS(deserialize("states 2 gamma 0.9\nbb 1\nx 0 0 -> 1\npi0 0 1\n"), ParseError);
}

TEST_CASE("negative probability is a validation error") {
    const std::string doc = "states 2 gamma 0.9\nbb 1\nt 0 0 -> 1\nt 0 1 -> 1\npi0 0 -0.5 1.5\n";
    CHECK_THROWS_AS(deserialize(doc), ValidationError);
}

TEST_CASE("structural defects are validation errors") {
    CHECK_THROWS_AS(deserialize("states 2 gamma 0.9\nbb 1\nt 0 0 -> 7\npi0 0 1\n"), ValidationError);
    CHECK_THROWS_AS(deserialize("states 2 gamma 0.9\nbb 1\nt 0 0 -> 1\npi0 0 0.4\n"), ValidationError);
}

TEST_CASE("comments and blank lines are ignored") {
    const auto env = deserialize("# note\n\nstates 2 gamma 0.9\nbb 1\n\nt 0 0 -> 1\npi0 0 1\n");
    CHECK(env.mdp.num_states() == 2);
}

}
