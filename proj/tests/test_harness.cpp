#include "fixtures.hpp"

#include "worstpath/errors.hpp"
#include "worstpath/format.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace worstpath;
using namespace fixtures;

namespace {

double dg_rate(const Environment& env, const StochasticPolicy& pi, const std::vector<StateId>& targets) {
    std::size_t ok = 0;
    for (StateId t : targets) ok += direct_generate(env.mdp, pi, t).success;
    return 100.0 * static_cast<double>(ok) / static_cast<double>(targets.size());
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("worstpath_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("direct generation on the example") {
    const auto env = example();
    const auto pi = StochasticPolicy::from_base(env.base);
    const auto dg = direct_generate(env.mdp, pi, A);
    CHECK(dg.success);
    CHECK(route_length(dg.tree) == 4);
    const auto leaf = direct_generate(env.mdp, pi, C);
    CHECK(leaf.success);
    CHECK(route_length(leaf.tree) == 0);
}

TEST_CASE("route lengths") {
    const auto env = example();
    CHECK(route_length(example_left(env)) == 4);
    CHECK_THROWS_AS(route_length(example_right(env)), NotSolvedError);
    const auto chain = linear_chain();
    CHECK(route_length(direct_generate(chain.mdp, StochasticPolicy::from_base(chain.base), state_id(0)).tree) == 3);
}

TEST_CASE("base policy fails on a dead-end heavy env") {
    EnvConfig cfg;
    cfg.num_states = 200;
    cfg.dead_end_fraction = 1.0;
    cfg.seed = 3;
    const auto env = generate(cfg);
    const auto targets = solvable_states(env.mdp);
    CHECK(dg_rate(env, StochasticPolicy::from_base(env.base), targets) < 50.0);
}

TEST_CASE("trained policy solves the example") {
    const auto env = load("example_shortcut.env");
    TrainConfig cfg;
    cfg.iterations = 20;
    const std::vector<StateId> roots{A};
    const auto result = train(env.mdp, env.base, roots, cfg);
    const auto dg = direct_generate(env.mdp, result.policy, A);
    CHECK(dg.success);
    CHECK(route_length(dg.tree) == 1);
}

TEST_CASE("budget one on a one-step root") {
    TreeMdp mdp(0.9, {false, true}, {{{state_id(1)}}, {}});
    const auto res = budgeted_search(mdp, StochasticPolicy::uniform(mdp), state_id(0), 1, Rng(0));
    CHECK(res.success);
    CHECK(res.calls_used == 1);
}

TEST_CASE("budget never exceeded and zero budget rejected") {
    const auto env = benchmark(0, 100);
    const auto pi = StochasticPolicy::from_base(env.base);
    for (StateId t : solvable_states(env.mdp)) {
        for (std::size_t b : {1u, 3u, 10u}) {
            const auto res = budgeted_search(env.mdp, pi, t, b, Rng(1).split(index(t)));
            CHECK(res.calls_used <= b);
            if (res.success) CHECK(is_successful(res.tree));
        }
    }
    CHECK_THROWS_AS(budgeted_search(env.mdp, pi, state_id(0), 0, Rng(0)), ConfigError);
}

TEST_CASE("success is monotone in budget") {
    const auto env = benchmark(1, 200);
    const auto pi = StochasticPolicy::from_base(env.base);
    const auto targets = solvable_states(env.mdp);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        std::size_t previous = 0;
        for (std::size_t b : {10u, 50u, 100u}) {
            std::size_t ok = 0;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                ok += budgeted_search(env.mdp, pi, targets[i], b, Rng(seed).split(i)).success;
            }
            CHECK(ok >= previous);
            previous = ok;
        }
    }
}

TEST_CASE("greedy attempt comes first") {
    const auto env = benchmark(4, 200);
    const auto pi = StochasticPolicy::from_base(env.base);
    for (StateId t : solvable_states(env.mdp)) {
        if (direct_generate(env.mdp, pi, t).success) {
            CHECK(budgeted_search(env.mdp, pi, t, kDefaultEvalMaxSteps, Rng(0)).success);
        }
    }
}

TEST_CASE("trained beats untrained at budget 100") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        EvalConfig cfg;
        cfg.env.num_states = 200;
        cfg.env.seed = seed;
        cfg.budgets = {100};
        cfg.seeds = {seed};
        cfg.train.iterations = 40;
        const double trained = run_experiment(cfg).budgets.back().success_rate;
        cfg.untrained = true;
        const double untrained = run_experiment(cfg).budgets.back().success_rate;
        CHECK(trained > untrained);
    }
}

TEST_CASE("snapshot round trip") {
    const auto env = benchmark(5, 60);
    TrainConfig cfg;
    cfg.iterations = 5;
    const auto result = train(env.mdp, env.base, training_roots(env.mdp, 1.0, 5), cfg);
    const auto doc = serialize_snapshot(env, result.policy, &result.learner.main);
    const auto snap = deserialize_snapshot(doc);
    CHECK(snap.env == env);
    CHECK(snap.policy == result.policy);
    REQUIRE(snap.values);
    CHECK(*snap.values == result.learner.main);
    CHECK(serialize_snapshot(snap.env, snap.policy, &*snap.values) == doc);
    CHECK_FALSE(deserialize_snapshot(serialize_snapshot(env, result.policy, nullptr)).values);
}

TEST_CASE("snapshot defects") {
    const auto env = example();
    std::string doc = serialize_snapshot(env, StochasticPolicy::from_base(env.base), nullptr);
    CHECK_THROWS_AS(deserialize_snapshot(doc + "pi 0 0.5\n"), Error);
    CHECK_THROWS_AS(deserialize_snapshot(doc + "v 0 nan?\n"), ParseError);
}

TEST_CASE("training roots are nested prefixes") {
    const auto env = benchmark(2, 300);
    const auto all = training_roots(env.mdp, 1.0, 2);
    const auto some = training_roots(env.mdp, 0.1, 2);
    const auto few = training_roots(env.mdp, 0.01, 2);
    CHECK(std::equal(few.begin(), few.end(), some.begin()));
    CHECK(std::equal(some.begin(), some.end(), all.begin()));
    CHECK(few.size() >= 1);
    for (StateId s : all) CHECK_FALSE(env.mdp.is_building_block(s));
}

TEST_CASE("eval config errors") {
    EvalConfig cfg;
    cfg.seeds = {};
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    cfg = {};
    cfg.budgets = {0};
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    cfg = {};
    cfg.train_fraction = 0.0;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    cfg = {};
    cfg.env_file = "/nonexistent/env.txt";
    CHECK_THROWS_AS(run_experiment(cfg), IoError);
}

TEST_CASE("reports are reproducible and parse back") {
    const auto dir = scratch_dir("report");
    EvalConfig cfg;
    cfg.env.num_states = 80;
    cfg.budgets = {10, 50};
    cfg.train.iterations = 10;
    cfg.seeds = {0, 1};
    cfg.out = (dir / "report.csv").string();
    const auto first = run_experiment(cfg);
    const auto a0 = read_file((dir / "report_seed0.csv").string());
    const auto a1 = read_file((dir / "report_seed1.csv").string());
    run_experiment(cfg);
    CHECK(read_file((dir / "report_seed0.csv").string()) == a0);
    CHECK(read_file((dir / "report_seed1.csv").string()) == a1);

    std::istringstream in(a0);
    std::string line;
    std::getline(in, line);
    CHECK(line == "target,budget,success,calls,route_length,worst_path_return");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        REQUIRE(fields.size() == 6);
        CHECK(parse_unsigned(fields[0]));
        CHECK((fields[1] == "dg" || parse_unsigned(fields[1])));
        const bool success = fields[2] == "1";
        const auto ret = parse_double(fields[5]);
        REQUIRE(ret);
        CHECK((success ? *ret > 0.0 : *ret == 0.0));
        if (success && fields[1] != "dg") CHECK(*parse_unsigned(fields[4]) >= 1);
        ++rows;
    }
    CHECK(rows == first.rows.size() / 2);
    for (const auto& b : first.budgets) {
        CHECK(b.success_rate >= 0.0);
        CHECK(b.success_rate <= 100.0);
    }
}

TEST_CASE("summary output") {
    EvalReport report;
    report.budgets = {BudgetSummary{std::nullopt, 50.0, 2.5}, BudgetSummary{100, 75.0, 2.25}};
    std::ostringstream os;
    write_summary(os, report);
    CHECK(os.str().find("dg") != std::string::npos);
    CHECK(os.str().find("75") != std::string::npos);
}

TEST_CASE("data fraction sweep is monotone on average") {
    std::vector<double> mean(5, 0.0);
    const std::vector<double> fractions{0.01, 0.02, 0.05, 0.1, 1.0};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto env = benchmark(seed);
        const auto targets = solvable_states(env.mdp);
        for (std::size_t i = 0; i < fractions.size(); ++i) {
            TrainConfig cfg;
            cfg.seed = seed;
            const auto result = train(env.mdp, env.base, training_roots(env.mdp, fractions[i], seed), cfg);
            mean[i] += dg_rate(env, result.policy, targets) / 3.0;
        }
    }
    std::size_t inversions = 0;
    for (std::size_t i = 1; i < mean.size(); ++i) {
        if (mean[i] < mean[i - 1]) {
            ++inversions;
            CHECK(mean[i - 1] - mean[i] <= 2.0);
        }
    }
    CHECK(inversions <= 1);
}

TEST_CASE("beta sweep keeps positive coefficients ahead of cloning") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(seed);
        const auto env = benchmark(seed);
        const auto targets = solvable_states(env.mdp);
        const auto roots = training_roots(env.mdp, 1.0, seed);
        std::vector<double> rates;
        for (double beta : {0.0, 2.0, 5.0, 10.0, 20.0}) {
            TrainConfig cfg;
            cfg.seed = seed;
            cfg.beta = beta;
            rates.push_back(dg_rate(env, train(env.mdp, env.base, roots, cfg).policy, targets));
        }
        for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] >= rates[0]);
    }
}

TEST_CASE("estimated depth tracks realised depth") {
    const auto env = benchmark(0);
    TrainConfig cfg;
    const auto result = train(env.mdp, env.base, training_roots(env.mdp, 1.0, 0), cfg);
    std::vector<double> xs, ys;
    for (StateId s : solvable_states(env.mdp)) {
        const auto dg = direct_generate(env.mdp, result.policy, s);
        const double v = result.learner.main[s];
        if (!dg.success || v <= 0.0) continue;
        xs.push_back(estimated_depth(v, env.mdp.gamma()));
        ys.push_back(static_cast<double>(dg.tree.height()));
    }
    REQUIRE(xs.size() > 10);
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    CHECK(sxy / std::sqrt(sxx * syy) > 0.5);
}

}
