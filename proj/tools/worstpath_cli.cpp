#include "worstpath/campaigns.hpp"
#include "worstpath/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace worstpath;

namespace {

struct EnvOptions {
    std::string file;
    std::size_t states = 500;
    std::uint64_t seed = 0;
    double gamma = 0.95;

    void add(CLI::App& app, bool seed_flag = true) {
        app.add_option("--env", file, "Environment file (otherwise one is generated)");
        app.add_option("--states", states, "States of the generated environment")->check(CLI::PositiveNumber);
        if (seed_flag) app.add_option("--seed", seed, "Generator seed");
        app.add_option("--gamma", gamma, "Discount factor of the generated environment");
    }

    EnvConfig config() const {
        EnvConfig cfg;
        cfg.num_states = states;
        cfg.seed = seed;
        cfg.gamma = gamma;
        return cfg;
    }

    Environment load() const { return file.empty() ? generate(config()) : deserialize(read_file(file)); }
};

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file(out, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-path planning in tree MDPs"};
    app.require_subcommand(1);

    EnvOptions gen_env;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate an environment file");
    gen_env.add(*gen);
    gen->add_option("--out", gen_out, "Output path (default stdout)");

    EnvOptions train_env;
    TrainConfig train_cfg;
    double train_fraction = 1.0;
    std::string train_out, train_metrics;
    auto* tr = app.add_subcommand("train", "Train a policy and write a snapshot");
    train_env.add(*tr, false);
    tr->add_option("--seed", train_cfg.seed, "Seed for the generator and the training loop");
    tr->add_option("--beta", train_cfg.beta, "Advantage coefficient");
    tr->add_option("--iterations", train_cfg.iterations, "Training iterations");
    tr->add_option("--fraction", train_fraction, "Share of non-building-block states used as roots");
    tr->add_option("--metrics", train_metrics, "Per-iteration metrics CSV");
    tr->add_option("--out", train_out, "Snapshot path (default stdout)");

    EnvOptions eval_env;
    EvalConfig eval_cfg;
    std::vector<std::uint64_t> eval_seeds;
    std::vector<std::size_t> eval_budgets;
    auto* ev = app.add_subcommand("eval", "Evaluate direct generation and budgeted search");
    eval_env.add(*ev, false);
    ev->add_option("--snapshot", eval_cfg.snapshot_file, "Policy snapshot to evaluate");
    ev->add_flag("--untrained", eval_cfg.untrained, "Evaluate the base policy");
    ev->add_option("--seed", eval_seeds, "Seeds (repeatable); the first also seeds a generated environment");
    bool dg_only = false;
    ev->add_option("--budget", eval_budgets, "Model-call budgets (repeatable)");
    ev->add_flag("--dg-only", dg_only, "Direct generation only, no budgeted search")->excludes("--budget");
    ev->add_option("--beta", eval_cfg.train.beta, "Advantage coefficient when training");
    ev->add_option("--iterations", eval_cfg.train.iterations, "Training iterations when training");
    ev->add_option("--fraction", eval_cfg.train_fraction, "Share of roots used when training");
    ev->add_option("--max-steps", eval_cfg.max_steps, "Expansion cap per rollout");
    ev->add_option("--out", eval_cfg.out, "Report CSV path");

    std::uint64_t check_seed = 0;
    auto* oc = app.add_subcommand("oracle-check", "Run the randomized property campaigns");
    oc->add_option("--seed", check_seed, "Campaign seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const Environment env = gen_env.load();
            emit(gen_out, serialize(env.mdp, env.base));
        } else if (*tr) {
            train_env.seed = train_cfg.seed;
            const Environment env = train_env.load();
            const auto roots = training_roots(env.mdp, train_fraction, train_cfg.seed);
            const TrainResult result = train(env.mdp, env.base, roots, train_cfg);
            if (!train_metrics.empty()) {
                std::ostringstream os;
                write_metrics_csv(os, result.metrics);
                write_file(train_metrics, os.str());
            }
            emit(train_out, serialize_snapshot(env, result.policy, &result.learner.main));
            if (!result.metrics.empty() && !train_out.empty()) {
                const auto& m = result.metrics.back();
                std::cout << "iterations " << m.iteration << " dg_success " << m.dg_success_rate
                          << "% buffer " << m.buffer_size << '\n';
            }
        } else if (*ev) {
            if (!eval_seeds.empty()) eval_cfg.seeds = eval_seeds;
            if (!eval_budgets.empty() || dg_only) eval_cfg.budgets = eval_budgets;
            eval_cfg.env_file = eval_env.file;
            eval_env.seed = eval_cfg.seeds.front();
            eval_cfg.env = eval_env.config();
            write_summary(std::cout, run_experiment(eval_cfg));
        } else if (*oc) {
            using namespace worstpath::oracle;
            const CampaignResult results[] = {
                contraction_campaign(check_seed, 1000),  fixed_point_campaign(check_seed + 1, 100),
                brute_force_campaign(check_seed + 2, 100), improvement_campaign(check_seed + 3, 200),
                rollout_campaign(check_seed + 4, 100),
            };
            bool ok = true;
            for (const auto& r : results) {
                print_campaign(std::cout, r);
                ok = ok && r.passed();
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
