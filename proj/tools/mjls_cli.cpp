// mjls: moment (in)stability certificates for Markov jump linear systems.
//
//   mjls certify  config.json [--p P] [--eps E] [--out report.json] [--strict]
//   mjls optimize config.json [--p P] [--m M] [--restarts R] [--seed S] ...
//   mjls simulate config.json [--trials K] [--horizon T] [--csv traj.csv] ...
//   mjls sweep    config.json [--m-min A] [--m-max B] ...

#include "mjls/config.hpp"
#include "mjls/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::string config_path;
    std::optional<int> p;
    std::optional<int> m;
    std::optional<int> m_min;
    std::optional<int> m_max;
    std::optional<int> restarts;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<double> horizon;
    std::optional<double> eps;
    std::optional<int> threads;
    std::string out;
    std::string csv;
    bool strict = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("config", o.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--p", o.p, "lift degree p")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", o.eps, "Hurwitz decision margin (mu < -eps)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", o.seed, "master seed for optimizer and simulator");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", o.out, "write the JSON report here");
    cmd->add_flag("--strict", o.strict, "exit with code 2 on an Inconclusive verdict");
}

void apply(const Overrides& o, mjls::Task task, mjls::RunConfig& cfg) {
    cfg.task = task;
    if (o.p) {
        cfg.p = *o.p;
        cfg.sim.p = *o.p;
    }
    if (o.m) cfg.m = *o.m;
    if (o.m_min) cfg.m_min = *o.m_min;
    if (o.m_max) cfg.m_max = *o.m_max;
    if (cfg.m_max < cfg.m_min) throw mjls::ConfigError("m_range", "need m_min <= m_max");
    if (o.restarts) cfg.optimizer.restarts = *o.restarts;
    if (o.seed) {
        cfg.optimizer.seed = *o.seed;
        cfg.sim.seed = *o.seed;
    }
    if (o.threads) cfg.optimizer.threads = *o.threads;
    if (o.trials) cfg.sim.trials = *o.trials;
    if (o.horizon) {
        cfg.sim.horizon = *o.horizon;
        if (!cfg.explicit_sample_times) {
            cfg.sim.sample_times = mjls::uniform_times(cfg.sim.horizon, cfg.sample_count);
        }
    }
    if (o.eps) cfg.eps = *o.eps;
    if (!o.out.empty()) cfg.report_path = o.out;
    if (!o.csv.empty()) cfg.csv_path = o.csv;
    if (o.strict) cfg.strict = true;
    mjls::validate(cfg.optimizer);
    mjls::validate(cfg.sim, cfg.system);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moment stability and instability certificates for Markov jump linear systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", mjls::kVersion);

    Overrides o;
    auto* certify = app.add_subcommand("certify", "assemble certificates and report the verdict");
    auto* optimize = app.add_subcommand("optimize", "search skew-symmetric weights of order m");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo moments of the jump system");
    auto* sweep = app.add_subcommand("sweep", "optimize over a range of weight orders");
    for (auto* cmd : {certify, optimize, simulate, sweep}) add_common(cmd, o);
    for (auto* cmd : {optimize, sweep}) {
        cmd->add_option("--restarts", o.restarts, "random restarts")->check(CLI::PositiveNumber);
    }
    optimize->add_option("--m", o.m, "weight order m")->check(CLI::PositiveNumber);
    certify->add_option("--m", o.m, "weight order m (informational)")->check(CLI::PositiveNumber);
    sweep->add_option("--m-min", o.m_min, "smallest weight order")->check(CLI::PositiveNumber);
    sweep->add_option("--m-max", o.m_max, "largest weight order")->check(CLI::PositiveNumber);
    simulate->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    simulate->add_option("--horizon", o.horizon, "simulation horizon")->check(CLI::PositiveNumber);
    simulate->add_option("--csv", o.csv, "write time,mean,stderr rows here");

    CLI11_PARSE(app, argc, argv);

    mjls::Task task = mjls::Task::Certify;
    if (optimize->parsed()) task = mjls::Task::Optimize;
    if (simulate->parsed()) task = mjls::Task::Simulate;
    if (sweep->parsed()) task = mjls::Task::Sweep;

    try {
        mjls::RunConfig cfg = mjls::parse_config(o.config_path);
        apply(o, task, cfg);
        return mjls::run(cfg, std::cout).exit_code;
    } catch (const mjls::SizeCapError& e) {
        std::cerr << "refused: " << e.what() << " (computed order " << e.order() << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return mjls::kExitError;
}
