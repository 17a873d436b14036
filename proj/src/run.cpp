#include "mjls/run.hpp"

#include <Eigen/Core>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace mjls {

using nlohmann::json;

namespace {

json effective_input(const RunConfig& cfg) {
    json sim = {{"horizon", cfg.sim.horizon},
                {"sample_times", cfg.sim.sample_times},
                {"trials", cfg.sim.trials},
                {"x0", vector_to_json(cfg.sim.x0)},
                {"seed", cfg.sim.seed},
                {"max_jumps_per_trial", cfg.sim.max_jumps_per_trial}};
    if (cfg.sim.initial_distribution.size() > 0) {
        sim["initial_distribution"] = vector_to_json(cfg.sim.initial_distribution);
    }
    const OptimizerConfig& o = cfg.optimizer;
    return {{"config", cfg.source},
            {"effective",
             {{"system", system_to_json(cfg.system)},
              {"p", cfg.p},
              {"m", cfg.m},
              {"m_range", {cfg.m_min, cfg.m_max}},
              {"eps", cfg.eps},
              {"strict", cfg.strict},
              {"optimizer",
               {{"restarts", o.restarts},
                {"samples_per_iter", o.samples_per_iter},
                {"max_iters", o.max_iters},
                {"init_scale_range", {o.init_scale_lo, o.init_scale_hi}},
                {"armijo_c", o.armijo_c},
                {"armijo_shrink", o.armijo_shrink},
                {"radius_initial", o.radius_initial},
                {"radius_decay", o.radius_decay},
                {"convergence_tol", o.convergence_tol},
                {"seed", o.seed}}},
              {"simulation", sim}}}};
}

void log_certificate(std::ostream& log, const CertificateReport& c) {
    log << "  " << std::left << std::setw(12) << to_string(c.kind) << " p=" << c.p
        << " order=" << c.order << " mu=" << std::setprecision(6) << c.mu
        << (c.hurwitz ? "  (Hurwitz)" : "  (not Hurwitz)") << '\n';
}

std::optional<SkewParams> warm_start_for(const RunConfig& cfg, int m) {
    if (!cfg.weights || cfg.weights->order != m ||
        cfg.weights->admissibility != Admissibility::SkewSymmetric || m < 2) {
        return std::nullopt;
    }
    return to_params(*cfg.weights);
}

void run_certify(const RunConfig& cfg, Report& report, std::ostream& log) {
    try {
        report.certificates.push_back(mean_square_verdict(cfg.system, cfg.eps).evidence);
    } catch (const SizeCapError& e) {
        log << "  mean-square certificate skipped: " << e.what() << '\n';
    }
    const StabilityVerdict unweighted =
        instability_verdict(cfg.system, cfg.p, WeightSet::trivial(cfg.system.mode_count()), cfg.eps);
    report.certificates.push_back(unweighted.evidence);
    report.verdict = unweighted;
    if (cfg.weights) {
        const StabilityVerdict weighted = instability_verdict(cfg.system, cfg.p, *cfg.weights, cfg.eps);
        report.certificates.push_back(weighted.evidence);
        // An instability proof from the weights supersedes an inconclusive T.
        if (weighted.kind == VerdictKind::NotPthMeanStable ||
            unweighted.kind == VerdictKind::Inconclusive) {
            report.verdict = weighted;
        }
    }
}

void run_optimize(const RunConfig& cfg, Report& report, std::ostream& log) {
    std::vector<SkewParams> warm;
    if (auto w = warm_start_for(cfg, cfg.m)) warm.push_back(*w);
    const OptimResult result = optimize_Vm(cfg.system, cfg.p, cfg.m, cfg.optimizer, warm);
    const StabilityVerdict verdict = verdict_from(cfg.system, result, cfg.eps);
    report.certificates.push_back(
        instability_verdict(cfg.system, cfg.p, WeightSet::trivial(cfg.system.mode_count()), cfg.eps)
            .evidence);
    report.certificates.push_back(verdict.evidence);
    report.optimization = result;
    report.verdict = verdict;
    log << "  best mu over skew weights of order " << cfg.m << ": " << std::setprecision(6)
        << result.best_mu << " (" << result.mu_trace.size() << " restarts, " << result.iterations
        << " iterations, " << std::setprecision(3) << result.wall_time << " s)\n";
}

void run_simulate(const RunConfig& cfg, Report& report, std::ostream& log) {
    SimConfig sim = cfg.sim;
    sim.p = cfg.p;
    SimulationSummary summary;
    summary.p = cfg.p;
    summary.stats = simulate(cfg.system, sim);
    summary.window = cfg.window > 0.0 ? cfg.window : 0.5 * (sim.sample_times.back() - sim.sample_times.front());
    summary.no_significant_decay = empirical_instability_check(summary.stats, summary.window);
    log << "  E||x||^" << cfg.p << " at t=" << summary.stats.times.back() << ": "
        << std::setprecision(6) << summary.stats.mean_norm_p.back() << " +/- "
        << summary.stats.stderr_norm_p.back() << '\n'
        << "  trailing-window decay test: "
        << (summary.no_significant_decay ? "no significant decay" : "decaying") << '\n';
    report.simulation = std::move(summary);
    if (!cfg.csv_path.empty()) {
        std::ofstream out(cfg.csv_path);
        if (!out) throw std::runtime_error("cannot write CSV to '" + cfg.csv_path + "'");
        write_csv(out, report.simulation->stats);
    }
}

void run_sweep(const RunConfig& cfg, Report& report, std::ostream& log) {
    std::optional<WeightSet> previous;
    std::optional<StabilityVerdict> best;
    for (int m = cfg.m_min; m <= cfg.m_max; ++m) {
        std::vector<SkewParams> warm;
        if (auto w = warm_start_for(cfg, m)) warm.push_back(*w);
        if (previous && m >= 2) warm.push_back(to_params(pad_weights(*previous, m)));
        const OptimResult result = optimize_Vm(cfg.system, cfg.p, m, cfg.optimizer, warm);
        const StabilityVerdict verdict = verdict_from(cfg.system, result, cfg.eps);
        report.sweep.push_back({m, result.verified_mu, verdict.kind});
        report.certificates.push_back(verdict.evidence);
        log << "  m=" << m << "  best mu=" << std::setprecision(6) << result.verified_mu << "  "
            << to_string(verdict.kind) << '\n';
        if (!best || verdict.evidence.mu > best->evidence.mu) best = verdict;
        previous = result.best_weights;
    }
    report.verdict = best;
}

}  // namespace

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.task) throw ConfigError("task", "no task given (use a subcommand or the 'task' field)");
    const auto started = std::chrono::steady_clock::now();
    RunOutcome outcome;
    Report& report = outcome.report;
    report.task = to_string(*cfg.task);
    report.input = effective_input(cfg);
    report.versions = {{"mjls", kVersion},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};

    log << report.task << ": N=" << cfg.system.mode_count() << " n=" << cfg.system.state_dim()
        << " p=" << cfg.p << '\n';
    switch (*cfg.task) {
        case Task::Certify: run_certify(cfg, report, log); break;
        case Task::Optimize: run_optimize(cfg, report, log); break;
        case Task::Simulate: run_simulate(cfg, report, log); break;
        case Task::Sweep: run_sweep(cfg, report, log); break;
    }
    for (const auto& c : report.certificates) log_certificate(log, c);
    if (report.verdict) {
        log << "verdict: " << to_string(report.verdict->kind)
            << (report.verdict->conditional ? " (conditional on asserted switched stability)" : "")
            << '\n';
    }
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!cfg.report_path.empty()) {
        std::ofstream out(cfg.report_path);
        if (!out) throw std::runtime_error("cannot write report to '" + cfg.report_path + "'");
        out << to_json(report).dump(2) << '\n';
    }
    if (cfg.strict && report.verdict && report.verdict->kind == VerdictKind::Inconclusive) {
        outcome.exit_code = kExitInconclusiveStrict;
    }
    return outcome;
}

}  // namespace mjls
