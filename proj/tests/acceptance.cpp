// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "mjls/certificates.hpp"
#include "mjls/config.hpp"
#include "mjls/lift.hpp"
#include "mjls/run.hpp"
#include "mjls/simulation.hpp"
#include "mjls/weight_opt.hpp"
#include "testing.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>

using namespace mjls;
using testing::Rng;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;  ///< seconds, 0 for none
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome rotation_abscissa() {
    const double mu = abscissa(build_T(testing::rotations(), 1));
    return {std::abs(mu + 1.0) <= 1e-8, fmt("mu(T) = %.12f", mu)};
}

Outcome swapped_rotation_weights() {
    const JumpSystem s = testing::rotations();
    const WeightSet w = WeightSet::skew({s.modes[1], s.modes[0]});
    const double mu = abscissa(build_T_hat(s, 1, w));
    const StabilityVerdict v = instability_verdict(s, 1, w, 1e-9);
    return {std::abs(mu) <= 1e-8 && v.kind == VerdictKind::NotPthMeanStable,
            fmt("mu(T_hat) = %.3e, verdict ", mu) + to_string(v.kind)};
}

Outcome unweighted_final_example() {
    const JumpSystem s = testing::unstable_pair();
    const double mu = abscissa(build_T(s, 1));
    const StabilityVerdict v = instability_verdict(s, 1, WeightSet::trivial(2));
    return {std::abs(mu + 0.07) <= 0.005 && v.kind == VerdictKind::Inconclusive,
            fmt("mu(T) = %.6f, verdict ", mu) + to_string(v.kind)};
}

Outcome optimized_final_example() {
    const JumpSystem s = testing::unstable_pair();
    OptimizerConfig cfg;
    cfg.restarts = 20;
    const OptimResult r = optimize_Vm(s, 1, 2, cfg);
    const StabilityVerdict v = verdict_from(s, r);
    return {r.best_mu >= 0.25 && v.kind == VerdictKind::NotPthMeanStable,
            fmt("best_mu = %.6f, verdict ", r.best_mu) + to_string(v.kind)};
}

Outcome kronecker_identities() {
    Rng rng(501);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = rng.integer(1, 4), k = rng.integer(1, 4), m = rng.integer(1, 4);
        const Matrix a = rng.matrix(n, n), b = rng.matrix(m, m);
        const Matrix x = expm(kron_sum(a, b));
        const Matrix y = testing::naive_kron(testing::taylor_expm(a), testing::taylor_expm(b));
        worst = std::max(worst, (x - y).norm() / (1.0 + y.norm()));

        const double na = spectral_norm(a) * spectral_norm(b);
        worst = std::max(worst, std::abs(spectral_norm(kron(a, b)) - na) / std::max(1.0, na));

        const Matrix c = rng.matrix(n, k), d = rng.matrix(k, n), e = rng.matrix(m, k), f = rng.matrix(k, m);
        const Matrix lhs = kron(c, e) * kron(d, f);
        const Matrix rhs = testing::naive_kron(Matrix(c * d), Matrix(e * f));
        worst = std::max(worst, (lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    return {worst <= 1e-10, fmt("worst relative residual %.2e", worst)};
}

Outcome lift_suite() {
    Rng rng(601);
    double norm_err = 0.0, scale_err = 0.0, flow_err = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = rng.integer(1, 4), p = rng.integer(1, 4);
        const Vector x = rng.vector(n);
        norm_err = std::max(norm_err, testing::rel_err(lift_vector(make_basis(n, p), x).norm(), std::pow(x.norm(), p)));
        const Matrix a = rng.matrix(n, n);
        const double c = rng.uniform(-5.0, 5.0);
        const Matrix la = lift_matrix(a, p);
        scale_err = std::max(scale_err, (lift_matrix(Matrix(c * a), p) - c * la).norm() / (1.0 + std::abs(c) * la.norm()));
    }
    for (int t = 0; t < 50; ++t) {
        const int n = rng.integer(1, 3), p = rng.integer(1, 3);
        const LiftBasis basis = make_basis(n, p);
        const Matrix a = rng.matrix(n, n);
        const Vector x0 = rng.vector(n);
        const double time = rng.uniform(0.0, 2.0);
        const Vector lhs = lift_vector(basis, Vector(testing::taylor_expm(a * time) * x0));
        const Vector rhs = expm(lift_matrix(basis, a) * time) * lift_vector(basis, x0);
        flow_err = std::max(flow_err, (lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    std::ostringstream os;
    os << "norm " << norm_err << ", scaling " << scale_err << ", flow " << flow_err;
    return {norm_err <= 1e-12 && scale_err <= 1e-12 && flow_err <= 1e-8, os.str()};
}

Outcome padding_monotonicity() {
    Rng rng(701);
    double worst = INFINITY;
    for (int t = 0; t < 20; ++t) {
        const int modes = rng.integer(1, 3), n = rng.integer(1, 3), m = rng.integer(1, 3);
        const JumpSystem s = rng.system(modes, n);
        std::vector<Matrix> ws;
        for (int i = 0; i < modes; ++i) ws.push_back(rng.skew(m, rng.uniform(0.1, 3.0)));
        const WeightSet w = WeightSet::skew(ws);
        worst = std::min(worst, abscissa(build_T_hat(s, 1, pad_weights(w, m + 1))) - abscissa(build_T_hat(s, 1, w)));
    }

    RunConfig cfg = parse_config_json({{"system", system_to_json(testing::unstable_pair())},
                                       {"task", "sweep"},
                                       {"m_range", {1, 3}}});
    std::ostringstream log;
    const Report r = run(cfg, log).report;
    bool nondecreasing = r.sweep.size() == 3;
    std::ostringstream os;
    os << "worst padding gain " << worst << "; sweep best_mu";
    for (std::size_t k = 0; k < r.sweep.size(); ++k) {
        os << ' ' << std::setprecision(17) << r.sweep[k].best_mu;
        // Same slack as the padding clause: m and m + 1 evaluate different
        // matrices, so equal suprema differ in the last bits.
        if (k > 0 && r.sweep[k].best_mu < r.sweep[k - 1].best_mu - 1e-9) nondecreasing = false;
    }
    return {worst >= -1e-9 && nondecreasing, os.str()};
}

Outcome complex_embedding() {
    Rng rng(801);
    double worst = INFINITY;
    for (int t = 0; t < 20; ++t) {
        const int modes = rng.integer(1, 3), n = rng.integer(1, 3), m = rng.integer(1, 3);
        const JumpSystem s = rng.system(modes, n);
        std::vector<CMatrix> vs;
        for (int i = 0; i < modes; ++i) vs.push_back(rng.skew_hermitian(m, rng.uniform(0.1, 3.0)));
        worst = std::min(worst, abscissa(build_T_hat(s, 1, embed_complex_weights(vs))) - abscissa(build_S_hat(s, vs)));
    }
    return {worst >= -1e-9, fmt("worst margin %.3e", worst)};
}

Outcome monte_carlo_oracle() {
    Rng rng(901);
    double worst_z = 0.0;
    bool ok = true;
    for (int t = 0; t < 10; ++t) {
        const int modes = rng.integer(1, 3), n = rng.integer(1, 3), p = rng.integer(1, 2);
        const JumpSystem s = rng.system(modes, n, 0.7);
        SimConfig cfg;
        cfg.horizon = 1.5;
        cfg.sample_times = uniform_times(cfg.horizon, 7);
        cfg.trials = 10000;
        cfg.x0 = rng.vector(n);
        cfg.p = p;
        cfg.seed = 9000 + static_cast<std::uint64_t>(t);
        const TrajectoryStats stats = simulate(s, cfg);
        const auto ref =
            moment_ode_reference(s, p, cfg.x0, Vector::Constant(modes, 1.0 / modes), cfg.sample_times);
        for (std::size_t k = 0; k < ref.size(); ++k) {
            for (Eigen::Index c = 0; c < ref[k].size(); ++c) {
                const double diff = std::abs(stats.lifted_moment[k](c) - ref[k](c));
                const double se = stats.lifted_stderr[k](c);
                // Components with no sampling variance (t = 0) must agree to rounding.
                if (diff > 4.0 * se + 1e-12 * (1.0 + std::abs(ref[k](c)))) ok = false;
                if (se > 0.0) worst_z = std::max(worst_z, diff / se);
            }
        }
    }

    const JumpSystem rot = testing::rotations();
    SimConfig cfg;
    cfg.horizon = 20.0;
    cfg.sample_times = uniform_times(cfg.horizon, 41);
    cfg.trials = 1000;
    cfg.x0 = Vector::Ones(2);
    cfg.seed = 77;
    double drift = 0.0;
    for (int k = 0; k < cfg.trials; ++k) {
        for (const auto& x : sample_path(rot, cfg, trial_seed(cfg.seed, k)).states) {
            drift = std::max(drift, std::abs(x.norm() - cfg.x0.norm()));
        }
    }
    std::ostringstream os;
    os << "max |z| " << worst_z << ", rotation norm drift " << drift;
    return {ok && drift <= 1e-10, os.str()};
}

Outcome gradient_check() {
    const AffineFamily fam = build_affine_family(testing::unstable_pair(), 1, 2);
    Rng rng(1001);
    int points = 0, attempts = 0;
    double worst = 0.0;
    while (points < 50 && attempts < 1000) {
        ++attempts;
        Vector w(2);
        w << rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0);
        const MuGradient g = mu_and_gradient(fam, w);
        if (!g.certified_smooth) continue;
        ++points;
        for (Eigen::Index k = 0; k < w.size(); ++k) {
            const double h = 1e-6;
            Vector wp = w, wm = w;
            wp(k) += h;
            wm(k) -= h;
            const double fd = (abscissa(fam.assemble(wp)) - abscissa(fam.assemble(wm))) / (2.0 * h);
            worst = std::max(worst, std::abs(g.grad(k) - fd) / (1.0 + std::abs(g.grad(k))));
        }
    }
    std::ostringstream os;
    os << points << " smooth points, worst relative mismatch " << worst;
    return {points == 50 && worst <= 1e-4, os.str()};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "rotation system unweighted abscissa", 1.0, rotation_abscissa},
        {2, "swapped rotation weights certify instability", 0.0, swapped_rotation_weights},
        {3, "final example unweighted certificate", 0.0, unweighted_final_example},
        {4, "final example optimized weights", 60.0, optimized_final_example},
        {5, "Kronecker identities", 5.0, kronecker_identities},
        {6, "lift suite", 0.0, lift_suite},
        {7, "padding monotonicity and sweep", 0.0, padding_monotonicity},
        {8, "complex embedding dominance", 0.0, complex_embedding},
        {9, "Monte Carlo moment oracle", 120.0, monte_carlo_oracle},
        {10, "gradient against finite differences", 0.0, gradient_check},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto started = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
        const bool pass = out.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s criterion %d (%s): %s [%.3f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, in_time ? "" : ", over time limit");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
