#include "mjls/weight_opt.hpp"

#include "mjls/lift.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace mjls {

Matrix skew_unit(int order, int a, int b) {
    if (a < 0 || b < 0 || a >= order || b >= order || a == b) {
        throw std::invalid_argument("skew_unit: invalid index pair");
    }
    Matrix r = Matrix::Zero(order, order);
    r(a, b) = 1.0;
    r(b, a) = -1.0;
    return r;
}

WeightSet to_weights(const SkewParams& params) {
    const int m = params.order;
    if (params.values.size() != SkewParams::count(params.modes, m)) {
        throw std::invalid_argument("to_weights: parameter vector has wrong length");
    }
    std::vector<Matrix> weights;
    weights.reserve(static_cast<std::size_t>(params.modes));
    Eigen::Index k = 0;
    for (int i = 0; i < params.modes; ++i) {
        Matrix w = Matrix::Zero(m, m);
        for (int a = 1; a < m; ++a) {
            for (int b = 0; b < a; ++b) {
                const double v = params.values(k++);
                w(a, b) += v;
                w(b, a) -= v;
            }
        }
        weights.push_back(std::move(w));
    }
    return WeightSet::skew(std::move(weights));
}

SkewParams to_params(const WeightSet& w) {
    SkewParams out;
    out.order = w.order;
    out.modes = static_cast<int>(w.weights.size());
    out.values.resize(SkewParams::count(out.modes, out.order));
    Eigen::Index k = 0;
    for (const auto& wi : w.weights) {
        if (!is_skew_symmetric(wi)) {
            throw std::invalid_argument("to_params: weight is not skew-symmetric");
        }
        for (int a = 1; a < w.order; ++a) {
            for (int b = 0; b < a; ++b) out.values(k++) = wi(a, b);
        }
    }
    return out;
}

Matrix AffineFamily::assemble(const Vector& values) const {
    if (values.size() != static_cast<Eigen::Index>(directions.size())) {
        throw std::invalid_argument("AffineFamily::assemble: expected " +
                                    std::to_string(directions.size()) + " parameters, got " +
                                    std::to_string(values.size()));
    }
    Matrix out = base;
    for (std::size_t k = 0; k < directions.size(); ++k) {
        out += values(static_cast<Eigen::Index>(k)) * directions[k];
    }
    return out;
}

AffineFamily build_affine_family(const JumpSystem& sys, int p, int m) {
    require_valid(sys);
    if (m < 1) throw std::invalid_argument("build_affine_family: m must be positive");
    const int n = sys.state_dim();
    const int modes = sys.mode_count();
    (void)certificate_order(modes, n * m, p);
    const LiftBasis basis = make_basis(n * m, p);
    const auto block = static_cast<Eigen::Index>(basis.size());

    AffineFamily fam;
    fam.modes = modes;
    fam.order = m;
    fam.p = p;
    const Matrix eye_m = Matrix::Identity(m, m);
    const Matrix eye_n = Matrix::Identity(n, n);
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(modes));
    for (const auto& a : sys.modes) blocks.push_back(lift_matrix(basis, kron<double>(eye_m, a)));
    fam.base = kron<double>(sys.generator.transpose(), Matrix::Identity(block, block)) +
               block_diag(blocks);

    // (R_ab (x) I_n)_[p] is mode independent; only its block position moves.
    std::vector<Matrix> lifted_units;
    for (int a = 1; a < m; ++a) {
        for (int b = 0; b < a; ++b) {
            lifted_units.push_back(lift_matrix(basis, kron<double>(skew_unit(m, a, b), eye_n)));
        }
    }
    const auto order = block * modes;
    for (int i = 0; i < modes; ++i) {
        for (const auto& unit : lifted_units) {
            Matrix z = Matrix::Zero(order, order);
            z.block(i * block, i * block, block, block) = unit;
            fam.directions.push_back(std::move(z));
        }
    }
    return fam;
}

namespace {

// Number of distinct eigenvalues in the achieving cluster, identifying
// conjugate pairs (the certificates are real).
int distinct_up_to_conjugation(const SpectralAbscissa& sa, double tol) {
    std::vector<Complex> reps;
    for (const auto& pair : sa.achieving_pairs) {
        const Complex v = pair.value;
        const bool seen = std::any_of(reps.begin(), reps.end(), [&](const Complex& r) {
            return std::abs(v - r) <= tol || std::abs(v - std::conj(r)) <= tol;
        });
        if (!seen) reps.push_back(v);
    }
    return static_cast<int>(reps.size());
}

}  // namespace

MuGradient mu_and_gradient(const AffineFamily& fam, const Vector& values) {
    const Matrix a = fam.assemble(values);
    const SpectralAbscissa sa = spectral_abscissa(a);
    MuGradient out;
    out.mu = sa.mu;
    out.grad = Vector::Zero(static_cast<Eigen::Index>(fam.directions.size()));
    const EigenPair& top = sa.achieving_pairs.front();
    const Complex overlap = top.left.dot(top.right);  // y^H x
    out.degenerate = std::abs(overlap) < kDegenerateOverlap;
    out.certified_smooth =
        !out.degenerate && distinct_up_to_conjugation(sa, default_cluster_tol(sa.mu)) == 1;
    if (out.degenerate) return out;
    for (std::size_t k = 0; k < fam.directions.size(); ++k) {
        const CVector zx = fam.directions[k].cast<Complex>() * top.right;
        out.grad(static_cast<Eigen::Index>(k)) = (top.left.dot(zx) / overlap).real();
    }
    return out;
}

void validate(const OptimizerConfig& cfg) {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw std::invalid_argument(std::string("optimizer config: invalid ") + field);
    };
    require(cfg.restarts >= 1, "restarts");
    require(cfg.samples_per_iter >= 0, "samples_per_iter");
    require(cfg.max_iters >= 1, "max_iters");
    require(cfg.init_scale_lo > 0 && cfg.init_scale_hi >= cfg.init_scale_lo, "init_scale_range");
    require(cfg.armijo_c > 0 && cfg.armijo_c < 1, "armijo_c");
    require(cfg.armijo_shrink > 0 && cfg.armijo_shrink < 1, "armijo_shrink");
    require(cfg.max_backtracks >= 1, "max_backtracks");
    require(cfg.initial_step > 0, "initial_step");
    require(cfg.radius_initial > 0, "radius_initial");
    require(cfg.radius_decay > 0 && cfg.radius_decay < 1, "radius_decay");
    require(cfg.radius_min > 0, "radius_min");
    require(cfg.stationarity_tol > 0, "stationarity_tol");
    require(cfg.convergence_tol > 0, "convergence_tol");
    require(cfg.threads >= 0, "threads");
}

Vector min_norm_hull_point(const Matrix& g) {
    const auto k = g.cols();
    if (k == 0) throw std::invalid_argument("min_norm_hull_point: no points");
    if (k == 1) return g.col(0);
    const Matrix h = g.transpose() * g;
    const double lipschitz = 2.0 * std::max(h.trace(), 1e-300);

    auto project = [k](const Vector& v) {
        // Euclidean projection onto the probability simplex.
        Vector sorted = v;
        std::sort(sorted.data(), sorted.data() + k, std::greater<>());
        double cumulative = 0.0;
        double theta = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            cumulative += sorted(j);
            const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
            if (sorted(j) - t > 0) theta = t;
        }
        return Vector((v.array() - theta).max(0.0));
    };

    Vector lambda = Vector::Constant(k, 1.0 / static_cast<double>(k));
    Vector y = lambda;
    double momentum = 1.0;
    for (int it = 0; it < 5000; ++it) {
        const Vector next = project(y - (2.0 / lipschitz) * (h * y));
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = next + ((momentum - 1.0) / next_momentum) * (next - lambda);
        const double change = (next - lambda).lpNorm<Eigen::Infinity>();
        lambda = next;
        momentum = next_momentum;
        if (change < 1e-15) break;
    }
    return g * lambda;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct RestartOutcome {
    Vector best;
    double best_mu = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    int iterations = 0;
};

double mu_at(const AffineFamily& fam, const Vector& x) {
    return abscissa(fam.assemble(x));
}

Vector random_ball(std::mt19937_64& rng, Eigen::Index dim, double radius) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector u(dim);
    for (Eigen::Index j = 0; j < dim; ++j) u(j) = normal(rng);
    const double nrm = u.norm();
    if (nrm == 0.0) return Vector::Zero(dim);
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
    return (r / nrm) * u;
}

RestartOutcome ascend(const AffineFamily& fam, Vector x, const OptimizerConfig& cfg,
                      std::mt19937_64& rng) {
    const auto dim = x.size();
    const int samples = cfg.samples_for(static_cast<int>(dim));
    RestartOutcome out;
    MuGradient here = mu_and_gradient(fam, x);
    double f = here.mu;
    out.trace.push_back(f);
    double radius = cfg.radius_initial;
    double step = cfg.initial_step;

    auto shrink_radius = [&]() {
        radius *= cfg.radius_decay;
        return radius >= cfg.radius_min;
    };

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        ++out.iterations;
        std::vector<Vector> grads;
        grads.reserve(static_cast<std::size_t>(samples) + 1);
        if (!here.degenerate) grads.push_back(here.grad);
        for (int s = 0; s < samples; ++s) {
            // Degenerate eigenvector conditions are resampled a few times.
            for (int attempt = 0; attempt < 4; ++attempt) {
                const MuGradient near = mu_and_gradient(fam, x + random_ball(rng, dim, radius));
                if (!near.degenerate) {
                    grads.push_back(near.grad);
                    break;
                }
            }
        }
        if (grads.empty()) {
            if (!shrink_radius()) break;
            continue;
        }
        Matrix g(dim, static_cast<Eigen::Index>(grads.size()));
        for (std::size_t j = 0; j < grads.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = grads[j];
        const Vector d = min_norm_hull_point(g);
        const double nd = d.norm();
        if (nd < cfg.stationarity_tol) {
            if (!shrink_radius()) break;
            continue;
        }
        const Vector dir = d / nd;

        double t = step;
        bool accepted = false;
        Vector trial;
        double f_trial = f;
        for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
            trial = x + t * dir;
            f_trial = mu_at(fam, trial);
            if (f_trial >= f + cfg.armijo_c * t * nd && f_trial > f) {
                accepted = true;
                break;
            }
            t *= cfg.armijo_shrink;
        }
        if (!accepted) {
            if (!shrink_radius()) break;
            continue;
        }
        x = trial;
        f = f_trial;
        here = mu_and_gradient(fam, x);
        out.trace.push_back(f);
        step = std::min(2.0 * t, 1e3);
        if (t < cfg.convergence_tol) break;
    }
    out.best = std::move(x);
    out.best_mu = f;
    return out;
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, count));
    if (workers == 1) {
        for (int k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int k = next++; k < count; k = next++) fn(k);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

OptimResult optimize_Vm(const JumpSystem& sys, int p, int m, const OptimizerConfig& cfg,
                        const std::vector<SkewParams>& warm_starts) {
    validate(cfg);
    const auto started = std::chrono::steady_clock::now();
    const AffineFamily fam = build_affine_family(sys, p, m);
    const int modes = sys.mode_count();
    const auto dim = static_cast<Eigen::Index>(fam.directions.size());

    OptimResult result;
    result.order = m;
    result.p = p;
    result.best_params.order = m;
    result.best_params.modes = modes;

    if (dim == 0) {
        result.best_params.values = Vector(0);
        result.best_mu = abscissa(fam.base);
        result.mu_trace.push_back({result.best_mu});
    } else {
        for (const auto& w : warm_starts) {
            if (w.order != m || w.modes != modes || w.values.size() != dim) {
                throw std::invalid_argument("optimize_Vm: warm start does not match (m, N)");
            }
        }
        const int warm = static_cast<int>(warm_starts.size());
        const int total = warm + cfg.restarts;
        std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(total));
        parallel_for(total, cfg.threads, [&](int k) {
            std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(k))));
            Vector x0;
            if (k < warm) {
                x0 = warm_starts[static_cast<std::size_t>(k)].values;
            } else {
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                const double scale =
                    std::exp(std::log(cfg.init_scale_lo) +
                             unit(rng) * (std::log(cfg.init_scale_hi) - std::log(cfg.init_scale_lo)));
                x0.resize(dim);
                for (Eigen::Index j = 0; j < dim; ++j) x0(j) = scale * (2.0 * unit(rng) - 1.0);
            }
            outcomes[static_cast<std::size_t>(k)] = ascend(fam, std::move(x0), cfg, rng);
        });

        // Highest mu wins; ties go to the smallest parameter norm.
        std::size_t winner = 0;
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            result.mu_trace.push_back(outcomes[k].trace);
            result.iterations += outcomes[k].iterations;
            const auto& c = outcomes[k];
            const auto& w = outcomes[winner];
            if (c.best_mu > w.best_mu ||
                (c.best_mu == w.best_mu && c.best.norm() < w.best.norm())) {
                winner = k;
            }
        }
        result.best_params.values = outcomes[winner].best;
        result.best_mu = outcomes[winner].best_mu;
    }

    result.best_weights = dim == 0 ? WeightSet::trivial(modes) : to_weights(result.best_params);
    result.verified_mu = abscissa(build_T_hat(sys, p, result.best_weights));
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

StabilityVerdict verdict_from(const JumpSystem& sys, const OptimResult& result, double eps) {
    if (result.order == 1) {
        return instability_verdict(sys, result.p, WeightSet::trivial(sys.mode_count()), eps);
    }
    StabilityVerdict v;
    v.p = result.p;
    v.evidence = evaluate(CertificateKind::WeightedT, build_T_hat(sys, result.p, result.best_weights),
                          result.p, eps, result.best_weights);
    v.kind = v.evidence.hurwitz ? VerdictKind::Inconclusive : VerdictKind::NotPthMeanStable;
    return v;
}

StabilityVerdict certify_via_optimization(const JumpSystem& sys, int p, int m,
                                          const OptimizerConfig& cfg, double eps) {
    return verdict_from(sys, optimize_Vm(sys, p, m, cfg), eps);
}

}  // namespace mjls
