#include "mjls/simulation.hpp"

#include "mjls/certificates.hpp"
#include "mjls/lift.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace mjls {

namespace {

constexpr int kChunkTrials = 256;
// Slope slack for exactly conserved norms, where roundoff alone decides the sign.
constexpr double kSlopeTolerance = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Vector resolved_distribution(const SimConfig& cfg, int modes) {
    if (cfg.initial_distribution.size() == 0) {
        return Vector::Constant(modes, 1.0 / static_cast<double>(modes));
    }
    return cfg.initial_distribution;
}

int draw_index(const Vector& probs, double u) {
    double cumulative = 0.0;
    int last_positive = 0;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        if (probs(k) > 0.0) last_positive = static_cast<int>(k);
        cumulative += probs(k);
        if (u < cumulative) return static_cast<int>(k);
    }
    return last_positive;
}

// Running mean and sum of squared deviations (Welford / Chan).
struct Moments {
    double count = 0.0;
    Vector mean;
    Vector m2;

    explicit Moments(Eigen::Index dim = 0) : mean(Vector::Zero(dim)), m2(Vector::Zero(dim)) {}

    void add(const Vector& x) {
        count += 1.0;
        const Vector delta = x - mean;
        mean += delta / count;
        m2 += delta.cwiseProduct(x - mean);
    }

    void merge(const Moments& other) {
        if (other.count == 0.0) return;
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double total = count + other.count;
        const Vector delta = other.mean - mean;
        mean += delta * (other.count / total);
        m2 += other.m2 + delta.cwiseProduct(delta) * (count * other.count / total);
        count = total;
    }

    [[nodiscard]] Vector standard_error() const {
        if (count < 2.0) return Vector::Zero(mean.size());
        return (m2.array().max(0.0) / ((count - 1.0) * count)).sqrt();
    }
};

// Per-time accumulators: [norm^p], lifted moment, occupancy.
struct Accumulator {
    std::vector<Moments> norm;
    std::vector<Moments> lifted;
    std::vector<Moments> occupancy;

    Accumulator(std::size_t times, Eigen::Index lifted_dim, Eigen::Index modes)
        : norm(times, Moments(1)), lifted(times, Moments(lifted_dim)),
          occupancy(times, Moments(modes)) {}

    void merge(const Accumulator& other) {
        for (std::size_t k = 0; k < norm.size(); ++k) {
            norm[k].merge(other.norm[k]);
            lifted[k].merge(other.lifted[k]);
            occupancy[k].merge(other.occupancy[k]);
        }
    }
};

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x51ED270B27E9ULL));
}

void validate(const SimConfig& cfg, const JumpSystem& sys) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("sim config: " + what); };
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) fail("horizon must be positive");
    if (cfg.trials < 1) fail("trials must be at least 1");
    if (cfg.p < 1) fail("p must be positive");
    if (cfg.max_jumps_per_trial < 1) fail("max_jumps_per_trial must be positive");
    if (cfg.sample_times.empty()) fail("sample_times is empty");
    for (std::size_t k = 0; k < cfg.sample_times.size(); ++k) {
        const double t = cfg.sample_times[k];
        if (!(t >= 0.0) || t > cfg.horizon) fail("sample time outside [0, horizon]");
        if (k > 0 && t < cfg.sample_times[k - 1]) fail("sample_times must be sorted");
    }
    if (cfg.x0.size() != sys.state_dim()) fail("x0 length does not match state dimension");
    if (!cfg.x0.allFinite()) fail("x0 has non-finite entries");
    if (cfg.initial_distribution.size() != 0) {
        const Vector& pi = cfg.initial_distribution;
        if (pi.size() != sys.mode_count()) fail("initial distribution length does not match N");
        if ((pi.array() < 0.0).any()) fail("initial distribution has negative entries");
        if (std::abs(pi.sum() - 1.0) > 1e-12) fail("initial distribution does not sum to 1");
    }
}

std::vector<double> uniform_times(double horizon, int count) {
    if (count < 2) throw std::invalid_argument("uniform_times: need at least two points");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = horizon * static_cast<double>(k) / (count - 1);
    }
    return out;
}

SamplePath sample_path(const JumpSystem& sys, const SimConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int modes = sys.mode_count();
    const Vector pi0 = resolved_distribution(cfg, modes);

    auto holding = [&](int mode) {
        const double rate = exit_rate(sys, mode);
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log1p(-unit(rng)) / rate;
    };

    SamplePath path;
    path.states.reserve(cfg.sample_times.size());
    path.modes.reserve(cfg.sample_times.size());
    int mode = draw_index(pi0, unit(rng));
    double t = 0.0;
    double next_jump = holding(mode);
    Vector x = cfg.x0;
    for (const double s : cfg.sample_times) {
        while (next_jump <= s) {
            x = expm(sys.modes[static_cast<std::size_t>(mode)] * (next_jump - t)) * x;
            t = next_jump;
            mode = draw_index(jump_probabilities(sys, mode), unit(rng));
            if (++path.jumps > cfg.max_jumps_per_trial) {
                throw SimulationError("trial exceeded max_jumps_per_trial = " +
                                      std::to_string(cfg.max_jumps_per_trial));
            }
            next_jump = t + holding(mode);
        }
        if (s > t) {
            x = expm(sys.modes[static_cast<std::size_t>(mode)] * (s - t)) * x;
            t = s;
        }
        path.states.push_back(x);
        path.modes.push_back(mode);
    }
    return path;
}

TrajectoryStats simulate(const JumpSystem& sys, const SimConfig& cfg, int threads) {
    require_valid(sys);
    validate(cfg, sys);
    const int modes = sys.mode_count();
    const LiftBasis basis = make_basis(sys.state_dim(), cfg.p);
    const auto np = static_cast<Eigen::Index>(basis.size());
    const std::size_t times = cfg.sample_times.size();
    const int chunks = (cfg.trials + kChunkTrials - 1) / kChunkTrials;

    std::vector<Accumulator> partial(static_cast<std::size_t>(chunks),
                                     Accumulator(times, np * modes, modes));
    auto run_chunk = [&](int c) {
        Accumulator& acc = partial[static_cast<std::size_t>(c)];
        const int begin = c * kChunkTrials;
        const int end = std::min(cfg.trials, begin + kChunkTrials);
        Vector norm(1);
        Vector lifted(np * modes);
        Vector occupancy(modes);
        for (int trial = begin; trial < end; ++trial) {
            const SamplePath path =
                sample_path(sys, cfg, trial_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
            for (std::size_t k = 0; k < times; ++k) {
                const Vector& x = path.states[k];
                const int mode = path.modes[k];
                norm(0) = std::pow(x.norm(), cfg.p);
                lifted.setZero();
                lifted.segment(mode * np, np) = lift_vector(basis, x);
                occupancy.setZero();
                occupancy(mode) = 1.0;
                acc.norm[k].add(norm);
                acc.lifted[k].add(lifted);
                acc.occupancy[k].add(occupancy);
            }
        }
    };

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, chunks);
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    for (int c = next++; c < chunks; c = next++) run_chunk(c);
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

    // Pairwise reduction in a fixed order, independent of the thread count.
    for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
        for (std::size_t k = 0; k + stride < partial.size(); k += 2 * stride) {
            partial[k].merge(partial[k + stride]);
        }
    }
    const Accumulator& total = partial.front();

    TrajectoryStats stats;
    stats.times = cfg.sample_times;
    stats.trials_used = cfg.trials;
    for (std::size_t k = 0; k < times; ++k) {
        stats.mean_norm_p.push_back(total.norm[k].mean(0));
        stats.stderr_norm_p.push_back(total.norm[k].standard_error()(0));
        stats.lifted_moment.push_back(total.lifted[k].mean);
        stats.lifted_stderr.push_back(total.lifted[k].standard_error());
        stats.mode_occupancy.push_back(total.occupancy[k].mean);
        stats.occupancy_stderr.push_back(total.occupancy[k].standard_error());
    }
    return stats;
}

std::vector<Vector> moment_ode_reference(const JumpSystem& sys, int p, const Vector& x0,
                                         const Vector& initial_distribution,
                                         const std::vector<double>& times) {
    const Matrix t_cert = build_T(sys, p);
    const LiftBasis basis = make_basis(sys.state_dim(), p);
    if (initial_distribution.size() != sys.mode_count()) {
        throw std::invalid_argument("moment_ode_reference: distribution length does not match N");
    }
    const Vector z0 = kron<double>(Matrix(initial_distribution), Matrix(lift_vector(basis, x0)));
    std::vector<Vector> out;
    out.reserve(times.size());
    for (const double t : times) {
        out.push_back(t == 0.0 ? z0 : Vector(expm(t_cert * t) * z0));
    }
    return out;
}

std::vector<Vector> moment_ode_reference(const JumpSystem& sys, int p, const Vector& x0, int mode0,
                                         const std::vector<double>& times) {
    if (mode0 < 0 || mode0 >= sys.mode_count()) {
        throw std::invalid_argument("moment_ode_reference: mode0 out of range");
    }
    Vector pi = Vector::Zero(sys.mode_count());
    pi(mode0) = 1.0;
    return moment_ode_reference(sys, p, x0, pi, times);
}

bool empirical_instability_check(const TrajectoryStats& stats, double window) {
    const auto& t = stats.times;
    if (t.size() < 3 || !(window > 0.0)) {
        throw std::invalid_argument("empirical_instability_check: insufficient sample times");
    }
    if (t.back() - t.front() < 2.0 * window) {
        throw std::invalid_argument(
            "empirical_instability_check: sample times must cover at least two windows");
    }
    const double start = t.back() - window;
    std::vector<double> ts;
    std::vector<double> ys;
    std::vector<double> sd;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < start) continue;
        const double mean = stats.mean_norm_p[k];
        if (!(mean > 0.0)) return false;  // collapsed to zero: decayed
        ts.push_back(t[k]);
        ys.push_back(std::log(mean));
        sd.push_back(stats.stderr_norm_p[k] / mean);
    }
    if (ts.size() < 3) {
        throw std::invalid_argument("empirical_instability_check: fewer than 3 points in window");
    }
    const auto count = static_cast<double>(ts.size());
    double t_bar = 0.0;
    double y_bar = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        t_bar += ts[k];
        y_bar += ys[k];
    }
    t_bar /= count;
    y_bar /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sxx += (ts[k] - t_bar) * (ts[k] - t_bar);
        sxy += (ts[k] - t_bar) * (ys[k] - y_bar);
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    double measurement = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double fit = y_bar + slope * (ts[k] - t_bar);
        ssr += (ys[k] - fit) * (ys[k] - fit);
        measurement += (ts[k] - t_bar) * (ts[k] - t_bar) * sd[k] * sd[k];
    }
    const double se_fit = std::sqrt(ssr / (count - 2.0) / sxx);
    const double se_measure = std::sqrt(measurement) / sxx;
    const double se = std::max(se_fit, se_measure);
    return slope + 2.0 * se >= -kSlopeTolerance;
}

}  // namespace mjls
