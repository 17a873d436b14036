#pragma once

// Event-driven Monte Carlo simulation of a jump system. Holding times and
// jumps of the mode chain are sampled exactly; the state is carried across
// each segment by the exact flow expm(A_i h).

#include "mjls/linalg.hpp"
#include "mjls/system.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mjls {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    double horizon = 1.0;
    std::vector<double> sample_times;  ///< increasing, within [0, horizon]
    int trials = 1000;
    Vector x0;
    Vector initial_distribution;  ///< empty selects uniform over modes
    int p = 1;
    std::uint64_t seed = 1;
    long long max_jumps_per_trial = 1000000;
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const SimConfig& cfg, const JumpSystem& sys);

/// `count` equally spaced times covering [0, horizon].
[[nodiscard]] std::vector<double> uniform_times(double horizon, int count);

struct TrajectoryStats {
    std::vector<double> times;
    std::vector<double> mean_norm_p;
    std::vector<double> stderr_norm_p;
    /// E[delta(t) (x) x(t)^[p]], length N * n_p per time.
    std::vector<Vector> lifted_moment;
    std::vector<Vector> lifted_stderr;
    /// Empirical P(r(t) = i) and its standard error.
    std::vector<Vector> mode_occupancy;
    std::vector<Vector> occupancy_stderr;
    int trials_used = 0;

    friend bool operator==(const TrajectoryStats& a, const TrajectoryStats& b) {
        return a.times == b.times && a.mean_norm_p == b.mean_norm_p &&
               a.stderr_norm_p == b.stderr_norm_p && exactly_equal(a.lifted_moment, b.lifted_moment) &&
               exactly_equal(a.lifted_stderr, b.lifted_stderr) &&
               exactly_equal(a.mode_occupancy, b.mode_occupancy) &&
               exactly_equal(a.occupancy_stderr, b.occupancy_stderr) && a.trials_used == b.trials_used;
    }
};

/// One trial: states at cfg.sample_times together with the mode in force.
struct SamplePath {
    std::vector<Vector> states;
    std::vector<int> modes;
    long long jumps = 0;
};

[[nodiscard]] SamplePath sample_path(const JumpSystem& sys, const SimConfig& cfg,
                                     std::uint64_t trial_seed);

/// Seed used for trial `index` under master seed `seed`.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

[[nodiscard]] TrajectoryStats simulate(const JumpSystem& sys, const SimConfig& cfg,
                                       int threads = 0);

/// exp(T t) (pi0 (x) x0^[p]) at each time: the exact lifted moment.
[[nodiscard]] std::vector<Vector> moment_ode_reference(const JumpSystem& sys, int p,
                                                       const Vector& x0,
                                                       const Vector& initial_distribution,
                                                       const std::vector<double>& times);
[[nodiscard]] std::vector<Vector> moment_ode_reference(const JumpSystem& sys, int p,
                                                       const Vector& x0, int mode0,
                                                       const std::vector<double>& times);

/// Advisory: true when log E||x||^p over the trailing `window` shows no
/// significant decay, i.e. least-squares slope + 2 se >= 0.
[[nodiscard]] bool empirical_instability_check(const TrajectoryStats& stats, double window);

}  // namespace mjls
