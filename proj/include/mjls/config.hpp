#pragma once

// JSON run configuration. Schema (all keys except "system" optional):
//
//   {
//     "system":   {"modes": [A_1, ..., A_N], "generator": Q},
//     "task":     "certify" | "optimize" | "simulate" | "sweep",
//     "p": 1, "m": 1, "m_range": [1, 3], "eps": 1e-9, "strict": false,
//     "weights":  {"admissibility": "skew" | "asserted", "matrices": [W_1, ..., W_N]},
//     "optimizer": {...OptimizerConfig fields...},
//     "simulation": {"horizon", "sample_times" | "num_samples", "trials", "x0",
//                    "initial_distribution", "seed", "max_jumps_per_trial", "window"},
//     "output":   {"report": "path.json", "csv": "path.csv"}
//   }
//
// Matrices are nested row-major arrays of numbers.

#include "mjls/certificates.hpp"
#include "mjls/simulation.hpp"
#include "mjls/system.hpp"
#include "mjls/weight_opt.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace mjls {

enum class Task { Certify, Optimize, Simulate, Sweep };

std::string to_string(Task t);
[[nodiscard]] std::optional<Task> task_from_string(const std::string& s);

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, std::string message, int line = -1);
    [[nodiscard]] const std::string& field() const { return field_; }
    [[nodiscard]] int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct RunConfig {
    JumpSystem system;
    std::optional<Task> task;
    int p = 1;
    int m = 1;
    int m_min = 1;
    int m_max = 3;
    double eps = kDefaultHurwitzMargin;
    bool strict = false;
    std::optional<WeightSet> weights;
    OptimizerConfig optimizer;
    SimConfig sim;
    double window = 0.0;  ///< 0 selects horizon / 2
    /// Sample grid size when no explicit sample_times were given.
    int sample_count = 21;
    bool explicit_sample_times = false;
    std::string report_path;
    std::string csv_path;
    /// The configuration as read, embedded into reports.
    nlohmann::json source;
};

/// Parses and validates; generator axiom violations surface as ConfigError
/// on field "system.generator" carrying every violation.
[[nodiscard]] RunConfig parse_config(const std::string& path);
[[nodiscard]] RunConfig parse_config_text(const std::string& text);
[[nodiscard]] RunConfig parse_config_json(const nlohmann::json& doc);

[[nodiscard]] nlohmann::json matrix_to_json(const Matrix& m);
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);
[[nodiscard]] nlohmann::json vector_to_json(const Vector& v);
[[nodiscard]] Vector vector_from_json(const nlohmann::json& j, const std::string& field);

[[nodiscard]] nlohmann::json system_to_json(const JumpSystem& sys);

}  // namespace mjls
