#pragma once

// Machine-readable run reports:
//   {input, task, verdict, certificates: [...], optimization?, simulation?,
//    sweep?, versions, wall_time}

#include "mjls/certificates.hpp"
#include "mjls/simulation.hpp"
#include "mjls/weight_opt.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mjls {

inline constexpr const char* kVersion = "0.1.0";

struct SimulationSummary {
    int p = 1;
    double window = 0.0;
    bool no_significant_decay = false;
    TrajectoryStats stats;

    bool operator==(const SimulationSummary&) const = default;
};

struct SweepRow {
    int m = 1;
    double best_mu = 0.0;
    VerdictKind verdict = VerdictKind::Inconclusive;

    bool operator==(const SweepRow&) const = default;
};

struct Report {
    std::string task;
    nlohmann::json input;
    std::optional<StabilityVerdict> verdict;
    std::vector<CertificateReport> certificates;
    std::optional<OptimResult> optimization;
    std::optional<SimulationSummary> simulation;
    std::vector<SweepRow> sweep;
    nlohmann::json versions;
    double wall_time = 0.0;

    bool operator==(const Report&) const = default;
};

[[nodiscard]] nlohmann::json to_json(const WeightSet& w);
[[nodiscard]] WeightSet weight_set_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const CertificateReport& r);
[[nodiscard]] CertificateReport certificate_report_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const StabilityVerdict& v);
[[nodiscard]] StabilityVerdict verdict_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const OptimResult& r);
[[nodiscard]] OptimResult optim_result_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const TrajectoryStats& s);
[[nodiscard]] TrajectoryStats trajectory_stats_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const Report& r);
[[nodiscard]] Report report_from_json(const nlohmann::json& j);

[[nodiscard]] VerdictKind verdict_kind_from_string(const std::string& s);

/// time,mean_norm_p,stderr rows with a header line.
void write_csv(std::ostream& out, const TrajectoryStats& stats);

}  // namespace mjls
