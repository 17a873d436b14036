#pragma once

#include "mjls/config.hpp"
#include "mjls/report.hpp"

#include <ostream>

namespace mjls {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusiveStrict = 2;

struct RunOutcome {
    int exit_code = kExitOk;
    Report report;
};

/// Executes cfg.task, writes the requested report/CSV files and a short
/// human-readable summary to `log`. Errors propagate as exceptions.
[[nodiscard]] RunOutcome run(const RunConfig& cfg, std::ostream& log);

}  // namespace mjls
