#include "mjls/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mjls {

using nlohmann::json;

namespace {

std::string describe(const std::string& field, const std::string& message, int line) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " (line " << line << ")";
    if (!field.empty()) os << " at '" << field << "'";
    os << ": " << message;
    return os.str();
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(field, "missing required field");
    }
    return obj.at(key);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(field, "expected a finite number");
    return v;
}

int integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    return j.get<int>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
        throw ConfigError(field, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

template <typename T, typename Fn>
void optional_field(const json& obj, const std::string& key, const std::string& path, T& out,
                    Fn&& convert) {
    if (obj.contains(key)) out = convert(obj.at(key), path + "." + key);
}

OptimizerConfig parse_optimizer(const json& j) {
    const std::string path = "optimizer";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    OptimizerConfig cfg;
    optional_field(j, "restarts", path, cfg.restarts, integer);
    optional_field(j, "samples_per_iter", path, cfg.samples_per_iter, integer);
    optional_field(j, "max_iters", path, cfg.max_iters, integer);
    optional_field(j, "armijo_c", path, cfg.armijo_c, number);
    optional_field(j, "armijo_shrink", path, cfg.armijo_shrink, number);
    optional_field(j, "max_backtracks", path, cfg.max_backtracks, integer);
    optional_field(j, "initial_step", path, cfg.initial_step, number);
    optional_field(j, "radius_initial", path, cfg.radius_initial, number);
    optional_field(j, "radius_decay", path, cfg.radius_decay, number);
    optional_field(j, "radius_min", path, cfg.radius_min, number);
    optional_field(j, "stationarity_tol", path, cfg.stationarity_tol, number);
    optional_field(j, "convergence_tol", path, cfg.convergence_tol, number);
    optional_field(j, "seed", path, cfg.seed, unsigned_integer);
    optional_field(j, "threads", path, cfg.threads, integer);
    if (j.contains("init_scale_range")) {
        const auto& r = j.at("init_scale_range");
        if (!r.is_array() || r.size() != 2) {
            throw ConfigError(path + ".init_scale_range", "expected [lo, hi]");
        }
        cfg.init_scale_lo = number(r[0], path + ".init_scale_range[0]");
        cfg.init_scale_hi = number(r[1], path + ".init_scale_range[1]");
    }
    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return cfg;
}

void parse_simulation(const json& j, RunConfig& cfg) {
    const std::string path = "simulation";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    SimConfig& sim = cfg.sim;
    optional_field(j, "horizon", path, sim.horizon, number);
    optional_field(j, "trials", path, sim.trials, integer);
    optional_field(j, "seed", path, sim.seed, unsigned_integer);
    optional_field(j, "window", path, cfg.window, number);
    if (j.contains("max_jumps_per_trial")) {
        const auto& v = j.at("max_jumps_per_trial");
        if (!v.is_number_integer()) throw ConfigError(path + ".max_jumps_per_trial", "expected an integer");
        sim.max_jumps_per_trial = v.get<long long>();
    }
    if (j.contains("x0")) sim.x0 = vector_from_json(j.at("x0"), path + ".x0");
    if (j.contains("initial_distribution")) {
        sim.initial_distribution =
            vector_from_json(j.at("initial_distribution"), path + ".initial_distribution");
    }
    if (j.contains("sample_times")) {
        const auto& ts = j.at("sample_times");
        if (!ts.is_array()) throw ConfigError(path + ".sample_times", "expected an array");
        sim.sample_times.clear();
        cfg.explicit_sample_times = true;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            sim.sample_times.push_back(number(ts[k], path + ".sample_times[" + std::to_string(k) + "]"));
        }
    }
    if (j.contains("num_samples")) {
        if (j.contains("sample_times")) {
            throw ConfigError(path, "give either sample_times or num_samples, not both");
        }
        cfg.sample_count = integer(j.at("num_samples"), path + ".num_samples");
        if (cfg.sample_count < 2) throw ConfigError(path + ".num_samples", "need at least 2 samples");
    }
}

}  // namespace

ConfigError::ConfigError(std::string field, std::string message, int line)
    : std::runtime_error(describe(field, message, line)), field_(std::move(field)), line_(line) {}

std::string to_string(Task t) {
    switch (t) {
        case Task::Certify: return "certify";
        case Task::Optimize: return "optimize";
        case Task::Simulate: return "simulate";
        case Task::Sweep: return "sweep";
    }
    return "unknown";
}

std::optional<Task> task_from_string(const std::string& s) {
    for (Task t : {Task::Certify, Task::Optimize, Task::Simulate, Task::Sweep}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) {
        throw ConfigError(field + "[0]", "expected a non-empty array of numbers");
    }
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_field = field + "[" + std::to_string(r) + "]";
        if (!j[r].is_array()) throw ConfigError(row_field, "expected an array of numbers");
        if (j[r].size() != cols) {
            throw ConfigError(row_field, "row has " + std::to_string(j[r].size()) +
                                             " entries, expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                number(j[r][c], row_field + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
    return out;
}

Vector vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = number(j[k], field + "[" + std::to_string(k) + "]");
    }
    return v;
}

json system_to_json(const JumpSystem& sys) {
    json modes = json::array();
    for (const auto& a : sys.modes) modes.push_back(matrix_to_json(a));
    return {{"modes", modes}, {"generator", matrix_to_json(sys.generator)}};
}

RunConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "top level must be a JSON object");
    RunConfig cfg;
    cfg.source = doc;

    const json& system = require(doc, "system", "");
    const json& modes = require(system, "modes", "system");
    const json& generator = require(system, "generator", "system");
    if (!modes.is_array() || modes.empty()) {
        throw ConfigError("system.modes", "expected a non-empty array of matrices");
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        cfg.system.modes.push_back(matrix_from_json(modes[i], "system.modes[" + std::to_string(i) + "]"));
    }
    cfg.system.generator = matrix_from_json(generator, "system.generator");
    if (auto violations = validate(cfg.system); !violations.empty()) {
        std::string msg = "invalid jump system:";
        for (const auto& v : violations) msg += "\n  - " + to_string(v);
        const bool generator_only = std::all_of(violations.begin(), violations.end(),
                                                [](const Violation& v) { return v.mode < 0; });
        throw ConfigError(generator_only ? "system.generator" : "system", msg);
    }

    if (doc.contains("task")) {
        const auto& t = doc.at("task");
        if (!t.is_string()) throw ConfigError("task", "expected a string");
        cfg.task = task_from_string(t.get<std::string>());
        if (!cfg.task) throw ConfigError("task", "unknown task '" + t.get<std::string>() + "'");
    }
    optional_field(doc, "p", "", cfg.p, integer);
    optional_field(doc, "m", "", cfg.m, integer);
    optional_field(doc, "eps", "", cfg.eps, number);
    if (doc.contains("strict")) {
        if (!doc.at("strict").is_boolean()) throw ConfigError("strict", "expected a boolean");
        cfg.strict = doc.at("strict").get<bool>();
    }
    if (cfg.p < 1) throw ConfigError("p", "must be a positive integer");
    if (cfg.m < 1) throw ConfigError("m", "must be a positive integer");
    if (cfg.eps < 0) throw ConfigError("eps", "must be non-negative");
    if (doc.contains("m_range")) {
        const auto& r = doc.at("m_range");
        if (!r.is_array() || r.size() != 2) throw ConfigError("m_range", "expected [m_min, m_max]");
        cfg.m_min = integer(r[0], "m_range[0]");
        cfg.m_max = integer(r[1], "m_range[1]");
        if (cfg.m_min < 1 || cfg.m_max < cfg.m_min) {
            throw ConfigError("m_range", "need 1 <= m_min <= m_max");
        }
    }

    if (doc.contains("weights")) {
        const json& w = doc.at("weights");
        const json& mats = require(w, "matrices", "weights");
        if (!mats.is_array()) throw ConfigError("weights.matrices", "expected an array of matrices");
        std::vector<Matrix> weights;
        for (std::size_t i = 0; i < mats.size(); ++i) {
            weights.push_back(matrix_from_json(mats[i], "weights.matrices[" + std::to_string(i) + "]"));
        }
        if (static_cast<int>(weights.size()) != cfg.system.mode_count()) {
            throw ConfigError("weights.matrices", "expected one weight per mode");
        }
        std::string kind = "skew";
        if (w.contains("admissibility")) {
            if (!w.at("admissibility").is_string()) {
                throw ConfigError("weights.admissibility", "expected a string");
            }
            kind = w.at("admissibility").get<std::string>();
        }
        try {
            if (kind == "skew") {
                cfg.weights = WeightSet::skew(std::move(weights));
            } else if (kind == "asserted") {
                cfg.weights = WeightSet::asserted(std::move(weights));
            } else {
                throw ConfigError("weights.admissibility", "expected 'skew' or 'asserted'");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError("weights.matrices", e.what());
        }
    }

    if (doc.contains("optimizer")) cfg.optimizer = parse_optimizer(doc.at("optimizer"));

    cfg.sim.p = cfg.p;
    cfg.sim.x0 = Vector::Ones(cfg.system.state_dim()).normalized();
    if (doc.contains("simulation")) parse_simulation(doc.at("simulation"), cfg);
    if (!cfg.explicit_sample_times) cfg.sim.sample_times = uniform_times(cfg.sim.horizon, cfg.sample_count);
    try {
        validate(cfg.sim, cfg.system);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("simulation", e.what());
    }

    if (doc.contains("output")) {
        const json& out = doc.at("output");
        if (!out.is_object()) throw ConfigError("output", "expected an object");
        if (out.contains("report")) cfg.report_path = out.at("report").get<std::string>();
        if (out.contains("csv")) cfg.csv_path = out.at("csv").get<std::string>();
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(),
                                                         text.begin() + static_cast<long>(upto), '\n'));
        throw ConfigError("", std::string("malformed JSON: ") + e.what(), line);
    }
    return parse_config_json(doc);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace mjls
